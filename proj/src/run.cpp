#include "desm/run.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace desm {

ScoredList make_scored_list(std::string query_id, std::vector<ScoredEntry> entries) {
    std::unordered_set<std::string> seen;
    for (const auto& e : entries) {
        if (!seen.insert(e.doc_id).second)
            throw std::invalid_argument("duplicate doc id in candidates: " + e.doc_id);
    }
    std::sort(entries.begin(), entries.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
        if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
        if (a.score && b.score && *a.score != *b.score) return *a.score > *b.score;
        return a.doc_id < b.doc_id;
    });
    return {std::move(query_id), std::move(entries)};
}

const std::vector<RunEntry>* RunFile::find(const std::string& query_id) const {
    for (std::size_t i = 0; i < query_order.size(); ++i) {
        if (query_order[i] == query_id) return &rankings[i];
    }
    return nullptr;
}

RunFile to_run_file(const std::vector<ScoredList>& lists, std::string tag) {
    RunFile run;
    run.tag = std::move(tag);
    for (const auto& list : lists) {
        run.query_order.push_back(list.query_id);
        std::vector<RunEntry> entries;
        entries.reserve(list.entries.size());
        int rank = 1;
        for (const auto& e : list.entries) {
            entries.push_back({e.doc_id, rank++, e.score.value_or(kUndefinedRunScore)});
        }
        run.rankings.push_back(std::move(entries));
    }
    return run;
}

void write_run_file(const std::string& path, const RunFile& run) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write run file: " + path);
    char buf[64];
    for (std::size_t q = 0; q < run.query_order.size(); ++q) {
        for (const auto& e : run.rankings[q]) {
            auto res = std::to_chars(buf, buf + sizeof(buf), e.score);
            os << run.query_order[q] << " Q0 " << e.doc_id << ' ' << e.rank << ' '
               << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ' '
               << run.tag << '\n';
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

RunFile read_run_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open run file: " + path);
    RunFile run;
    std::unordered_set<std::string> seen_queries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string qid, q0, docid, tag;
        int rank = 0;
        double score = 0.0;
        if (!(ls >> qid >> q0 >> docid >> rank >> score >> tag))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed run line: '" + line + "'");
        if (run.query_order.empty() || run.query_order.back() != qid) {
            if (!seen_queries.insert(qid).second)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": non-contiguous query block: " + qid);
            run.query_order.push_back(qid);
            run.rankings.emplace_back();
        }
        run.rankings.back().push_back({docid, rank, score});
        run.tag = tag;
    }
    return run;
}

}  // namespace desm
