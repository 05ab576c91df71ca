#include "desm/eval.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace desm {

void Judgments::add(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0) throw std::invalid_argument("negative relevance grade");
    auto [it, first_seen] = by_query_.try_emplace(query_id);
    if (first_seen) query_order_.push_back(query_id);
    if (!it->second.emplace(doc_id, grade).second)
        throw std::invalid_argument("duplicate judgment for (" + query_id + ", " + doc_id + ")");
}

const std::unordered_map<std::string, int>* Judgments::for_query(
    const std::string& query_id) const {
    auto it = by_query_.find(query_id);
    return it == by_query_.end() ? nullptr : &it->second;
}

std::optional<int> Judgments::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end()) return std::nullopt;
    auto d = q->second.find(doc_id);
    if (d == q->second.end()) return std::nullopt;
    return d->second;
}

Judgments read_qrels(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open qrels file: " + path);
    Judgments j;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string qid, zero, docid;
        int grade = 0;
        if (!(ls >> qid >> zero >> docid >> grade))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed qrels line: '" + line + "'");
        j.add(qid, docid, grade);
    }
    return j;
}

void write_qrels(const std::string& path, const Judgments& judgments) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write qrels file: " + path);
    for (const auto& qid : judgments.query_order()) {
        const auto* docs = judgments.for_query(qid);
        std::vector<std::pair<std::string, int>> sorted(docs->begin(), docs->end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [docid, grade] : sorted) {
            os << qid << " 0 " << docid << ' ' << grade << '\n';
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

inline double gain(int grade) { return std::pow(2.0, grade) - 1.0; }
inline double discount(int rank1) { return std::log2(static_cast<double>(rank1) + 1.0); }

}  // namespace

double ndcg_at_k(std::span<const std::string> ranked_docs,
                 const std::unordered_map<std::string, int>& grades, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");

    double dcg = 0.0;
    const auto depth = std::min<std::size_t>(static_cast<std::size_t>(k), ranked_docs.size());
    for (std::size_t r = 0; r < depth; ++r) {
        auto it = grades.find(ranked_docs[r]);
        int g = it == grades.end() ? 0 : it->second;
        dcg += gain(g) / discount(static_cast<int>(r) + 1);
    }

    std::vector<int> ideal;
    ideal.reserve(grades.size());
    for (const auto& [doc, g] : grades) ideal.push_back(g);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    const auto ideal_depth = std::min<std::size_t>(static_cast<std::size_t>(k), ideal.size());
    for (std::size_t r = 0; r < ideal_depth; ++r) {
        idcg += gain(ideal[r]) / discount(static_cast<int>(r) + 1);
    }

    if (idcg == 0.0) return 0.0;
    return dcg / idcg;
}

EvalReport evaluate_run(const RunFile& run, const Judgments& judgments,
                        const std::vector<int>& cutoffs) {
    if (run.query_order.empty()) throw std::invalid_argument("empty run");
    if (cutoffs.empty()) throw std::invalid_argument("no cutoffs given");

    EvalReport report;
    report.cutoffs = cutoffs;
    report.tag = run.tag;
    for (std::size_t q = 0; q < run.query_order.size(); ++q) {
        const auto& qid = run.query_order[q];
        const auto* grades = judgments.for_query(qid);
        if (!grades) {
            ++report.skipped_unjudged_queries;
            continue;
        }
        std::vector<std::string> ranked;
        ranked.reserve(run.rankings[q].size());
        for (const auto& e : run.rankings[q]) ranked.push_back(e.doc_id);
        QueryMetrics m;
        m.query_id = qid;
        for (int k : cutoffs) m.ndcg[k] = ndcg_at_k(ranked, *grades, k);
        report.per_query.push_back(std::move(m));
    }
    if (report.per_query.empty())
        throw std::runtime_error("no judged query in run");

    // Sum in canonical query order so the mean is bit-identical however the
    // run orders its queries.
    std::vector<const QueryMetrics*> canonical;
    canonical.reserve(report.per_query.size());
    for (const auto& m : report.per_query) canonical.push_back(&m);
    std::sort(canonical.begin(), canonical.end(),
              [](const QueryMetrics* a, const QueryMetrics* b) { return a->query_id < b->query_id; });
    for (int k : cutoffs) {
        double sum = 0.0;
        for (const auto* m : canonical) sum += m->ndcg.at(k);
        report.mean_ndcg[k] = sum / static_cast<double>(report.per_query.size());
    }
    return report;
}

double paired_significance(std::span<const double> metric_a, std::span<const double> metric_b) {
    if (metric_a.size() != metric_b.size())
        throw std::invalid_argument("paired samples differ in length");
    const std::size_t n = metric_a.size();
    if (n < 2) throw std::invalid_argument("paired t-test needs n >= 2");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += metric_a[i] - metric_b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = metric_a[i] - metric_b[i] - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);

    if (var == 0.0) return mean == 0.0 ? 1.0 : 0.0;

    const double t = mean / std::sqrt(var / static_cast<double>(n));
    boost::math::students_t dist(static_cast<double>(n - 1));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

void compare_to_baseline(EvalReport& report, const EvalReport& baseline) {
    std::unordered_map<std::string, const QueryMetrics*> base_by_query;
    for (const auto& m : baseline.per_query) base_by_query.emplace(m.query_id, &m);

    for (int k : report.cutoffs) {
        std::vector<double> a, b;
        for (const auto& m : report.per_query) {
            auto it = base_by_query.find(m.query_id);
            if (it == base_by_query.end()) continue;
            auto bk = it->second->ndcg.find(k);
            if (bk == it->second->ndcg.end()) continue;
            a.push_back(m.ndcg.at(k));
            b.push_back(bk->second);
        }
        if (a.size() >= 2) report.p_value_vs_baseline[k] = paired_significance(a, b);
    }
}

CandidateMode parse_candidate_mode(std::string_view s) {
    if (s == "telescoped") return CandidateMode::telescoped;
    if (s == "full") return CandidateMode::full;
    throw std::invalid_argument("unknown candidate mode: " + std::string(s));
}

std::unordered_map<std::string, std::vector<std::string>> make_candidate_sets(
    CandidateMode mode, const Judgments& judgments, const std::vector<std::string>& all_doc_ids) {
    std::unordered_map<std::string, std::vector<std::string>> sets;
    if (mode == CandidateMode::telescoped) {
        for (const auto& qid : judgments.query_order()) {
            const auto* docs = judgments.for_query(qid);
            std::vector<std::string> ids;
            ids.reserve(docs->size());
            for (const auto& [doc, grade] : *docs) ids.push_back(doc);
            std::sort(ids.begin(), ids.end());
            sets.emplace(qid, std::move(ids));
        }
    } else {
        std::vector<std::string> ids(all_doc_ids);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (const auto& qid : judgments.query_order()) sets.emplace(qid, ids);
    }
    return sets;
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void pad_to(std::string& line, std::size_t width) {
    if (line.size() < width) line.append(width - line.size(), ' ');
}

}  // namespace

std::string format_report(const EvalReport& report, const EvalReport* baseline) {
    constexpr std::size_t kLabelWidth = 24;
    constexpr std::size_t kColWidth = 10;

    std::string out;
    std::string header(kLabelWidth, ' ');
    for (int k : report.cutoffs) {
        std::string col = "NDCG@" + std::to_string(k);
        header += std::string(kColWidth - std::min(kColWidth, col.size()), ' ') + col;
    }
    out += header + '\n';

    auto row = [&](const std::string& label, const EvalReport& r, bool mark) {
        std::string line = label.substr(0, kLabelWidth);
        pad_to(line, kLabelWidth);
        for (int k : report.cutoffs) {
            auto it = r.mean_ndcg.find(k);
            std::string cell = it == r.mean_ndcg.end() ? "-" : fixed2(it->second * 100.0);
            if (mark) {
                auto p = report.p_value_vs_baseline.find(k);
                if (p != report.p_value_vs_baseline.end() && p->second < 0.05) cell += '*';
            }
            line += std::string(kColWidth - std::min(kColWidth, cell.size()), ' ') + cell;
        }
        out += line + '\n';
    };

    row(report.tag.empty() ? "run" : report.tag, report, baseline != nullptr);
    if (baseline) {
        row(baseline->tag.empty() ? "baseline" : baseline->tag, *baseline, false);
        std::string line = "p-value";
        pad_to(line, kLabelWidth);
        for (int k : report.cutoffs) {
            auto p = report.p_value_vs_baseline.find(k);
            std::string cell = p == report.p_value_vs_baseline.end() ? "-" : fixed4(p->second);
            line += std::string(kColWidth - std::min(kColWidth, cell.size()), ' ') + cell;
        }
        out += line + '\n';
    }

    out += '\n';
    for (int k : report.cutoffs) {
        out += "ndcg@" + std::to_string(k) + "=" + fixed2(report.mean_ndcg.at(k) * 100.0) + '\n';
    }
    for (const auto& [k, p] : report.p_value_vs_baseline) {
        out += "p@" + std::to_string(k) + "=" + fixed4(p) + '\n';
        out += "significant@" + std::to_string(k) + "=" + (p < 0.05 ? "true" : "false") + '\n';
    }
    out += "queries_evaluated=" + std::to_string(report.per_query.size()) + '\n';
    out += "queries_skipped=" + std::to_string(report.skipped_unjudged_queries) + '\n';
    return out;
}

}  // namespace desm
