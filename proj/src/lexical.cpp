#include "desm/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace desm {

void Bm25Config::validate() const {
    if (!(k1 >= 0.0)) throw std::invalid_argument("k1 must be >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("b must be in [0, 1]");
}

LexicalIndex LexicalIndex::build(const std::vector<TokenizedDoc>& docs) {
    LexicalIndex index;
    std::int64_t total_length = 0;
    for (const auto& doc : docs) {
        if (index.doc_row_.count(doc.doc_id))
            throw std::invalid_argument("duplicate doc id: " + doc.doc_id);
        index.doc_row_.emplace(doc.doc_id, static_cast<int>(index.doc_ids_.size()));
        index.doc_ids_.push_back(doc.doc_id);
        index.lengths_.push_back(static_cast<std::int64_t>(doc.tokens.size()));
        total_length += static_cast<std::int64_t>(doc.tokens.size());

        std::map<int, std::int64_t> tf;  // ordered: postings come out sorted by term id
        for (const auto& tok : doc.tokens) {
            auto [it, inserted] = index.term_id_.try_emplace(
                tok, static_cast<int>(index.terms_.size()));
            if (inserted) {
                index.terms_.push_back(tok);
                index.df_.push_back(0);
            }
            ++tf[it->second];
        }
        std::vector<std::pair<int, std::int64_t>> postings(tf.begin(), tf.end());
        for (const auto& [tid, count] : postings) ++index.df_[static_cast<std::size_t>(tid)];
        index.postings_.push_back(std::move(postings));
    }
    index.avg_doc_length_ =
        docs.empty() ? 0.0 : static_cast<double>(total_length) / static_cast<double>(docs.size());
    return index;
}

int LexicalIndex::term_id(std::string_view term) const {
    auto it = term_id_.find(std::string(term));
    return it == term_id_.end() ? -1 : it->second;
}

int LexicalIndex::doc_row(std::string_view doc_id) const {
    auto it = doc_row_.find(std::string(doc_id));
    return it == doc_row_.end() ? -1 : it->second;
}

std::int64_t LexicalIndex::term_frequency(int term_id, int doc_row) const {
    const auto& postings = postings_[static_cast<std::size_t>(doc_row)];
    auto it = std::lower_bound(postings.begin(), postings.end(), term_id,
                               [](const auto& p, int id) { return p.first < id; });
    if (it == postings.end() || it->first != term_id) return 0;
    return it->second;
}

double bm25_score(const std::vector<std::string>& query_tokens, std::string_view doc_id,
                  const LexicalIndex& index, const Bm25Config& cfg) {
    cfg.validate();
    int row = index.doc_row(doc_id);
    if (row < 0) throw std::invalid_argument("unknown doc id: " + std::string(doc_id));

    const auto n_docs = static_cast<double>(index.doc_count());
    const double avg = index.average_doc_length();
    const auto len = static_cast<double>(index.doc_length(row));
    // Every tf is zero when the collection is empty of tokens; avoid 0/0 in
    // the length ratio by treating the normalizer as 1.
    const double len_norm = avg > 0.0 ? 1.0 - cfg.b + cfg.b * len / avg : 1.0;

    std::unordered_set<int> seen;
    double score = 0.0;
    for (const auto& term : query_tokens) {
        int tid = index.term_id(term);
        if (tid < 0) continue;  // absent from the collection: tf = 0 everywhere
        if (!seen.insert(tid).second) continue;  // distinct query terms only
        const auto tf = static_cast<double>(index.term_frequency(tid, row));
        if (tf == 0.0) continue;
        const auto df = static_cast<double>(index.document_frequency(tid));
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        score += idf * tf * (cfg.k1 + 1.0) / (tf + cfg.k1 * len_norm);
    }
    return score;
}

ScoredList bm25_rank(std::string query_id, const std::vector<std::string>& query_tokens,
                     const std::vector<std::string>& candidates, const LexicalIndex& index,
                     const Bm25Config& cfg) {
    std::vector<ScoredEntry> entries;
    entries.reserve(candidates.size());
    for (const auto& doc_id : candidates) {
        entries.push_back({doc_id, bm25_score(query_tokens, doc_id, index, cfg)});
    }
    return make_scored_list(std::move(query_id), std::move(entries));
}

}  // namespace desm
