#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "desm/desm.hpp"
#include "desm/run.hpp"

namespace desm {

struct Bm25Config {
    double k1 = 1.7;
    double b = 0.95;

    void validate() const;  // k1 >= 0, 0 <= b <= 1
};

/// Term/document statistics for the lexical scorers. The lexical index keeps
/// its own term dictionary, independent of any embedding vocabulary; document
/// lengths count every token.
class LexicalIndex {
public:
    static LexicalIndex build(const std::vector<TokenizedDoc>& docs);

    int term_id(std::string_view term) const;  // -1 when absent from the collection
    std::int64_t doc_count() const { return static_cast<std::int64_t>(doc_ids_.size()); }
    std::int64_t term_count() const { return static_cast<std::int64_t>(terms_.size()); }
    std::int64_t document_frequency(int term_id) const { return df_[static_cast<std::size_t>(term_id)]; }
    double average_doc_length() const { return avg_doc_length_; }

    int doc_row(std::string_view doc_id) const;  // -1 when unknown
    std::int64_t doc_length(int doc_row) const { return lengths_[static_cast<std::size_t>(doc_row)]; }
    std::int64_t term_frequency(int term_id, int doc_row) const;

    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<std::string>& terms() const { return terms_; }

    /// (term id, tf) pairs for one document, ascending term id.
    const std::vector<std::pair<int, std::int64_t>>& doc_terms(int doc_row) const {
        return postings_[static_cast<std::size_t>(doc_row)];
    }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, int> term_id_;
    std::vector<std::int64_t> df_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, int> doc_row_;
    std::vector<std::int64_t> lengths_;
    std::vector<std::vector<std::pair<int, std::int64_t>>> postings_;
    double avg_doc_length_ = 0.0;
};

inline LexicalIndex build_lexical_index(const std::vector<TokenizedDoc>& docs) {
    return LexicalIndex::build(docs);
}

/// Okapi BM25 with the non-negative idf variant:
///   sum over distinct query terms of
///   ln(1 + (N - df + 0.5)/(df + 0.5)) * tf*(k1+1) / (tf + k1*(1 - b + b*len/avglen))
/// Repeated query terms count once; terms missing from the document or the
/// whole collection contribute zero. Throws on an unknown doc id.
double bm25_score(const std::vector<std::string>& query_tokens, std::string_view doc_id,
                  const LexicalIndex& index, const Bm25Config& cfg);

ScoredList bm25_rank(std::string query_id, const std::vector<std::string>& query_tokens,
                     const std::vector<std::string>& candidates, const LexicalIndex& index,
                     const Bm25Config& cfg);

}  // namespace desm
