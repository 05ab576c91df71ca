#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "desm/lexical.hpp"
#include "desm/matrix.hpp"
#include "desm/run.hpp"

namespace desm {

/// Rank-k latent semantic analysis of the TF-IDF weighted term-document
/// matrix (weight = tf * ln(N/df)). Documents live in latent space as the
/// projected columns; queries are folded in through the term projection and
/// inverse singular values.
struct LsaModel {
    std::size_t k = 0;
    RowMatrix term_projection;            // |terms| x k, left singular vectors
    std::vector<double> singular_values;  // k, non-increasing
    RowMatrix doc_latent;                 // |docs| x k, row d = S * V^T column d
    std::vector<std::string> doc_ids;
    std::unordered_map<std::string, int> doc_row;
    std::vector<std::string> terms;
    std::unordered_map<std::string, int> term_row;
    std::vector<double> idf;  // ln(N/df) per term
    bool rank_reduced = false;  // true when k exceeded the matrix rank

    int term_index(std::string_view term) const;
    int doc_index(std::string_view doc_id) const;
};

/// Truncated SVD of the weighted matrix. When k exceeds the numerical rank,
/// the model is reduced to the rank and rank_reduced is set (a warning is
/// the caller's concern). k must be >= 1.
LsaModel lsa_train(const LexicalIndex& index, std::size_t k);

/// Cosine between the folded-in query and the document's latent vector.
/// Undefined for queries with no collection term (same ranked-last policy as
/// DESM). Throws on an unknown doc id.
std::optional<double> lsa_score(const std::vector<std::string>& query_tokens,
                                std::string_view doc_id, const LsaModel& model);

ScoredList lsa_rank(std::string query_id, const std::vector<std::string>& query_tokens,
                    const std::vector<std::string>& candidates, const LsaModel& model);

}  // namespace desm
