#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "desm/corpus_io.hpp"
#include "desm/embedding.hpp"
#include "desm/matrix.hpp"
#include "desm/run.hpp"

namespace desm {

/// Precomputed per-document centroids in one embedding space: the mean of the
/// unit-normalized vectors of the document's in-vocabulary token multiset.
/// The centroid itself is deliberately not re-normalized; scoring divides by
/// its norm. Documents with no in-vocabulary token are recorded in
/// skipped_docs and score as undefined.
struct CentroidIndex {
    Space space = Space::out;
    std::size_t dim = 0;
    std::vector<std::string> doc_ids;   // indexed docs in input order
    RowMatrix centroids;                // row r belongs to doc_ids[r]
    std::vector<std::string> skipped_docs;

    /// Row of the document's centroid, or empty when unknown or skipped.
    std::optional<std::span<const double>> centroid_of(std::string_view doc_id) const;
    bool is_skipped(std::string_view doc_id) const;
    bool contains(std::string_view doc_id) const;
    std::size_t size() const { return doc_ids.size(); }

    // populated by build/load
    std::unordered_map<std::string, int> row_of;
    std::unordered_map<std::string, char> skipped_set;
};

/// Mean of the unit-normalized vectors of the in-vocabulary tokens (repeated
/// tokens contribute repeatedly). Empty when no token is in vocabulary.
/// Throws std::runtime_error if an in-vocabulary word has a zero vector,
/// which cannot be normalized.
std::optional<std::vector<double>> document_centroid(const std::vector<std::string>& tokens,
                                                     const DualEmbedding& emb, Space space);

/// Token streams come as (doc id, text tokens) pairs.
struct TokenizedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
};

CentroidIndex build_centroid_index(const std::vector<TokenizedDoc>& docs,
                                   const DualEmbedding& emb, Space space);

/// Mean over in-vocabulary query terms of the cosine between the term's
/// vector in the variant's first space and the document centroid. Repeated
/// query terms contribute repeatedly; the divisor counts in-vocabulary terms
/// only. Undefined (empty) for all-OOV queries and skipped documents. The
/// variant's second space must match the index's space; a mismatch throws.
std::optional<double> desm_score(const std::vector<std::string>& query_tokens,
                                 std::string_view doc_id, const CentroidIndex& index,
                                 const DualEmbedding& emb, SpacePair variant);

/// Ranks the candidate set by desm_score: defined scores descending with
/// doc-id tie-break, undefined documents after all defined ones in ascending
/// doc-id order. Candidates must be indexed or skipped docs.
ScoredList desm_rank(std::string query_id, const std::vector<std::string>& query_tokens,
                     const std::vector<std::string>& candidates, const CentroidIndex& index,
                     const DualEmbedding& emb, SpacePair variant);

/// Binary centroid index persistence (little-endian host layout):
/// magic, version, space tag, dim, doc table, skipped table, centroid rows.
void save_centroid_index(const CentroidIndex& index, const std::string& path);
CentroidIndex load_centroid_index(const std::string& path);

}  // namespace desm
