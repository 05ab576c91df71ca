#include "desm/desm.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace desm {

std::optional<std::span<const double>> CentroidIndex::centroid_of(std::string_view doc_id) const {
    auto it = row_of.find(std::string(doc_id));
    if (it == row_of.end()) return std::nullopt;
    return centroids.row(static_cast<std::size_t>(it->second));
}

bool CentroidIndex::is_skipped(std::string_view doc_id) const {
    return skipped_set.count(std::string(doc_id)) > 0;
}

bool CentroidIndex::contains(std::string_view doc_id) const {
    return row_of.count(std::string(doc_id)) > 0 || is_skipped(doc_id);
}

std::optional<std::vector<double>> document_centroid(const std::vector<std::string>& tokens,
                                                     const DualEmbedding& emb, Space space) {
    const RowMatrix& m = emb.matrix(space);
    std::vector<double> sum(emb.dim(), 0.0);
    std::int64_t in_vocab = 0;
    for (const auto& t : tokens) {
        int id = emb.vocab.id_of(t);
        if (id < 0) continue;  // OOV words are ignored
        auto row = m.row(static_cast<std::size_t>(id));
        double norm = l2_norm(row);
        if (norm == 0.0)
            throw std::runtime_error("zero vector for vocabulary word '" + t +
                                     "' in space " + to_string(space));
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j] / norm;
        ++in_vocab;
    }
    if (in_vocab == 0) return std::nullopt;
    const double inv = 1.0 / static_cast<double>(in_vocab);
    for (double& v : sum) v *= inv;
    return sum;
}

CentroidIndex build_centroid_index(const std::vector<TokenizedDoc>& docs,
                                   const DualEmbedding& emb, Space space) {
    CentroidIndex index;
    index.space = space;
    index.dim = emb.dim();

    std::vector<std::vector<double>> rows;
    for (const auto& doc : docs) {
        if (index.row_of.count(doc.doc_id) || index.skipped_set.count(doc.doc_id))
            throw std::invalid_argument("duplicate doc id: " + doc.doc_id);
        auto centroid = document_centroid(doc.tokens, emb, space);
        if (!centroid) {
            index.skipped_set.emplace(doc.doc_id, 1);
            index.skipped_docs.push_back(doc.doc_id);
            continue;
        }
        index.row_of.emplace(doc.doc_id, static_cast<int>(rows.size()));
        index.doc_ids.push_back(doc.doc_id);
        rows.push_back(std::move(*centroid));
    }

    index.centroids = RowMatrix(rows.size(), index.dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto dst = index.centroids.row(r);
        std::copy(rows[r].begin(), rows[r].end(), dst.begin());
    }
    return index;
}

namespace {

struct QueryVectors {
    std::vector<std::span<const double>> term_rows;  // first-space rows, in-vocab terms only
};

QueryVectors query_vectors(const std::vector<std::string>& query_tokens,
                           const DualEmbedding& emb, SpacePair variant) {
    QueryVectors q;
    const RowMatrix& m = emb.matrix(first_space(variant));
    for (const auto& t : query_tokens) {
        int id = emb.vocab.id_of(t);
        if (id >= 0) q.term_rows.push_back(m.row(static_cast<std::size_t>(id)));
    }
    return q;
}

std::optional<double> score_against_centroid(const QueryVectors& q,
                                             std::span<const double> centroid) {
    if (q.term_rows.empty()) return std::nullopt;
    double sum = 0.0;
    for (auto row : q.term_rows) {
        auto c = cosine(row, centroid);
        if (!c) return std::nullopt;  // zero-norm term vector or centroid
        sum += *c;
    }
    return sum / static_cast<double>(q.term_rows.size());
}

void check_variant(const CentroidIndex& index, SpacePair variant) {
    if (second_space(variant) != index.space)
        throw std::invalid_argument("variant " + to_string(variant) +
                                    " needs a document index in space " +
                                    to_string(second_space(variant)) + ", index is " +
                                    to_string(index.space));
}

}  // namespace

std::optional<double> desm_score(const std::vector<std::string>& query_tokens,
                                 std::string_view doc_id, const CentroidIndex& index,
                                 const DualEmbedding& emb, SpacePair variant) {
    check_variant(index, variant);
    if (!index.contains(doc_id))
        throw std::invalid_argument("unknown doc id: " + std::string(doc_id));
    auto centroid = index.centroid_of(doc_id);
    if (!centroid) return std::nullopt;  // skipped doc
    return score_against_centroid(query_vectors(query_tokens, emb, variant), *centroid);
}

ScoredList desm_rank(std::string query_id, const std::vector<std::string>& query_tokens,
                     const std::vector<std::string>& candidates, const CentroidIndex& index,
                     const DualEmbedding& emb, SpacePair variant) {
    check_variant(index, variant);
    QueryVectors q = query_vectors(query_tokens, emb, variant);
    std::vector<ScoredEntry> entries;
    entries.reserve(candidates.size());
    for (const auto& doc_id : candidates) {
        if (!index.contains(doc_id))
            throw std::invalid_argument("unknown doc id: " + doc_id);
        auto centroid = index.centroid_of(doc_id);
        std::optional<double> score;
        if (centroid) score = score_against_centroid(q, *centroid);
        entries.push_back({doc_id, score});
    }
    return make_scored_list(std::move(query_id), std::move(entries));
}

namespace {

constexpr char kMagic[8] = {'D', 'E', 'S', 'M', 'C', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& is, T& v, const std::string& path) {
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw std::runtime_error("truncated centroid index: " + path);
}

void write_string(std::ofstream& os, const std::string& s) {
    write_pod(os, static_cast<std::uint64_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& is, const std::string& path) {
    std::uint64_t n = 0;
    read_pod(is, n, path);
    std::string s(n, '\0');
    if (n && !is.read(s.data(), static_cast<std::streamsize>(n)))
        throw std::runtime_error("truncated centroid index: " + path);
    return s;
}

}  // namespace

void save_centroid_index(const CentroidIndex& index, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write centroid index: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint8_t>(index.space == Space::in ? 0 : 1));
    write_pod(os, static_cast<std::uint64_t>(index.dim));
    write_pod(os, static_cast<std::uint64_t>(index.doc_ids.size()));
    write_pod(os, static_cast<std::uint64_t>(index.skipped_docs.size()));
    for (const auto& id : index.doc_ids) write_string(os, id);
    for (const auto& id : index.skipped_docs) write_string(os, id);
    const auto& data = index.centroids.data();
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

CentroidIndex load_centroid_index(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open centroid index: " + path);
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a centroid index file: " + path);
    std::uint32_t version = 0;
    read_pod(is, version, path);
    if (version != kVersion)
        throw std::runtime_error("unsupported centroid index version in " + path);
    std::uint8_t space_tag = 0;
    read_pod(is, space_tag, path);
    std::uint64_t dim = 0, ndocs = 0, nskipped = 0;
    read_pod(is, dim, path);
    read_pod(is, ndocs, path);
    read_pod(is, nskipped, path);

    CentroidIndex index;
    index.space = space_tag == 0 ? Space::in : Space::out;
    index.dim = dim;
    index.doc_ids.reserve(ndocs);
    for (std::uint64_t i = 0; i < ndocs; ++i) {
        index.doc_ids.push_back(read_string(is, path));
        index.row_of.emplace(index.doc_ids.back(), static_cast<int>(i));
    }
    for (std::uint64_t i = 0; i < nskipped; ++i) {
        index.skipped_docs.push_back(read_string(is, path));
        index.skipped_set.emplace(index.skipped_docs.back(), 1);
    }
    index.centroids = RowMatrix(ndocs, dim);
    auto& data = index.centroids.data();
    if (!data.empty() &&
        !is.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double))))
        throw std::runtime_error("truncated centroid index: " + path);
    return index;
}

}  // namespace desm
