#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "desm/matrix.hpp"
#include "desm/vocab.hpp"

namespace desm {

enum class Space { in, out };

/// Which embedding space the query-side and the document-side vectors come
/// from. The first space maps query words, the second maps document words.
enum class SpacePair { in_in, out_out, in_out, out_in };

Space first_space(SpacePair p);
Space second_space(SpacePair p);
std::string to_string(Space s);
std::string to_string(SpacePair p);
Space parse_space(std::string_view s);          // "in" | "out", throws otherwise
SpacePair parse_space_pair(std::string_view s);  // "in-in" | "in-out" | ..., throws otherwise

/// The two weight matrices of a trained CBOW model over a shared vocabulary.
/// Row i of each matrix is the vector of vocabulary id i. Word2vec-style
/// tooling usually keeps only the input matrix; both are first-class here.
struct DualEmbedding {
    Vocabulary vocab;
    RowMatrix w_in;
    RowMatrix w_out;

    std::size_t dim() const { return w_in.cols(); }
    const RowMatrix& matrix(Space s) const { return s == Space::in ? w_in : w_out; }
    RowMatrix& matrix(Space s) { return s == Space::in ? w_in : w_out; }
};

/// Cosine similarity clamped to [-1, 1]. A zero-norm operand has no defined
/// similarity, so the result is empty rather than 0; callers must not rank
/// such pairs as if they scored zero.
std::optional<double> cosine(std::span<const double> u, std::span<const double> v);

struct Neighbor {
    int id;
    std::string term;
    double similarity;
};

/// Top-k vocabulary words by cosine between `word`'s vector in the pair's
/// first space and every word's vector in the pair's second space. Descending
/// similarity, ties broken by ascending vocabulary id. The query word itself
/// participates like any other word. Words whose second-space vector has zero
/// norm have undefined similarity and are left out. Throws std::invalid_argument
/// naming the token when `word` is out of vocabulary.
std::vector<Neighbor> nearest_neighbors(const DualEmbedding& emb, std::string_view word,
                                        SpacePair pair, int k);

/// Writes `<prefix>.in.vec` and `<prefix>.out.vec` in word2vec text format:
/// header "V d", then one "token v1 ... vd" line per vocabulary id. Values
/// use the shortest decimal form that round-trips the binary double, so
/// load(save(e)) reproduces the matrices exactly.
void save_embedding(const DualEmbedding& emb, const std::string& path_prefix);

/// Loads a dual embedding from two single-space files. The files must agree
/// on the header and list the same words in the same order.
DualEmbedding load_embedding(const std::string& in_path, const std::string& out_path);

}  // namespace desm
