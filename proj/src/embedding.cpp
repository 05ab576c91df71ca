#include "desm/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace desm {

Space first_space(SpacePair p) {
    return (p == SpacePair::in_in || p == SpacePair::in_out) ? Space::in : Space::out;
}

Space second_space(SpacePair p) {
    return (p == SpacePair::in_in || p == SpacePair::out_in) ? Space::in : Space::out;
}

std::string to_string(Space s) { return s == Space::in ? "in" : "out"; }

std::string to_string(SpacePair p) {
    return to_string(first_space(p)) + "-" + to_string(second_space(p));
}

Space parse_space(std::string_view s) {
    if (s == "in") return Space::in;
    if (s == "out") return Space::out;
    throw std::invalid_argument("unknown embedding space: " + std::string(s));
}

SpacePair parse_space_pair(std::string_view s) {
    if (s == "in-in") return SpacePair::in_in;
    if (s == "in-out") return SpacePair::in_out;
    if (s == "out-out") return SpacePair::out_out;
    if (s == "out-in") return SpacePair::out_in;
    throw std::invalid_argument("unknown space pair: " + std::string(s));
}

std::optional<double> cosine(std::span<const double> u, std::span<const double> v) {
    double nu = l2_norm(u);
    double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) return std::nullopt;
    double c = dot(u, v) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

std::vector<Neighbor> nearest_neighbors(const DualEmbedding& emb, std::string_view word,
                                        SpacePair pair, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    int word_id = emb.vocab.id_of(word);
    if (word_id < 0)
        throw std::invalid_argument("word not in vocabulary: " + std::string(word));

    auto query = emb.matrix(first_space(pair)).row(static_cast<std::size_t>(word_id));
    const RowMatrix& target = emb.matrix(second_space(pair));

    std::vector<Neighbor> scored;
    scored.reserve(target.rows());
    for (std::size_t id = 0; id < target.rows(); ++id) {
        auto sim = cosine(query, target.row(id));
        if (sim) scored.push_back({static_cast<int>(id), std::string(), *sim});
    }
    auto better = [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.id < b.id;
    };
    auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(kk),
                      scored.end(), better);
    scored.resize(kk);
    for (auto& n : scored) n.term = emb.vocab.term(n.id);
    return scored;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void save_matrix(const Vocabulary& vocab, const RowMatrix& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write embedding file: " + path);
    std::string line;
    line += std::to_string(m.rows());
    line += ' ';
    line += std::to_string(m.cols());
    line += '\n';
    os << line;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        line.clear();
        line += vocab.term(static_cast<int>(i));
        for (double v : m.row(i)) {
            line += ' ';
            append_double(line, v);
        }
        line += '\n';
        os << line;
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

struct LoadedMatrix {
    std::vector<std::string> terms;
    RowMatrix values;
};

LoadedMatrix load_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open embedding file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty embedding file: " + path);
    std::size_t rows = 0, cols = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> rows >> cols) || cols == 0 || (hs >> extra))
            throw std::runtime_error("malformed embedding header in " + path + ": '" + line + "'");
    }

    LoadedMatrix out;
    out.terms.reserve(rows);
    out.values = RowMatrix(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(is, line))
            throw std::runtime_error(path + ": expected " + std::to_string(rows) +
                                     " rows, found " + std::to_string(i));
        const char* p = line.data();
        const char* end = line.data() + line.size();
        const char* tok_end = p;
        while (tok_end < end && *tok_end != ' ' && *tok_end != '\t') ++tok_end;
        if (tok_end == p)
            throw std::runtime_error(path + ": missing token on row " + std::to_string(i));
        out.terms.emplace_back(p, tok_end);
        p = tok_end;
        auto row = out.values.row(i);
        for (std::size_t j = 0; j < cols; ++j) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            auto res = std::from_chars(p, end, row[j]);
            if (res.ec != std::errc())
                throw std::runtime_error(path + ": bad value at row " + std::to_string(i) +
                                         " column " + std::to_string(j));
            p = res.ptr;
        }
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p != end)
            throw std::runtime_error(path + ": row " + std::to_string(i) + " has more than " +
                                     std::to_string(cols) + " values");
    }
    return out;
}

}  // namespace

void save_embedding(const DualEmbedding& emb, const std::string& path_prefix) {
    save_matrix(emb.vocab, emb.w_in, path_prefix + ".in.vec");
    save_matrix(emb.vocab, emb.w_out, path_prefix + ".out.vec");
}

DualEmbedding load_embedding(const std::string& in_path, const std::string& out_path) {
    LoadedMatrix in = load_matrix(in_path);
    LoadedMatrix out = load_matrix(out_path);
    if (in.values.rows() != out.values.rows() || in.values.cols() != out.values.cols())
        throw std::runtime_error("embedding files disagree on shape: " + in_path + " vs " +
                                 out_path);
    if (in.terms != out.terms)
        throw std::runtime_error("embedding files disagree on vocabulary order: " + in_path +
                                 " vs " + out_path);
    DualEmbedding emb;
    emb.vocab = Vocabulary::from_terms(std::move(in.terms));
    emb.w_in = std::move(in.values);
    emb.w_out = std::move(out.values);
    return emb;
}

}  // namespace desm
