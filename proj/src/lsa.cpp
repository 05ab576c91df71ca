#include "desm/lsa.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace desm {

int LsaModel::term_index(std::string_view term) const {
    auto it = term_row.find(std::string(term));
    return it == term_row.end() ? -1 : it->second;
}

int LsaModel::doc_index(std::string_view doc_id) const {
    auto it = doc_row.find(std::string(doc_id));
    return it == doc_row.end() ? -1 : it->second;
}

LsaModel lsa_train(const LexicalIndex& index, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const auto n_terms = static_cast<Eigen::Index>(index.term_count());
    const auto n_docs = static_cast<Eigen::Index>(index.doc_count());

    LsaModel model;
    model.doc_ids = index.doc_ids();
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d)
        model.doc_row.emplace(model.doc_ids[d], static_cast<int>(d));
    model.terms = index.terms();
    for (std::size_t t = 0; t < model.terms.size(); ++t)
        model.term_row.emplace(model.terms[t], static_cast<int>(t));

    model.idf.resize(static_cast<std::size_t>(n_terms));
    const auto n = static_cast<double>(index.doc_count());
    for (Eigen::Index t = 0; t < n_terms; ++t) {
        auto df = static_cast<double>(index.document_frequency(static_cast<int>(t)));
        model.idf[static_cast<std::size_t>(t)] = std::log(n / df);
    }

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_terms, n_docs);
    for (Eigen::Index d = 0; d < n_docs; ++d) {
        for (const auto& [tid, tf] : index.doc_terms(static_cast<int>(d))) {
            a(tid, d) = static_cast<double>(tf) * model.idf[static_cast<std::size_t>(tid)];
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = sv.size() ? sv(0) * std::numeric_limits<double>::epsilon() *
                                       static_cast<double>(std::max(n_terms, n_docs))
                                 : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    if (k > rank) {
        model.rank_reduced = true;
        k = rank;
    }
    model.k = k;

    const auto kk = static_cast<Eigen::Index>(k);
    model.singular_values.assign(sv.data(), sv.data() + kk);
    model.term_projection = RowMatrix(static_cast<std::size_t>(n_terms), k);
    for (Eigen::Index t = 0; t < n_terms; ++t) {
        auto row = model.term_projection.row(static_cast<std::size_t>(t));
        for (Eigen::Index i = 0; i < kk; ++i) row[static_cast<std::size_t>(i)] = svd.matrixU()(t, i);
    }
    model.doc_latent = RowMatrix(static_cast<std::size_t>(n_docs), k);
    for (Eigen::Index d = 0; d < n_docs; ++d) {
        auto row = model.doc_latent.row(static_cast<std::size_t>(d));
        for (Eigen::Index i = 0; i < kk; ++i)
            row[static_cast<std::size_t>(i)] = sv(i) * svd.matrixV()(d, i);
    }
    return model;
}

std::optional<double> lsa_score(const std::vector<std::string>& query_tokens,
                                std::string_view doc_id, const LsaModel& model) {
    int doc = model.doc_index(doc_id);
    if (doc < 0) throw std::invalid_argument("unknown doc id: " + std::string(doc_id));
    if (model.k == 0) return std::nullopt;

    // TF-IDF weighted query counts over the collection dictionary.
    std::unordered_map<int, double> q_tf;
    for (const auto& term : query_tokens) {
        int t = model.term_index(term);
        if (t >= 0) q_tf[t] += 1.0;
    }
    if (q_tf.empty()) return std::nullopt;

    std::vector<double> folded(model.k, 0.0);
    for (const auto& [t, tf] : q_tf) {
        const double w = tf * model.idf[static_cast<std::size_t>(t)];
        if (w == 0.0) continue;
        auto row = model.term_projection.row(static_cast<std::size_t>(t));
        for (std::size_t i = 0; i < model.k; ++i) folded[i] += w * row[i];
    }
    for (std::size_t i = 0; i < model.k; ++i) folded[i] /= model.singular_values[i];

    return cosine(folded, model.doc_latent.row(static_cast<std::size_t>(doc)));
}

ScoredList lsa_rank(std::string query_id, const std::vector<std::string>& query_tokens,
                    const std::vector<std::string>& candidates, const LsaModel& model) {
    std::vector<ScoredEntry> entries;
    entries.reserve(candidates.size());
    for (const auto& doc_id : candidates) {
        entries.push_back({doc_id, lsa_score(query_tokens, doc_id, model)});
    }
    return make_scored_list(std::move(query_id), std::move(entries));
}

}  // namespace desm
