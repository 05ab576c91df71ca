#include "desm/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "desm/desm.hpp"
#include "desm/tokenize.hpp"

namespace desm {

namespace {

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "undefined"; }

}  // namespace

std::vector<PerturbationRow> perturbation_report(
    const std::vector<std::pair<std::string, std::string>>& labeled_passages,
    const std::string& query_term, const DualEmbedding& emb) {
    if (!emb.vocab.contains(query_term))
        throw std::invalid_argument("query term not in vocabulary: " + query_term);

    const std::vector<std::string> query{query_term};
    std::vector<PerturbationRow> rows;
    rows.reserve(labeled_passages.size());
    for (const auto& [label, text] : labeled_passages) {
        PerturbationRow row;
        row.label = label;
        auto tokens = tokenize(text);
        for (const auto& t : tokens) {
            if (t == query_term) ++row.term_frequency;
        }
        auto centroid_out = document_centroid(tokens, emb, Space::out);
        auto centroid_in = document_centroid(tokens, emb, Space::in);
        int qid = emb.vocab.id_of(query_term);
        auto q_in = emb.w_in.row(static_cast<std::size_t>(qid));
        if (centroid_out) row.desm_in_out = cosine(q_in, *centroid_out);
        if (centroid_in) row.desm_in_in = cosine(q_in, *centroid_in);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string perturbation_tsv(const std::vector<PerturbationRow>& rows) {
    std::string out = "passage\tdesm_in_out\tdesm_in_in\tterm_frequency\n";
    for (const auto& r : rows) {
        out += r.label + '\t' + opt_num(r.desm_in_out) + '\t' + opt_num(r.desm_in_in) + '\t' +
               std::to_string(r.term_frequency) + '\n';
    }
    return out;
}

ProjectionExport project_2d(const std::vector<ProjectionGroup>& groups) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> points;
    std::size_t dim = 0;
    for (const auto& g : groups) {
        if (dim == 0) dim = g.query_vec.size();
        if (g.query_vec.size() != dim)
            throw std::invalid_argument("projection vectors differ in dimension");
        labels.push_back(g.query_label);
        points.emplace_back(dim, 0.0);  // the query maps to the origin
        for (const auto& [label, vec] : g.docs) {
            if (vec.size() != dim)
                throw std::invalid_argument("projection vectors differ in dimension");
            std::vector<double> diff(dim);
            for (std::size_t j = 0; j < dim; ++j) diff[j] = vec[j] - g.query_vec[j];
            labels.push_back(label);
            points.push_back(std::move(diff));
        }
    }
    const std::size_t n = points.size();
    if (n < 3) throw std::invalid_argument("projection needs at least 3 points");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points[i][j];
    }
    Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    // eigenvalues come out ascending; take the last two
    const auto last = static_cast<Eigen::Index>(dim) - 1;
    Eigen::VectorXd e1 = eig.eigenvectors().col(last);
    const double v1 = std::max(0.0, eig.eigenvalues()(last));
    double v2 = 0.0;
    Eigen::VectorXd e2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    if (dim >= 2) {
        e2 = eig.eigenvectors().col(last - 1);
        v2 = std::max(0.0, eig.eigenvalues()(last - 1));
    }

    // Fix the sign ambiguity so exports are reproducible: make the largest
    // absolute coefficient positive.
    auto canonicalize = [](Eigen::VectorXd& e) {
        Eigen::Index arg = 0;
        e.cwiseAbs().maxCoeff(&arg);
        if (e(arg) < 0.0) e = -e;
    };
    canonicalize(e1);
    canonicalize(e2);

    ProjectionExport out;
    const double var_tol = 1e-12 * std::max(1.0, v1);
    out.degenerate_second_axis = v2 <= var_tol;
    out.variance_1 = v1;
    out.variance_2 = out.degenerate_second_axis ? 0.0 : v2;
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ProjectedPoint p;
        p.label = labels[i];
        p.x = x.row(static_cast<Eigen::Index>(i)).dot(e1);
        p.y = out.degenerate_second_axis ? 0.0 : x.row(static_cast<Eigen::Index>(i)).dot(e2);
        out.points.push_back(std::move(p));
    }
    return out;
}

std::string projection_tsv(const ProjectionExport& projection) {
    std::string out = "label\tx\ty\n";
    for (const auto& p : projection.points) {
        out += p.label + '\t' + num(p.x) + '\t' + num(p.y) + '\n';
    }
    return out;
}

FeatureDistributions score_distributions(
    const std::string& feature,
    const std::vector<std::pair<std::string, std::vector<double>>>& class_scores, int bins) {
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");

    FeatureDistributions out;
    out.feature = feature;
    out.bins = bins;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& [name, scores] : class_scores) {
        for (double s : scores) {
            if (!any) {
                lo = hi = s;
                any = true;
            } else {
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
        }
    }
    out.lo = lo;
    out.hi = hi;
    const double width = hi > lo ? (hi - lo) / bins : 1.0;

    for (const auto& [name, scores] : class_scores) {
        ClassHistogram h;
        h.class_name = name;
        h.n = static_cast<std::int64_t>(scores.size());
        h.empty_class = scores.empty();
        if (!scores.empty()) {
            h.bin_counts.assign(static_cast<std::size_t>(bins), 0);
            double sum = 0.0;
            for (double s : scores) {
                auto bin = static_cast<std::int64_t>((s - lo) / width);
                bin = std::clamp<std::int64_t>(bin, 0, bins - 1);
                ++h.bin_counts[static_cast<std::size_t>(bin)];
                sum += s;
            }
            h.mean = sum / static_cast<double>(scores.size());
            double ss = 0.0;
            for (double s : scores) ss += (s - h.mean) * (s - h.mean);
            h.variance = ss / static_cast<double>(scores.size());
        }
        out.classes.push_back(std::move(h));
    }
    return out;
}

ClassifiedScores classify_run_scores(const RunFile& run, const Judgments& judgments,
                                     int relevance_threshold) {
    ClassifiedScores out;
    for (std::size_t q = 0; q < run.query_order.size(); ++q) {
        const auto& qid = run.query_order[q];
        for (const auto& e : run.rankings[q]) {
            auto g = judgments.grade(qid, e.doc_id);
            if (!g) {
                out.random_irrelevant.push_back(e.score);
            } else if (*g >= relevance_threshold) {
                out.relevant.push_back(e.score);
            } else {
                out.judged_irrelevant.push_back(e.score);
            }
        }
    }
    return out;
}

std::string distributions_tsv(const std::vector<FeatureDistributions>& features) {
    std::string out = "feature\tclass\tn\tmean\tvariance\tbin_lo\tbin_hi\tcount\n";
    for (const auto& f : features) {
        const double width = f.hi > f.lo ? (f.hi - f.lo) / f.bins : 1.0;
        for (const auto& c : f.classes) {
            if (c.bin_counts.empty()) continue;
            for (int b = 0; b < f.bins; ++b) {
                out += f.feature + '\t' + c.class_name + '\t' + std::to_string(c.n) + '\t' +
                       num(c.mean) + '\t' + num(c.variance) + '\t' + num(f.lo + b * width) +
                       '\t' + num(f.lo + (b + 1) * width) + '\t' +
                       std::to_string(c.bin_counts[static_cast<std::size_t>(b)]) + '\n';
            }
        }
    }
    return out;
}

}  // namespace desm
