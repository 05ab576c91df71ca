#include "desm/mixture.hpp"

#include <cmath>
#include <stdexcept>

namespace desm {

void MixtureConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
    bm25.validate();
}

std::optional<double> mm_score(double alpha, std::optional<double> desm, double bm25) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
    if (!desm) {
        if (alpha == 1.0) return std::nullopt;
        return (1.0 - alpha) * bm25;
    }
    return alpha * *desm + (1.0 - alpha) * bm25;
}

ScoredList mixture_rank(const QueryCandidateScores& scores, double alpha) {
    if (scores.doc_ids.size() != scores.desm.size() ||
        scores.doc_ids.size() != scores.bm25.size())
        throw std::invalid_argument("component score arrays out of step");
    std::vector<ScoredEntry> entries;
    entries.reserve(scores.doc_ids.size());
    for (std::size_t i = 0; i < scores.doc_ids.size(); ++i) {
        entries.push_back({scores.doc_ids[i], mm_score(alpha, scores.desm[i], scores.bm25[i])});
    }
    return make_scored_list(scores.query_id, std::move(entries));
}

SweepResult sweep_alpha(const std::vector<QueryCandidateScores>& training_scores,
                        const Judgments& judgments, double step, int ndcg_k) {
    if (training_scores.empty()) throw std::invalid_argument("empty training set");
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("step must be in (0, 1]");
    if (ndcg_k < 1) throw std::invalid_argument("ndcg cutoff must be >= 1");

    std::vector<const QueryCandidateScores*> judged;
    for (const auto& q : training_scores) {
        if (judgments.has_query(q.query_id)) judged.push_back(&q);
    }
    if (judged.empty()) throw std::runtime_error("no judged query in the training set");

    SweepResult result;
    result.step = step;
    const auto points = static_cast<int>(std::llround(1.0 / step));
    std::vector<std::string> ranked;
    for (int i = 0; i <= points; ++i) {
        const double alpha = std::min(1.0, static_cast<double>(i) * step);
        double sum = 0.0;
        for (const auto* q : judged) {
            ScoredList list = mixture_rank(*q, alpha);
            ranked.clear();
            for (const auto& e : list.entries) ranked.push_back(e.doc_id);
            sum += ndcg_at_k(ranked, *judgments.for_query(q->query_id), ndcg_k);
        }
        const double mean = sum / static_cast<double>(judged.size());
        result.grid_alpha.push_back(alpha);
        result.grid_mean_ndcg.push_back(mean);
        if (i == 0 || mean > result.best_mean_ndcg) {
            result.best_mean_ndcg = mean;
            result.best_alpha = alpha;
        }
    }
    return result;
}

}  // namespace desm
