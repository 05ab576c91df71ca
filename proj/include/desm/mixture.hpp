#pragma once

#include <optional>
#include <string>
#include <vector>

#include "desm/embedding.hpp"
#include "desm/eval.hpp"
#include "desm/lexical.hpp"
#include "desm/run.hpp"

namespace desm {

struct MixtureConfig {
    double alpha = 0.5;
    SpacePair desm_variant = SpacePair::in_out;
    Bm25Config bm25;

    void validate() const;  // 0 <= alpha <= 1
};

/// Linear blend of the raw component scores:
///   alpha * DESM + (1 - alpha) * BM25
/// With an undefined DESM component the blend falls back to its BM25 term
/// alone when alpha < 1, and is undefined at alpha = 1. Throws when alpha is
/// outside [0, 1].
std::optional<double> mm_score(double alpha, std::optional<double> desm, double bm25);

/// Precomputed component scores for one query's candidate set; lets the
/// alpha sweep re-rank 101 grid points without rescoring.
struct QueryCandidateScores {
    std::string query_id;
    std::vector<std::string> doc_ids;
    std::vector<std::optional<double>> desm;  // parallel to doc_ids
    std::vector<double> bm25;                 // parallel to doc_ids
};

ScoredList mixture_rank(const QueryCandidateScores& scores, double alpha);

struct SweepResult {
    double best_alpha = 0.0;
    double best_mean_ndcg = 0.0;
    double step = 0.01;
    std::vector<double> grid_alpha;
    std::vector<double> grid_mean_ndcg;  // parallel to grid_alpha
};

/// Evaluates mean NDCG@k over the training queries at alpha = 0, step,
/// 2*step, ..., 1 and returns the maximizer; ties go to the smaller alpha.
/// Queries without judgments are skipped; throws when none remain.
SweepResult sweep_alpha(const std::vector<QueryCandidateScores>& training_scores,
                        const Judgments& judgments, double step = 0.01, int ndcg_k = 10);

}  // namespace desm
