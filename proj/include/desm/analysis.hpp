#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "desm/embedding.hpp"
#include "desm/eval.hpp"
#include "desm/run.hpp"

namespace desm {

/// One labeled passage scored for a single-term query: DESM scores in both
/// primary variants plus the exact term-frequency count of the query term in
/// the tokenized passage. Scores are empty for passages with no in-vocabulary
/// token.
struct PerturbationRow {
    std::string label;
    std::optional<double> desm_in_out;
    std::optional<double> desm_in_in;
    std::int64_t term_frequency = 0;
};

/// Scores each (label, raw text) passage against the query term. Throws
/// std::invalid_argument when the query term is out of vocabulary.
std::vector<PerturbationRow> perturbation_report(
    const std::vector<std::pair<std::string, std::string>>& labeled_passages,
    const std::string& query_term, const DualEmbedding& emb);

std::string perturbation_tsv(const std::vector<PerturbationRow>& rows);

/// Inputs for the 2-D projection: one group per query. Each document becomes
/// the difference vector (doc vector - query vector) so that every query sits
/// at the origin before projection.
struct ProjectionGroup {
    std::string query_label;
    std::vector<double> query_vec;
    std::vector<std::pair<std::string, std::vector<double>>> docs;  // (label, vector)
};

struct ProjectedPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

struct ProjectionExport {
    std::vector<ProjectedPoint> points;   // queries first (at origin pre-centering), then docs
    double variance_1 = 0.0;              // captured variance of each component
    double variance_2 = 0.0;
    bool degenerate_second_axis = false;  // second coordinate padded with 0
};

/// Mean-centers the point set (query origins plus difference vectors) and
/// projects onto the top-2 principal components. Requires at least 3 points
/// of a common dimension. With fewer than 2 nonzero-variance directions the
/// second coordinate is 0 and the degenerate flag is set.
ProjectionExport project_2d(const std::vector<ProjectionGroup>& groups);

std::string projection_tsv(const ProjectionExport& projection);

/// Per-class score histograms for one scoring feature over a common bin grid.
struct ClassHistogram {
    std::string class_name;
    std::vector<std::int64_t> bin_counts;
    std::int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // population variance; 0 for n < 2
    bool empty_class = false;
};

struct FeatureDistributions {
    std::string feature;
    double lo = 0.0;   // common bin range over all classes
    double hi = 0.0;
    int bins = 0;
    std::vector<ClassHistogram> classes;
};

FeatureDistributions score_distributions(
    const std::string& feature,
    const std::vector<std::pair<std::string, std::vector<double>>>& class_scores, int bins);

/// Splits a run's scores into the three standard classes: judged with grade
/// >= threshold, judged below threshold, and unjudged documents appearing in
/// the run (the random-irrelevant pool under full-collection candidates).
struct ClassifiedScores {
    std::vector<double> relevant;
    std::vector<double> judged_irrelevant;
    std::vector<double> random_irrelevant;
};
ClassifiedScores classify_run_scores(const RunFile& run, const Judgments& judgments,
                                     int relevance_threshold);

std::string distributions_tsv(const std::vector<FeatureDistributions>& features);

}  // namespace desm
