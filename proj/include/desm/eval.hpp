#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "desm/run.hpp"

namespace desm {

/// Graded relevance labels per (query, document). Grades are small
/// non-negative integers; 0..4 for the editorial five-point scale, {0,1} for
/// click-based judgments.
class Judgments {
public:
    /// Throws std::invalid_argument on duplicate (query, doc) pairs or
    /// negative grades.
    void add(const std::string& query_id, const std::string& doc_id, int grade);

    const std::unordered_map<std::string, int>* for_query(const std::string& query_id) const;
    bool has_query(const std::string& query_id) const { return by_query_.count(query_id) > 0; }
    std::optional<int> grade(const std::string& query_id, const std::string& doc_id) const;
    std::size_t query_count() const { return by_query_.size(); }

    /// Query ids in first-seen order.
    const std::vector<std::string>& query_order() const { return query_order_; }

private:
    std::unordered_map<std::string, std::unordered_map<std::string, int>> by_query_;
    std::vector<std::string> query_order_;
};

/// Whitespace-separated "qid 0 docid grade" lines.
Judgments read_qrels(const std::string& path);
void write_qrels(const std::string& path, const Judgments& judgments);

/// NDCG@k with exponential gain (2^grade - 1) and log2(rank + 1) discount.
/// The ideal DCG ranks ALL judged documents of the query by descending grade,
/// so a ranking that fails to retrieve judged-relevant documents is
/// penalized. Unjudged documents count as grade 0. A query whose judged
/// grades are all zero has NDCG 0 by definition.
double ndcg_at_k(std::span<const std::string> ranked_docs,
                 const std::unordered_map<std::string, int>& grades, int k);

struct QueryMetrics {
    std::string query_id;
    std::map<int, double> ndcg;  // cutoff -> value in [0, 1]
};

struct EvalReport {
    std::vector<int> cutoffs;
    std::vector<QueryMetrics> per_query;          // run order, judged queries only
    std::map<int, double> mean_ndcg;              // cutoff -> mean in [0, 1]
    int skipped_unjudged_queries = 0;
    std::map<int, double> p_value_vs_baseline;    // present when compared
    std::string tag;
};

/// Per-query and mean NDCG at each cutoff. Queries absent from the judgments
/// are skipped and counted. Throws on an empty run.
EvalReport evaluate_run(const RunFile& run, const Judgments& judgments,
                        const std::vector<int>& cutoffs = {1, 3, 10});

/// Two-sided paired t-test p-value over per-query differences. Degenerate
/// cases: all differences zero -> 1; zero variance with nonzero mean -> 0.
/// Requires n >= 2 paired observations.
double paired_significance(std::span<const double> metric_a, std::span<const double> metric_b);

/// Attaches p-values (report vs baseline, per cutoff, over the queries
/// evaluated in both) to `report`.
void compare_to_baseline(EvalReport& report, const EvalReport& baseline);

enum class CandidateMode { telescoped, full };
CandidateMode parse_candidate_mode(std::string_view s);

/// telescoped: each query's candidates are exactly its judged documents.
/// full: every query gets all document ids, identically.
/// Candidate lists are in ascending doc-id order.
std::unordered_map<std::string, std::vector<std::string>> make_candidate_sets(
    CandidateMode mode, const Judgments& judgments, const std::vector<std::string>& all_doc_ids);

/// Aligned text table (values x100, two decimals, '*' marking p < 0.05
/// against the baseline) followed by machine-readable key=value lines.
std::string format_report(const EvalReport& report, const EvalReport* baseline = nullptr);

}  // namespace desm
