#pragma once

#include <optional>
#include <string>
#include <vector>

namespace desm {

/// Score written to run files for documents whose score is undefined (all-OOV
/// content or queries). Below any defined DESM/LSA/mixture value, so the
/// non-increasing-score invariant of run files is preserved.
inline constexpr double kUndefinedRunScore = -2.0;

struct ScoredEntry {
    std::string doc_id;
    std::optional<double> score;  // empty = undefined, ranked after every defined score
};

/// Ranked candidates for one query: defined scores in descending order with
/// ties broken by ascending doc id, then undefined documents in ascending doc
/// id order. No duplicate doc ids.
struct ScoredList {
    std::string query_id;
    std::vector<ScoredEntry> entries;
};

/// Sorts entries into the ScoredList order and validates uniqueness.
/// Throws std::invalid_argument on duplicate doc ids.
ScoredList make_scored_list(std::string query_id, std::vector<ScoredEntry> entries);

/// "qid Q0 docid rank score tag" per line, queries in the given order.
struct RunEntry {
    std::string doc_id;
    int rank;
    double score;
};

struct RunFile {
    std::vector<std::string> query_order;
    std::vector<std::vector<RunEntry>> rankings;  // parallel to query_order
    std::string tag;

    const std::vector<RunEntry>* find(const std::string& query_id) const;
};

RunFile to_run_file(const std::vector<ScoredList>& lists, std::string tag);
void write_run_file(const std::string& path, const RunFile& run);
RunFile read_run_file(const std::string& path);

}  // namespace desm
