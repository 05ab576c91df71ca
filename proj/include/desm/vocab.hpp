#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace desm {

class RecordSource;

/// Fixed vocabulary shared by training, scoring and indexing. Ids are dense
/// 0..V-1, assigned in descending corpus frequency with lexicographic
/// tie-break, which keeps ids (and therefore embedding files) stable across
/// runs over the same corpus. Immutable after construction.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Builds from raw term frequencies, keeping terms with count >= min_count.
    static Vocabulary from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                  std::int64_t min_count);

    /// Wraps an externally given term order (e.g. an embedding file). Counts
    /// are unknown and set to zero.
    static Vocabulary from_terms(std::vector<std::string> terms);

    int id_of(std::string_view term) const;  // -1 when absent
    bool contains(std::string_view term) const { return id_of(term) >= 0; }
    const std::string& term(int id) const { return terms_[static_cast<std::size_t>(id)]; }
    std::int64_t count(int id) const { return counts_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(terms_.size()); }
    bool empty() const { return terms_.empty(); }

    /// Sum of the retained terms' corpus frequencies.
    std::int64_t total_tokens() const { return total_tokens_; }

    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

private:
    std::vector<std::string> terms_;
    std::vector<std::int64_t> counts_;
    std::unordered_map<std::string, int> id_of_;
    std::int64_t total_tokens_ = 0;
};

struct Encoded {
    std::vector<int> ids;  // in-vocabulary tokens, order preserved
    std::int64_t oov_count = 0;
};

/// Maps tokens to vocabulary ids. Out-of-vocabulary tokens are dropped from
/// `ids` and counted in `oov_count`.
Encoded encode(const std::vector<std::string>& tokens, const Vocabulary& vocab);

/// Inverse of encode over the in-vocabulary subsequence.
std::vector<std::string> decode(const std::vector<int>& ids, const Vocabulary& vocab);

/// Single pass over the record stream; counts every token and keeps those
/// reaching min_count. min_count must be >= 1.
Vocabulary build_vocabulary(RecordSource& records, std::int64_t min_count);
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& records,
                            std::int64_t min_count);

}  // namespace desm
