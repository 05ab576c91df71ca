#include "desm/vocab.hpp"

#include <algorithm>
#include <stdexcept>

#include "desm/corpus_io.hpp"

namespace desm {

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                   std::int64_t min_count) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    std::vector<std::pair<std::string, std::int64_t>> kept;
    kept.reserve(counts.size());
    for (const auto& [term, count] : counts) {
        if (count >= min_count) kept.emplace_back(term, count);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.terms_.reserve(kept.size());
    v.counts_.reserve(kept.size());
    for (auto& [term, count] : kept) {
        v.id_of_.emplace(term, static_cast<int>(v.terms_.size()));
        v.terms_.push_back(std::move(term));
        v.counts_.push_back(count);
        v.total_tokens_ += count;
    }
    return v;
}

Vocabulary Vocabulary::from_terms(std::vector<std::string> terms) {
    Vocabulary v;
    v.counts_.assign(terms.size(), 0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        auto [it, inserted] = v.id_of_.emplace(terms[i], static_cast<int>(i));
        if (!inserted) throw std::invalid_argument("duplicate term in vocabulary: " + terms[i]);
    }
    v.terms_ = std::move(terms);
    return v;
}

int Vocabulary::id_of(std::string_view term) const {
    // Transparent lookup is not available pre-C++20 hash heterogeneity setup;
    // the temporary string is acceptable at this call rate.
    auto it = id_of_.find(std::string(term));
    return it == id_of_.end() ? -1 : it->second;
}

Encoded encode(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    Encoded e;
    e.ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        int id = vocab.id_of(t);
        if (id >= 0) {
            e.ids.push_back(id);
        } else {
            ++e.oov_count;
        }
    }
    return e;
}

std::vector<std::string> decode(const std::vector<int>& ids, const Vocabulary& vocab) {
    std::vector<std::string> tokens;
    tokens.reserve(ids.size());
    for (int id : ids) tokens.push_back(vocab.term(id));
    return tokens;
}

Vocabulary build_vocabulary(RecordSource& records, std::int64_t min_count) {
    std::unordered_map<std::string, std::int64_t> counts;
    std::vector<std::string> tokens;
    records.reset();
    while (records.next(tokens)) {
        for (const auto& t : tokens) ++counts[t];
    }
    return Vocabulary::from_counts(counts, min_count);
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& records,
                            std::int64_t min_count) {
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& rec : records) {
        for (const auto& t : rec) ++counts[t];
    }
    return Vocabulary::from_counts(counts, min_count);
}

}  // namespace desm
