#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "desm/embedding.hpp"
#include "desm/matrix.hpp"
#include "desm/vocab.hpp"

namespace desm {

class RecordSource;

enum class NegativeDistribution { uniform, empirical, empirical_pow };

NegativeDistribution parse_negative_distribution(std::string_view s);
std::string to_string(NegativeDistribution d);

struct TrainerConfig {
    std::size_t dim = 200;
    int window = 5;     // context half-width, tokens each side of the target
    int negatives = 5;  // negative samples per target
    int epochs = 5;
    double learning_rate = 0.025;     // linearly decayed
    double lr_floor_ratio = 1e-4;     // floor = lr_floor_ratio * learning_rate
    NegativeDistribution negative_distribution = NegativeDistribution::empirical_pow;
    double distribution_power = 0.75;  // used by empirical_pow only
    std::optional<double> subsample_threshold;  // frequent-word downsampling, off by default
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument on violated bounds
};

/// One CBOW prediction instance: the target word and the surrounding window.
struct TrainingExample {
    int target;
    std::vector<int> context;  // non-empty; window co-occurrences, target excluded
};

/// Arithmetic mean of the context words' input-space rows. Truncated windows
/// at record edges divide by the actual context count. Throws on an empty
/// context; callers skip such targets.
std::vector<double> context_mean(std::span<const int> context_ids, const RowMatrix& w_in);

/// Negative-sampling loss for one example:
///   -log sigmoid(cbar . w_target) - sum_n log sigmoid(-cbar . w_neg_n)
/// where cbar is the context mean over input rows and the target/negative
/// vectors are output rows. Throws when an id is out of range.
double negative_sampling_loss(const TrainingExample& example, std::span<const int> negatives,
                              const RowMatrix& w_in, const RowMatrix& w_out);

/// Exact analytic gradients of negative_sampling_loss with respect to every
/// touched row. Duplicate ids (a word serving as both target and negative,
/// repeated context words) accumulate into a single entry.
struct CbowGradients {
    std::vector<std::pair<int, std::vector<double>>> in_rows;
    std::vector<std::pair<int, std::vector<double>>> out_rows;
};
CbowGradients negative_sampling_gradients(const TrainingExample& example,
                                          std::span<const int> negatives, const RowMatrix& w_in,
                                          const RowMatrix& w_out);

/// One SGD update: row -= lr * gradient for every touched row; all other rows
/// are left untouched. Returns the example's loss (computed from the same dot
/// products the gradients use, against the pre-update parameters).
double sgd_step(const TrainingExample& example, std::span<const int> negatives, RowMatrix& w_in,
                RowMatrix& w_out, double lr);

/// Draws negative-sample ids i.i.d. from the configured distribution:
/// uniform over the vocabulary, proportional to corpus frequency, or
/// proportional to frequency^power.
class NegativeSampler {
public:
    NegativeSampler(const Vocabulary& vocab, NegativeDistribution dist, double power);

    int sample(std::mt19937_64& rng) const;
    void sample_n(int n, std::mt19937_64& rng, std::vector<int>& out) const;

private:
    std::vector<double> cumulative_;
};

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::uint64_t updates = 0;
    std::uint64_t planned_updates = 0;
};

/// Initial parameters: input rows uniform in [-0.5/dim, 0.5/dim] drawn from
/// the config seed, output rows zero. Words that never occur during training
/// keep these rows bit-for-bit.
DualEmbedding make_initial_embedding(const Vocabulary& vocab, const TrainerConfig& cfg);

/// Trains CBOW with negative sampling and returns BOTH weight matrices.
/// threads == 1 is the deterministic mode: identical seed and inputs give
/// byte-identical matrices. threads > 1 updates the shared matrices lock-free
/// (lost updates are tolerated; individual cells are accessed atomically, so
/// no torn reads occur) and is validated statistically, not bitwise. The
/// corpus stream is materialized in encoded form before the first epoch.
/// Throws on an empty corpus (no in-vocabulary token).
DualEmbedding train(RecordSource& corpus, const Vocabulary& vocab, const TrainerConfig& cfg,
                    int threads = 1, TrainStats* stats = nullptr);

}  // namespace desm
