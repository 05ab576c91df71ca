#include "desm/cbow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "desm/corpus_io.hpp"

namespace desm {

NegativeDistribution parse_negative_distribution(std::string_view s) {
    if (s == "uniform") return NegativeDistribution::uniform;
    if (s == "empirical") return NegativeDistribution::empirical;
    if (s == "empirical_pow") return NegativeDistribution::empirical_pow;
    throw std::invalid_argument("unknown negative distribution: " + std::string(s));
}

std::string to_string(NegativeDistribution d) {
    switch (d) {
        case NegativeDistribution::uniform: return "uniform";
        case NegativeDistribution::empirical: return "empirical";
        default: return "empirical_pow";
    }
}

void TrainerConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(lr_floor_ratio > 0.0) || lr_floor_ratio > 1.0)
        throw std::invalid_argument("lr_floor_ratio must be in (0, 1]");
    if (distribution_power < 0.0) throw std::invalid_argument("distribution_power must be >= 0");
    if (subsample_threshold && !(*subsample_threshold > 0.0))
        throw std::invalid_argument("subsample_threshold must be > 0");
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow for large |x|
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// [0, 1) with 53 random bits; keeps sampling independent of the standard
// library's distribution implementations, so seeded runs are reproducible
// across toolchains.
inline double draw01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

template <bool Atomic>
inline double load_cell(const double& cell) {
    if constexpr (Atomic) {
        return std::atomic_ref<const double>(cell).load(std::memory_order_relaxed);
    } else {
        return cell;
    }
}

// Hogwild-style update: racy read-modify-write, lost updates tolerated, but
// each cell is read and written atomically so no torn values are observed.
template <bool Atomic>
inline void add_cell(double& cell, double delta) {
    if constexpr (Atomic) {
        std::atomic_ref<double> ref(cell);
        ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
    } else {
        cell += delta;
    }
}

void check_row(int id, const RowMatrix& m, const char* what) {
    if (id < 0 || static_cast<std::size_t>(id) >= m.rows())
        throw std::out_of_range(std::string(what) + " id out of range: " + std::to_string(id));
}

struct StepScratch {
    std::vector<double> cbar;
    std::vector<double> err;
    std::vector<double> gains;  // sigmoid(f) - y per scored row
    std::vector<int> rows;      // target followed by negatives
    std::vector<int> kept;      // subsampled record buffer
    std::vector<int> context;   // window buffer
};

// Shared kernel for the sequential and the lock-free parallel mode. Gradients
// are exact for the pre-step parameters: all dot products and the error
// accumulation read the matrices before any write, so duplicate ids (a target
// re-drawn as a negative, repeated context words) accumulate correctly.
template <bool Atomic>
double step_impl(std::span<const int> context, int target, std::span<const int> negatives,
                 RowMatrix& w_in, RowMatrix& w_out, double lr, StepScratch& s) {
    const std::size_t d = w_in.cols();
    s.cbar.assign(d, 0.0);
    for (int c : context) {
        auto row = w_in.row(static_cast<std::size_t>(c));
        for (std::size_t j = 0; j < d; ++j) s.cbar[j] += load_cell<Atomic>(row[j]);
    }
    const double inv_ctx = 1.0 / static_cast<double>(context.size());
    for (std::size_t j = 0; j < d; ++j) s.cbar[j] *= inv_ctx;

    s.rows.clear();
    s.rows.push_back(target);
    s.rows.insert(s.rows.end(), negatives.begin(), negatives.end());
    s.gains.resize(s.rows.size());
    s.err.assign(d, 0.0);

    double loss = 0.0;
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        auto row = w_out.row(static_cast<std::size_t>(s.rows[k]));
        double f = 0.0;
        for (std::size_t j = 0; j < d; ++j) f += s.cbar[j] * load_cell<Atomic>(row[j]);
        const double y = (k == 0) ? 1.0 : 0.0;
        const double g = sigmoid(f) - y;
        s.gains[k] = g;
        loss += (k == 0) ? softplus(-f) : softplus(f);
        for (std::size_t j = 0; j < d; ++j) s.err[j] += g * load_cell<Atomic>(row[j]);
    }

    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        auto row = w_out.row(static_cast<std::size_t>(s.rows[k]));
        const double step = -lr * s.gains[k];
        for (std::size_t j = 0; j < d; ++j) add_cell<Atomic>(row[j], step * s.cbar[j]);
    }

    const double in_step = -lr * inv_ctx;
    for (int c : context) {
        auto row = w_in.row(static_cast<std::size_t>(c));
        for (std::size_t j = 0; j < d; ++j) add_cell<Atomic>(row[j], in_step * s.err[j]);
    }
    return loss;
}

}  // namespace

std::vector<double> context_mean(std::span<const int> context_ids, const RowMatrix& w_in) {
    if (context_ids.empty()) throw std::invalid_argument("context must not be empty");
    for (int c : context_ids) check_row(c, w_in, "context");
    std::vector<double> mean(w_in.cols(), 0.0);
    for (int c : context_ids) {
        auto row = w_in.row(static_cast<std::size_t>(c));
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(context_ids.size());
    for (double& v : mean) v *= inv;
    return mean;
}

double negative_sampling_loss(const TrainingExample& example, std::span<const int> negatives,
                              const RowMatrix& w_in, const RowMatrix& w_out) {
    check_row(example.target, w_out, "target");
    for (int n : negatives) check_row(n, w_out, "negative");
    auto cbar = context_mean(example.context, w_in);
    auto target_row = w_out.row(static_cast<std::size_t>(example.target));
    double loss = softplus(-dot(cbar, target_row));
    for (int n : negatives) {
        loss += softplus(dot(cbar, w_out.row(static_cast<std::size_t>(n))));
    }
    return loss;
}

CbowGradients negative_sampling_gradients(const TrainingExample& example,
                                          std::span<const int> negatives, const RowMatrix& w_in,
                                          const RowMatrix& w_out) {
    check_row(example.target, w_out, "target");
    for (int n : negatives) check_row(n, w_out, "negative");
    auto cbar = context_mean(example.context, w_in);
    const std::size_t d = w_in.cols();

    std::map<int, std::vector<double>> out_grads;
    std::vector<double> err(d, 0.0);
    auto score = [&](int row_id, double y) {
        auto row = w_out.row(static_cast<std::size_t>(row_id));
        double g = sigmoid(dot(cbar, row)) - y;
        auto& grad = out_grads.try_emplace(row_id, d, 0.0).first->second;
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] += g * cbar[j];
            err[j] += g * row[j];
        }
    };
    score(example.target, 1.0);
    for (int n : negatives) score(n, 0.0);

    const double inv_ctx = 1.0 / static_cast<double>(example.context.size());
    std::map<int, std::vector<double>> in_grads;
    for (int c : example.context) {
        auto& grad = in_grads.try_emplace(c, d, 0.0).first->second;
        for (std::size_t j = 0; j < d; ++j) grad[j] += inv_ctx * err[j];
    }

    CbowGradients g;
    g.in_rows.assign(in_grads.begin(), in_grads.end());
    g.out_rows.assign(out_grads.begin(), out_grads.end());
    return g;
}

double sgd_step(const TrainingExample& example, std::span<const int> negatives, RowMatrix& w_in,
                RowMatrix& w_out, double lr) {
    if (example.context.empty()) throw std::invalid_argument("context must not be empty");
    if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
    check_row(example.target, w_out, "target");
    for (int n : negatives) check_row(n, w_out, "negative");
    for (int c : example.context) check_row(c, w_in, "context");
    StepScratch scratch;
    return step_impl<false>(example.context, example.target, negatives, w_in, w_out, lr, scratch);
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, NegativeDistribution dist,
                                 double power) {
    if (vocab.empty()) throw std::invalid_argument("cannot sample from an empty vocabulary");
    cumulative_.resize(static_cast<std::size_t>(vocab.size()));
    double acc = 0.0;
    for (int id = 0; id < vocab.size(); ++id) {
        double w = 1.0;
        switch (dist) {
            case NegativeDistribution::uniform: w = 1.0; break;
            case NegativeDistribution::empirical:
                w = static_cast<double>(vocab.count(id));
                break;
            case NegativeDistribution::empirical_pow:
                w = std::pow(static_cast<double>(vocab.count(id)), power);
                break;
        }
        acc += w;
        cumulative_[static_cast<std::size_t>(id)] = acc;
    }
    if (!(acc > 0.0))
        throw std::invalid_argument("negative sampling weights sum to zero (missing counts?)");
}

int NegativeSampler::sample(std::mt19937_64& rng) const {
    double u = draw01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
}

void NegativeSampler::sample_n(int n, std::mt19937_64& rng, std::vector<int>& out) const {
    out.clear();
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(sample(rng));
}

DualEmbedding make_initial_embedding(const Vocabulary& vocab, const TrainerConfig& cfg) {
    cfg.validate();
    DualEmbedding emb;
    emb.vocab = vocab;
    const auto v = static_cast<std::size_t>(vocab.size());
    emb.w_in = RowMatrix(v, cfg.dim);
    emb.w_out = RowMatrix(v, cfg.dim);
    std::mt19937_64 rng(mix_seed(cfg.seed, 0));
    const double scale = 1.0 / static_cast<double>(cfg.dim);
    for (double& cell : emb.w_in.data()) cell = (draw01(rng) - 0.5) * scale;
    return emb;
}

namespace {

struct EpochAccumulator {
    std::vector<double> loss_sum;
    std::vector<std::uint64_t> loss_count;
    explicit EpochAccumulator(int epochs)
        : loss_sum(static_cast<std::size_t>(epochs), 0.0),
          loss_count(static_cast<std::size_t>(epochs), 0) {}
};

template <bool Atomic>
void train_worker(const std::vector<std::vector<int>>& records, const Vocabulary& vocab,
                  const TrainerConfig& cfg, const NegativeSampler& sampler, int worker,
                  int num_workers, std::uint64_t planned, std::atomic<std::uint64_t>& processed,
                  RowMatrix& w_in, RowMatrix& w_out, EpochAccumulator& acc) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(worker) + 1));
    StepScratch scratch;
    std::vector<int> negatives;
    const double lr0 = cfg.learning_rate;
    const double lr_floor = cfg.lr_floor_ratio * lr0;
    const auto total = static_cast<double>(planned);

    std::vector<double> keep_prob;
    if (cfg.subsample_threshold) {
        const double t = *cfg.subsample_threshold;
        const auto corpus_tokens = static_cast<double>(vocab.total_tokens());
        keep_prob.resize(static_cast<std::size_t>(vocab.size()), 1.0);
        for (int id = 0; id < vocab.size(); ++id) {
            double freq = static_cast<double>(vocab.count(id)) / corpus_tokens;
            if (freq > 0.0) {
                double p = (std::sqrt(freq / t) + 1.0) * (t / freq);
                keep_prob[static_cast<std::size_t>(id)] = std::min(1.0, p);
            }
        }
    }

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t r = static_cast<std::size_t>(worker); r < records.size();
             r += static_cast<std::size_t>(num_workers)) {
            const std::vector<int>* ids = &records[r];
            if (!keep_prob.empty()) {
                scratch.kept.clear();
                for (int id : *ids) {
                    if (draw01(rng) < keep_prob[static_cast<std::size_t>(id)])
                        scratch.kept.push_back(id);
                }
                ids = &scratch.kept;
            }
            const auto n = static_cast<int>(ids->size());
            if (n < 2) continue;

            const std::uint64_t done = processed.fetch_add(static_cast<std::uint64_t>(n),
                                                           std::memory_order_relaxed);
            double lr = lr0 * (1.0 - static_cast<double>(done) / total);
            lr = std::max(lr, lr_floor);

            for (int i = 0; i < n; ++i) {
                const int lo = std::max(0, i - cfg.window);
                const int hi = std::min(n - 1, i + cfg.window);
                scratch.context.clear();
                for (int j = lo; j <= hi; ++j) {
                    if (j != i) scratch.context.push_back((*ids)[static_cast<std::size_t>(j)]);
                }
                if (scratch.context.empty()) continue;
                sampler.sample_n(cfg.negatives, rng, negatives);
                double loss = step_impl<Atomic>(scratch.context,
                                                (*ids)[static_cast<std::size_t>(i)],
                                                negatives, w_in, w_out, lr, scratch);
                acc.loss_sum[static_cast<std::size_t>(epoch)] += loss;
                ++acc.loss_count[static_cast<std::size_t>(epoch)];
            }
        }
    }
}

}  // namespace

DualEmbedding train(RecordSource& corpus, const Vocabulary& vocab, const TrainerConfig& cfg,
                    int threads, TrainStats* stats) {
    cfg.validate();
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (vocab.empty()) throw std::runtime_error("cannot train on an empty vocabulary");

    // Materialize the encoded corpus once; epochs then run in memory.
    std::vector<std::vector<int>> records;
    std::uint64_t positions = 0;
    {
        std::vector<std::string> tokens;
        corpus.reset();
        while (corpus.next(tokens)) {
            Encoded e = encode(tokens, vocab);
            if (e.ids.size() < 2) continue;  // no trainable target without context
            positions += e.ids.size();
            records.push_back(std::move(e.ids));
        }
    }
    if (positions == 0) throw std::runtime_error("training corpus has no usable records");

    NegativeSampler sampler(vocab, cfg.negative_distribution, cfg.distribution_power);
    DualEmbedding emb = make_initial_embedding(vocab, cfg);
    const std::uint64_t planned = static_cast<std::uint64_t>(cfg.epochs) * positions;
    std::atomic<std::uint64_t> processed{0};

    std::vector<EpochAccumulator> accs(static_cast<std::size_t>(threads),
                                       EpochAccumulator(cfg.epochs));
    if (threads == 1) {
        train_worker<false>(records, vocab, cfg, sampler, 0, 1, planned, processed, emb.w_in,
                            emb.w_out, accs[0]);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                train_worker<true>(records, vocab, cfg, sampler, w, threads, planned, processed,
                                   emb.w_in, emb.w_out, accs[static_cast<std::size_t>(w)]);
            });
        }
        for (auto& t : workers) t.join();
    }

    if (stats) {
        stats->epoch_mean_loss.assign(static_cast<std::size_t>(cfg.epochs), 0.0);
        stats->updates = 0;
        stats->planned_updates = planned;
        for (int e = 0; e < cfg.epochs; ++e) {
            double sum = 0.0;
            std::uint64_t count = 0;
            for (const auto& a : accs) {
                sum += a.loss_sum[static_cast<std::size_t>(e)];
                count += a.loss_count[static_cast<std::size_t>(e)];
            }
            stats->epoch_mean_loss[static_cast<std::size_t>(e)] =
                count ? sum / static_cast<double>(count) : 0.0;
            stats->updates += count;
        }
    }
    return emb;
}

}  // namespace desm
