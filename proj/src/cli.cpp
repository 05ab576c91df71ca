#include "desm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "desm/analysis.hpp"
#include "desm/cbow.hpp"
#include "desm/corpus_io.hpp"
#include "desm/desm.hpp"
#include "desm/embedding.hpp"
#include "desm/eval.hpp"
#include "desm/lexical.hpp"
#include "desm/lsa.hpp"
#include "desm/mixture.hpp"
#include "desm/run.hpp"
#include "desm/tokenize.hpp"
#include "desm/vocab.hpp"

namespace desm::cli {
namespace {

struct GlobalOptions {
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Every file artifact gets a sidecar with the fully resolved configuration,
/// so outputs carry their provenance. Content depends only on the parsed
/// options, keeping repeated runs byte-identical.
void write_meta(const std::string& artifact_path, const CLI::App& root) {
    std::ofstream os(artifact_path + ".meta", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write meta file: " + artifact_path + ".meta");
    os << "artifact=" << artifact_path << '\n';
    os << root.config_to_str(/*default_also=*/true, /*write_description=*/false);
    if (!os) throw std::runtime_error("write failed: " + artifact_path + ".meta");
}

std::vector<TokenizedDoc> load_tokenized_docs(const std::string& path) {
    std::vector<TokenizedDoc> docs;
    for (auto& [id, text] : read_id_text_file(path)) {
        docs.push_back({std::move(id), tokenize(text)});
    }
    return docs;
}

struct QuerySet {
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> tokens;
};

QuerySet load_queries(const std::string& path) {
    QuerySet q;
    for (auto& [id, text] : read_id_text_file(path)) {
        q.ids.push_back(std::move(id));
        q.tokens.push_back(tokenize(text));
    }
    if (q.ids.empty()) throw std::runtime_error("no queries in " + path);
    return q;
}

DualEmbedding load_embedding_prefix(const std::string& prefix) {
    return load_embedding(prefix + ".in.vec", prefix + ".out.vec");
}

bool looks_like_qrels(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open candidates file: " + path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c, d, extra;
        if (!(ls >> a >> b >> c >> d) || (ls >> extra)) return false;
        char* end = nullptr;
        std::strtol(d.c_str(), &end, 10);
        return b == "0" && end && *end == '\0';
    }
    return false;
}

/// Candidates come either from a qrels file (telescoped: each query gets its
/// judged documents) or from a plain doc-id list (full collection: every
/// query gets all of them).
std::unordered_map<std::string, std::vector<std::string>> load_candidates(
    const std::string& path, const std::string& format, const QuerySet& queries) {
    bool qrels_format = format == "qrels" || (format == "auto" && looks_like_qrels(path));
    if (qrels_format) {
        Judgments j = read_qrels(path);
        return make_candidate_sets(CandidateMode::telescoped, j, {});
    }
    auto ids = read_id_list(path);
    if (ids.empty()) throw std::runtime_error("no candidate documents in " + path);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<std::string, std::vector<std::string>> sets;
    for (const auto& qid : queries.ids) sets.emplace(qid, ids);
    return sets;
}

const std::vector<std::string>& candidates_for(
    const std::unordered_map<std::string, std::vector<std::string>>& sets,
    const std::string& qid) {
    static const std::vector<std::string> empty;
    auto it = sets.find(qid);
    return it == sets.end() ? empty : it->second;
}

std::vector<int> parse_cutoffs(const std::string& csv) {
    std::vector<int> cutoffs;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        cutoffs.push_back(std::stoi(item));
    }
    if (cutoffs.empty()) throw std::runtime_error("no cutoffs in '" + csv + "'");
    return cutoffs;
}

int parse_metric_k(const std::string& metric) {
    if (metric.rfind("ndcg@", 0) != 0)
        throw std::runtime_error("unsupported metric: " + metric + " (expected ndcg@K)");
    return std::stoi(metric.substr(5));
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
    std::string corpus;
    std::string out_prefix;
    std::int64_t min_count = 5;
    TrainerConfig cfg;
    double subsample = 0.0;
    std::string distribution = "empirical_pow";
};

void add_train(CLI::App& app, GlobalOptions& global, TrainArgs& a, const CLI::App& root) {
    auto* cmd = app.add_subcommand("train", "Train CBOW embeddings, keeping both matrices");
    cmd->add_option("--corpus", a.corpus, "training corpus, one record per line")->required();
    cmd->add_option("--out-prefix", a.out_prefix, "writes <prefix>.in.vec and <prefix>.out.vec")
        ->required();
    cmd->add_option("--min-count", a.min_count, "vocabulary frequency threshold");
    cmd->add_option("--dim", a.cfg.dim, "embedding dimensionality");
    cmd->add_option("--window", a.cfg.window, "context half-width");
    cmd->add_option("--negatives", a.cfg.negatives, "negative samples per target");
    cmd->add_option("--epochs", a.cfg.epochs, "training passes");
    cmd->add_option("--lr", a.cfg.learning_rate, "initial learning rate");
    cmd->add_option("--lr-floor-ratio", a.cfg.lr_floor_ratio, "decay floor as a ratio");
    cmd->add_option("--negative-distribution", a.distribution, "uniform|empirical|empirical_pow");
    cmd->add_option("--distribution-power", a.cfg.distribution_power, "empirical_pow exponent");
    cmd->add_option("--subsample", a.subsample, "frequent-word subsampling threshold (0 = off)");
    cmd->callback([&a, &global, &root] {
        a.cfg.seed = global.seed;
        a.cfg.negative_distribution = parse_negative_distribution(a.distribution);
        a.cfg.subsample_threshold =
            a.subsample > 0.0 ? std::optional<double>(a.subsample) : std::nullopt;
        LineCorpus corpus(a.corpus);
        Vocabulary vocab = build_vocabulary(corpus, a.min_count);
        TrainStats stats;
        DualEmbedding emb = train(corpus, vocab, a.cfg, global.threads, &stats);
        save_embedding(emb, a.out_prefix);
        write_meta(a.out_prefix + ".in.vec", root);
        write_meta(a.out_prefix + ".out.vec", root);
        std::cout << "vocabulary=" << vocab.size() << '\n'
                  << "updates=" << stats.updates << '\n';
        for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e) {
            std::cout << "epoch_" << e + 1 << "_mean_loss=" << stats.epoch_mean_loss[e] << '\n';
        }
    });
}

// ---- index ----------------------------------------------------------------

struct IndexArgs {
    std::string docs;
    std::string emb_prefix;
    std::string space = "out";
    std::string output;
};

void add_index(CLI::App& app, IndexArgs& a, const CLI::App& root) {
    auto* cmd = app.add_subcommand("index", "Precompute document centroids in one space");
    cmd->add_option("--docs", a.docs, "documents file: 'docid text...' per line")->required();
    cmd->add_option("--emb", a.emb_prefix, "embedding file prefix")->required();
    cmd->add_option("--space", a.space, "in|out");
    cmd->add_option("--output", a.output, "centroid index output path")->required();
    cmd->callback([&a, &root] {
        DualEmbedding emb = load_embedding_prefix(a.emb_prefix);
        auto docs = load_tokenized_docs(a.docs);
        CentroidIndex index = build_centroid_index(docs, emb, parse_space(a.space));
        save_centroid_index(index, a.output);
        write_meta(a.output, root);
        std::cout << "indexed=" << index.doc_ids.size() << '\n'
                  << "skipped=" << index.skipped_docs.size() << '\n';
    });
}

// ---- rank -----------------------------------------------------------------

struct RankArgs {
    std::string scorer = "desm";
    std::string queries;
    std::string candidates;
    std::string candidates_format = "auto";
    std::string output;
    std::string tag;
    // desm / mm
    std::string index_path;
    std::string emb_prefix;
    std::string variant = "in-out";
    // bm25 / lsa / mm
    std::string docs;
    Bm25Config bm25;
    std::size_t lsa_k = 200;
    double alpha = 0.5;
};

std::vector<QueryCandidateScores> build_component_scores(
    const QuerySet& queries,
    const std::unordered_map<std::string, std::vector<std::string>>& candidate_sets,
    const CentroidIndex& index, const DualEmbedding& emb, SpacePair variant,
    const LexicalIndex& lex, const Bm25Config& bm25) {
    std::vector<QueryCandidateScores> out;
    out.reserve(queries.ids.size());
    for (std::size_t q = 0; q < queries.ids.size(); ++q) {
        QueryCandidateScores s;
        s.query_id = queries.ids[q];
        for (const auto& doc : candidates_for(candidate_sets, s.query_id)) {
            s.doc_ids.push_back(doc);
            s.desm.push_back(desm_score(queries.tokens[q], doc, index, emb, variant));
            s.bm25.push_back(bm25_score(queries.tokens[q], doc, lex, bm25));
        }
        out.push_back(std::move(s));
    }
    return out;
}

void add_rank(CLI::App& app, RankArgs& a, const CLI::App& root) {
    auto* cmd = app.add_subcommand("rank", "Rank candidates and emit a run file");
    cmd->add_option("--scorer", a.scorer, "desm|bm25|lsa|mm");
    cmd->add_option("--queries", a.queries, "queries file: 'qid text...' per line")->required();
    cmd->add_option("--candidates", a.candidates, "qrels (telescoped) or doc-id list (full)")
        ->required();
    cmd->add_option("--candidates-format", a.candidates_format, "auto|qrels|list");
    cmd->add_option("--output", a.output, "run file output path")->required();
    cmd->add_option("--tag", a.tag, "run tag (defaults to the scorer name)");
    cmd->add_option("--index", a.index_path, "centroid index (desm, mm)");
    cmd->add_option("--emb", a.emb_prefix, "embedding prefix (desm, mm)");
    cmd->add_option("--variant", a.variant, "in-out|in-in|out-out|out-in (desm, mm)");
    cmd->add_option("--docs", a.docs, "documents file (bm25, lsa, mm)");
    cmd->add_option("--k1", a.bm25.k1, "BM25 k1");
    cmd->add_option("--b", a.bm25.b, "BM25 b");
    cmd->add_option("--lsa-k", a.lsa_k, "LSA latent dimensionality");
    cmd->add_option("--alpha", a.alpha, "mixture weight on DESM (mm)");
    cmd->callback([&a, &root] {
        QuerySet queries = load_queries(a.queries);
        auto candidate_sets = load_candidates(a.candidates, a.candidates_format, queries);
        const std::string tag = a.tag.empty() ? a.scorer : a.tag;
        std::vector<ScoredList> lists;
        lists.reserve(queries.ids.size());

        auto require = [](const std::string& value, const char* flag, const char* scorer) {
            if (value.empty())
                throw std::runtime_error(std::string(flag) + " is required for scorer " + scorer);
        };

        if (a.scorer == "desm") {
            require(a.index_path, "--index", "desm");
            require(a.emb_prefix, "--emb", "desm");
            CentroidIndex index = load_centroid_index(a.index_path);
            DualEmbedding emb = load_embedding_prefix(a.emb_prefix);
            if (index.dim != emb.dim())
                throw std::runtime_error("centroid index dimension does not match embedding");
            SpacePair variant = parse_space_pair(a.variant);
            for (std::size_t q = 0; q < queries.ids.size(); ++q) {
                lists.push_back(desm_rank(queries.ids[q], queries.tokens[q],
                                          candidates_for(candidate_sets, queries.ids[q]), index,
                                          emb, variant));
            }
        } else if (a.scorer == "bm25") {
            require(a.docs, "--docs", "bm25");
            LexicalIndex lex = build_lexical_index(load_tokenized_docs(a.docs));
            for (std::size_t q = 0; q < queries.ids.size(); ++q) {
                lists.push_back(bm25_rank(queries.ids[q], queries.tokens[q],
                                          candidates_for(candidate_sets, queries.ids[q]), lex,
                                          a.bm25));
            }
        } else if (a.scorer == "lsa") {
            require(a.docs, "--docs", "lsa");
            LexicalIndex lex = build_lexical_index(load_tokenized_docs(a.docs));
            LsaModel model = lsa_train(lex, a.lsa_k);
            if (model.rank_reduced)
                std::cerr << "warning: lsa rank reduced to " << model.k << '\n';
            for (std::size_t q = 0; q < queries.ids.size(); ++q) {
                lists.push_back(lsa_rank(queries.ids[q], queries.tokens[q],
                                         candidates_for(candidate_sets, queries.ids[q]), model));
            }
        } else if (a.scorer == "mm") {
            require(a.index_path, "--index", "mm");
            require(a.emb_prefix, "--emb", "mm");
            require(a.docs, "--docs", "mm");
            MixtureConfig mix;
            mix.alpha = a.alpha;
            mix.desm_variant = parse_space_pair(a.variant);
            mix.bm25 = a.bm25;
            mix.validate();
            CentroidIndex index = load_centroid_index(a.index_path);
            DualEmbedding emb = load_embedding_prefix(a.emb_prefix);
            LexicalIndex lex = build_lexical_index(load_tokenized_docs(a.docs));
            auto scores = build_component_scores(queries, candidate_sets, index, emb,
                                                 mix.desm_variant, lex, mix.bm25);
            for (const auto& s : scores) lists.push_back(mixture_rank(s, mix.alpha));
        } else {
            throw std::runtime_error("unknown scorer: " + a.scorer);
        }

        write_run_file(a.output, to_run_file(lists, tag));
        write_meta(a.output, root);
        std::cout << "queries=" << lists.size() << '\n';
    });
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
    std::string run;
    std::string qrels;
    std::string cutoffs = "1,3,10";
    std::string baseline_run;
    std::string output;
};

void add_eval(CLI::App& app, EvalArgs& a, const CLI::App& root) {
    auto* cmd = app.add_subcommand("eval", "NDCG report for a run file");
    cmd->add_option("--run", a.run, "run file")->required();
    cmd->add_option("--qrels", a.qrels, "judgments file")->required();
    cmd->add_option("--cutoffs", a.cutoffs, "comma-separated rank cutoffs");
    cmd->add_option("--baseline-run", a.baseline_run, "run to test significance against");
    cmd->add_option("--output", a.output, "also write the report to this path");
    cmd->callback([&a, &root] {
        Judgments judgments = read_qrels(a.qrels);
        auto cutoffs = parse_cutoffs(a.cutoffs);
        EvalReport report = evaluate_run(read_run_file(a.run), judgments, cutoffs);
        std::optional<EvalReport> baseline;
        if (!a.baseline_run.empty()) {
            baseline = evaluate_run(read_run_file(a.baseline_run), judgments, cutoffs);
            compare_to_baseline(report, *baseline);
        }
        std::string text = format_report(report, baseline ? &*baseline : nullptr);
        std::cout << text;
        if (!a.output.empty()) {
            std::ofstream os(a.output, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write report: " + a.output);
            os << text;
            os.close();
            write_meta(a.output, root);
        }
    });
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    std::string queries;
    std::string train_qrels;
    std::string candidates;
    std::string candidates_format = "auto";
    std::string index_path;
    std::string emb_prefix;
    std::string variant = "in-out";
    std::string docs;
    Bm25Config bm25;
    double step = 0.01;
    std::string metric = "ndcg@10";
    std::string output;
};

void add_sweep(CLI::App& app, SweepArgs& a, const CLI::App& root) {
    auto* cmd = app.add_subcommand("sweep", "Grid-search the mixture weight alpha");
    cmd->add_option("--queries", a.queries, "training queries file")->required();
    cmd->add_option("--train-qrels", a.train_qrels, "training judgments")->required();
    cmd->add_option("--candidates", a.candidates,
                    "candidate source (defaults to the training qrels)");
    cmd->add_option("--candidates-format", a.candidates_format, "auto|qrels|list");
    cmd->add_option("--index", a.index_path, "centroid index")->required();
    cmd->add_option("--emb", a.emb_prefix, "embedding prefix")->required();
    cmd->add_option("--variant", a.variant, "DESM variant");
    cmd->add_option("--docs", a.docs, "documents file for BM25")->required();
    cmd->add_option("--k1", a.bm25.k1, "BM25 k1");
    cmd->add_option("--b", a.bm25.b, "BM25 b");
    cmd->add_option("--step", a.step, "alpha grid step");
    cmd->add_option("--metric", a.metric, "ndcg@K");
    cmd->add_option("--output", a.output, "write the grid as TSV");
    cmd->callback([&a, &root] {
        QuerySet queries = load_queries(a.queries);
        Judgments judgments = read_qrels(a.train_qrels);
        auto candidate_sets =
            a.candidates.empty()
                ? make_candidate_sets(CandidateMode::telescoped, judgments, {})
                : load_candidates(a.candidates, a.candidates_format, queries);
        CentroidIndex index = load_centroid_index(a.index_path);
        DualEmbedding emb = load_embedding_prefix(a.emb_prefix);
        LexicalIndex lex = build_lexical_index(load_tokenized_docs(a.docs));
        auto scores = build_component_scores(queries, candidate_sets, index, emb,
                                             parse_space_pair(a.variant), lex, a.bm25);
        SweepResult result = sweep_alpha(scores, judgments, a.step, parse_metric_k(a.metric));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "best_alpha=%.2f\n", result.best_alpha);
        std::cout << buf;
        std::snprintf(buf, sizeof(buf), "best_mean_%s=%.6f\n", a.metric.c_str(),
                      result.best_mean_ndcg);
        std::cout << buf;
        if (!a.output.empty()) {
            std::ofstream os(a.output, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write sweep grid: " + a.output);
            os << "alpha\tmean_" << a.metric << '\n';
            for (std::size_t i = 0; i < result.grid_alpha.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.2f\t%.6f\n", result.grid_alpha[i],
                              result.grid_mean_ndcg[i]);
                os << buf;
            }
            os.close();
            write_meta(a.output, root);
        }
    });
}

// ---- nn -------------------------------------------------------------------

struct NnArgs {
    std::string word;
    std::string pair = "in-out";
    int k = 6;
    std::string in_path;
    std::string out_path;
};

void add_nn(CLI::App& app, NnArgs& a) {
    auto* cmd = app.add_subcommand("nn", "Nearest neighbors across the dual spaces");
    cmd->add_option("--word", a.word, "query word")->required();
    cmd->add_option("--pair", a.pair, "in-in|in-out|out-out|out-in");
    cmd->add_option("--k", a.k, "neighbors to print");
    cmd->add_option("--in", a.in_path, "IN-space .vec file")->required();
    cmd->add_option("--out", a.out_path, "OUT-space .vec file")->required();
    cmd->callback([&a] {
        DualEmbedding emb = load_embedding(a.in_path, a.out_path);
        auto neighbors = nearest_neighbors(emb, a.word, parse_space_pair(a.pair), a.k);
        std::cout << a.word << " (" << a.pair << ")\n";
        char buf[64];
        for (const auto& n : neighbors) {
            std::snprintf(buf, sizeof(buf), "%.6f", n.similarity);
            std::cout << n.term << '\t' << buf << '\n';
        }
    });
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    // perturb
    std::string query_term;
    std::string passages;
    std::string emb_prefix;
    std::string output;
    // project
    std::string run;
    std::string queries;
    std::string docs;
    std::string pair = "in-out";
    std::string qrels;
    int threshold = 2;
    // dist
    std::vector<std::string> runs;
    int bins = 30;
};

void emit(const std::string& text, const std::string& output, const CLI::App& root) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(output, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write output: " + output);
    os << text;
    os.close();
    write_meta(output, root);
}

void add_analyze(CLI::App& app, AnalyzeArgs& a, const CLI::App& root) {
    auto* cmd = app.add_subcommand("analyze", "Diagnostics exports (TSV)");
    cmd->require_subcommand(1);

    auto* perturb = cmd->add_subcommand("perturb", "Score labeled passages for one query term");
    perturb->add_option("--query", a.query_term, "query term")->required();
    perturb->add_option("--passages", a.passages, "passages file: 'label text...' per line")
        ->required();
    perturb->add_option("--emb", a.emb_prefix, "embedding prefix")->required();
    perturb->add_option("--output", a.output, "TSV output path (stdout when absent)");
    perturb->callback([&a, &root] {
        DualEmbedding emb = load_embedding_prefix(a.emb_prefix);
        std::vector<std::pair<std::string, std::string>> passages;
        for (auto& [id, text] : read_id_text_file(a.passages)) passages.emplace_back(id, text);
        emit(perturbation_tsv(perturbation_report(passages, a.query_term, emb)), a.output, root);
    });

    auto* project = cmd->add_subcommand("project", "2-D PCA export of query/document vectors");
    project->add_option("--run", a.run, "run file choosing the documents per query")->required();
    project->add_option("--queries", a.queries, "queries file")->required();
    project->add_option("--docs", a.docs, "documents file")->required();
    project->add_option("--emb", a.emb_prefix, "embedding prefix")->required();
    project->add_option("--pair", a.pair, "spaces for query/document vectors");
    project->add_option("--qrels", a.qrels, "judgments for relevance labels")->required();
    project->add_option("--threshold", a.threshold, "grade >= threshold counts as relevant");
    project->add_option("--output", a.output, "TSV output path (stdout when absent)");
    project->callback([&a, &root] {
        DualEmbedding emb = load_embedding_prefix(a.emb_prefix);
        RunFile run = read_run_file(a.run);
        QuerySet queries = load_queries(a.queries);
        Judgments judgments = read_qrels(a.qrels);
        SpacePair pair = parse_space_pair(a.pair);

        std::unordered_map<std::string, std::vector<std::string>> doc_tokens;
        for (auto& d : load_tokenized_docs(a.docs)) doc_tokens.emplace(d.doc_id, d.tokens);

        std::vector<ProjectionGroup> groups;
        for (std::size_t q = 0; q < queries.ids.size(); ++q) {
            const auto* ranking = run.find(queries.ids[q]);
            if (!ranking) continue;
            auto query_vec = document_centroid(queries.tokens[q], emb, first_space(pair));
            if (!query_vec) continue;  // all-OOV query has no vector
            ProjectionGroup g;
            g.query_label = "query:" + queries.ids[q];
            g.query_vec = std::move(*query_vec);
            for (const auto& e : *ranking) {
                auto it = doc_tokens.find(e.doc_id);
                if (it == doc_tokens.end()) continue;
                auto doc_vec = document_centroid(it->second, emb, second_space(pair));
                if (!doc_vec) continue;
                auto grade = judgments.grade(queries.ids[q], e.doc_id);
                std::string cls = grade && *grade >= a.threshold ? "relevant" : "irrelevant";
                g.docs.emplace_back(cls + ":" + queries.ids[q] + ":" + e.doc_id,
                                    std::move(*doc_vec));
            }
            groups.push_back(std::move(g));
        }
        auto projection = project_2d(groups);
        if (projection.degenerate_second_axis)
            std::cerr << "warning: fewer than 2 nonzero-variance directions; "
                         "second coordinate padded with 0\n";
        emit(projection_tsv(projection), a.output, root);
    });

    auto* dist = cmd->add_subcommand("dist", "Score histograms per relevance class");
    dist->add_option("--runs", a.runs, "run files, one feature each")->required();
    dist->add_option("--qrels", a.qrels, "judgments")->required();
    dist->add_option("--threshold", a.threshold, "grade >= threshold counts as relevant");
    dist->add_option("--bins", a.bins, "histogram bins");
    dist->add_option("--output", a.output, "TSV output path (stdout when absent)");
    dist->callback([&a, &root] {
        Judgments judgments = read_qrels(a.qrels);
        std::vector<FeatureDistributions> features;
        for (const auto& path : a.runs) {
            RunFile run = read_run_file(path);
            ClassifiedScores classes = classify_run_scores(run, judgments, a.threshold);
            std::string feature = run.tag.empty() ? path : run.tag;
            auto d = score_distributions(
                feature,
                {{"relevant", classes.relevant},
                 {"judged_irrelevant", classes.judged_irrelevant},
                 {"random_irrelevant", classes.random_irrelevant}},
                a.bins);
            for (const auto& c : d.classes) {
                if (c.empty_class)
                    std::cerr << "warning: empty class " << c.class_name << " for " << feature
                              << '\n';
            }
            features.push_back(std::move(d));
        }
        emit(distributions_tsv(features), a.output, root);
    });
}

}  // namespace

int run(int argc, const char* const* argv) {
    GlobalOptions global;
    CLI::App app{"Dual embedding space document ranking toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();  // resolved defaults reach the meta files
    app.set_config("--config")->envname("DESM_CONFIG");
    app.add_option("--seed", global.seed, "seed for all randomized stages")
        ->envname("DESM_SEED");
    app.add_option("--threads", global.threads, "worker threads for training")
        ->envname("DESM_THREADS");

    TrainArgs train_args;
    IndexArgs index_args;
    RankArgs rank_args;
    EvalArgs eval_args;
    SweepArgs sweep_args;
    NnArgs nn_args;
    AnalyzeArgs analyze_args;

    add_train(app, global, train_args, app);
    add_index(app, index_args, app);
    add_rank(app, rank_args, app);
    add_eval(app, eval_args, app);
    add_sweep(app, sweep_args, app);
    add_nn(app, nn_args);
    add_analyze(app, analyze_args, app);

    // global flags (--seed, --threads) may appear after the subcommand name
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands([](const CLI::App*) { return true; })) {
            nested->fallthrough();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cerr << "usage: see 'desm --help'\n";
        return 2;
    } catch (const std::exception& e) {
        // subcommand callbacks run inside parse()
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace desm::cli
