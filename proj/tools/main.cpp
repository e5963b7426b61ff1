// Command-line front end.
//
// Subcommands:
//   gen        synthetic corpus + redundancy + label noise -> JSONL + cluster CSV
//   mine       JSONL or dense vectors -> cluster CSV + cluster stats
//   score      JSONL -> score-matrix CSV (R trained seed columns)
//   aggregate  score CSV (+ cluster CSV) -> ranking CSV for one method
//   eval       ranking CSVs (+ dataset for flip labels) -> metrics CSV
//   frontier   seed-budget frontier -> CSV + SVG
//   decompose  method decomposition -> results CSV + significance CSV
//   report     results/frontier CSVs -> SVG charts
//
// Common flags: --config <key=value file>, --master-seed, --out-dir, --jobs.
// Exit codes: 0 ok, 2 configuration/validation error, 3 runtime/data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "scarv/harness.hpp"
#include "scarv/io.hpp"

namespace fs = std::filesystem;
using namespace scarv;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    long long master_seed = -1;  // -1 = keep config value
    int jobs = 0;                // 0 = keep config value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key = value config file");
    cmd->add_option("--out-dir", args.out_dir, "output directory");
    cmd->add_option("--master-seed", args.master_seed, "master seed override");
    cmd->add_option("--jobs", args.jobs, "worker threads");
}

KeyValueConfig load_config(const CommonArgs& args) {
    KeyValueConfig kv;
    if (!args.config_path.empty()) kv = KeyValueConfig::from_file(args.config_path);
    if (args.master_seed >= 0) kv.set("master_seed", std::to_string(args.master_seed));
    if (args.jobs > 0) kv.set("jobs", std::to_string(args.jobs));
    return kv;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

void warn_unused(const KeyValueConfig& kv) {
    for (const auto& key : kv.unused_keys())
        std::cerr << "warning: unused config key '" << key << "'\n";
}

int run_gen(const CommonArgs& args) {
    KeyValueConfig kv = load_config(args);
    std::uint64_t master = static_cast<std::uint64_t>(kv.get_int("master_seed", 1));
    std::size_t n = static_cast<std::size_t>(kv.get_int("n", 2000));
    std::size_t vocab = static_cast<std::size_t>(kv.get_int("vocab_size", 500));
    int classes = static_cast<int>(kv.get_int("class_count", 2));
    std::size_t heldout_n = static_cast<std::size_t>(kv.get_int("heldout", 500));
    double rate = kv.get_double("redundancy_rate", 0.3);
    double strength = kv.get_double("perturbation_strength", 0.6);
    std::size_t cluster_size = static_cast<std::size_t>(kv.get_int("cluster_size", 2));
    double noise = kv.get_double("noise_rate", 0.0);
    warn_unused(kv);

    Dataset train = make_synthetic_corpus(n, vocab, classes, derive_seed(master, 0, "corpus", 0));
    ClusterMap map = ClusterMap::singletons(train.ids());
    if (rate > 0.0) {
        PerturbationConfig pc;
        pc.strength = strength;
        pc.vocabulary = corpus_vocabulary(train);
        std::tie(train, map) = inject_near_duplicates(train, rate, pc, cluster_size,
                                                      derive_seed(master, 0, "redundancy", 0));
    }
    if (noise > 0.0)
        train = inject_label_noise(train, noise, derive_seed(master, 0, "noise", 0));

    write_dataset_jsonl(out_path(args, "train.jsonl"), train);
    write_cluster_csv(out_path(args, "clusters.csv"), map);
    if (heldout_n > 0) {
        Dataset heldout = make_synthetic_corpus(heldout_n, vocab, classes,
                                                derive_seed(master, 0, "heldout", 0));
        write_dataset_jsonl(out_path(args, "heldout.jsonl"), heldout);
    }
    std::size_t flips = 0;
    for (const auto& e : train.examples) flips += e.flipped ? 1 : 0;
    std::cout << "wrote " << train.size() << " examples (" << train.size() - n
              << " injected copies, " << flips << " flipped labels) to "
              << args.out_dir << "\n";
    return 0;
}

int run_mine(const CommonArgs& args, const std::string& dataset_path,
             const std::string& vectors_path) {
    KeyValueConfig kv = load_config(args);
    std::string method = kv.get_string("mine_method", vectors_path.empty() ? "tfidf" : "vectors");
    int gram_len = static_cast<int>(kv.get_int("gram_len", kDefaultGramLength));
    double threshold = kv.get_double(
        "mine_threshold", method == "chargram" ? kDefaultChargramThreshold : kDefaultTfidfThreshold);
    TfidfConfig tfidf_cfg;
    tfidf_cfg.min_df = static_cast<std::size_t>(kv.get_int("min_df", 1));
    tfidf_cfg.max_features = static_cast<std::size_t>(kv.get_int("max_features", 0));
    warn_unused(kv);

    std::vector<ExampleId> ids;
    std::vector<int> labels;
    bool have_labels = false;
    std::vector<SimilarityPair> pairs;
    const std::vector<SparseVector>* stat_vectors = nullptr;
    std::vector<SparseVector> vectors_storage;

    if (method == "vectors") {
        if (vectors_path.empty()) throw ConfigError("mine_method=vectors needs --vectors");
        auto [vec_ids, features] = read_vectors_csv(vectors_path);
        ids = std::move(vec_ids);
        vectors_storage = features.rows;
        stat_vectors = &vectors_storage;
        pairs = tfidf_cosine_pairs(ids, vectors_storage, threshold);
        if (!dataset_path.empty()) {
            Dataset d = read_dataset_jsonl(dataset_path);
            std::unordered_map<ExampleId, int> by_id;
            for (const auto& e : d.examples) by_id[e.id] = e.label;
            for (ExampleId id : ids) labels.push_back(by_id.at(id));
            have_labels = true;
        }
    } else {
        if (dataset_path.empty()) throw ConfigError("mining from text needs --dataset");
        Dataset d = read_dataset_jsonl(dataset_path);
        ids = d.ids();
        labels = d.labels();
        have_labels = true;
        if (ids.size() > 20000)
            std::cerr << "warning: all-pairs mining over " << ids.size()
                      << " examples is quadratic\n";
        if (method == "tfidf") {
            auto [model, features] = tfidf_fit_transform(d.texts(), tfidf_cfg);
            vectors_storage = std::move(features.rows);
            stat_vectors = &vectors_storage;
            pairs = tfidf_cosine_pairs(ids, vectors_storage, threshold);
        } else if (method == "chargram") {
            auto texts = d.texts();
            pairs = chargram_jaccard_pairs(ids, texts, gram_len, threshold);
        } else {
            throw ConfigError("unknown mine_method '" + method + "'");
        }
    }
    if (!have_labels) labels.assign(ids.size(), 0);

    ClusterMap map = threshold_clusters(ids, pairs, threshold);
    write_cluster_csv(out_path(args, "clusters.csv"), map);

    ClusterStats stats = cluster_stats(map, ids, stat_vectors, labels);
    std::ofstream stats_out(out_path(args, "cluster_stats.csv"));
    stats_out << "coverage,non_singleton_count,mean_size,max_size,mean_within_similarity,"
                 "purity\n";
    stats_out << format_float(stats.coverage) << ',' << stats.non_singleton_count << ','
              << format_float(stats.mean_size) << ',' << stats.max_size << ','
              << (stats.has_similarity ? format_float(stats.mean_within_similarity) : "nan")
              << ',' << (have_labels ? format_float(stats.purity) : "nan") << '\n';
    std::cout << "mined " << stats.non_singleton_count << " clusters, coverage "
              << format_float(stats.coverage) << "\n";
    return 0;
}

int run_score(const CommonArgs& args, const std::string& dataset_path,
              const std::string& val_path, long long outer) {
    if (dataset_path.empty()) throw ConfigError("score needs --dataset");
    KeyValueConfig kv = load_config(args);
    std::uint64_t master = static_cast<std::uint64_t>(kv.get_int("master_seed", 1));
    ProxyKind proxy = proxy_from_string(kv.get_string("proxy", "loss"));
    std::size_t r_count = static_cast<std::size_t>(kv.get_int("seeds_per_run", 5));
    TrainConfig hp;
    hp.epochs = static_cast<int>(kv.get_int("epochs", hp.epochs));
    hp.batch = static_cast<int>(kv.get_int("batch", hp.batch));
    hp.learning_rate = kv.get_double("learning_rate", hp.learning_rate);
    hp.l2 = kv.get_double("l2", hp.l2);
    hp.init_scale = kv.get_double("init_scale", hp.init_scale);
    hp.checkpoints = static_cast<int>(kv.get_int("checkpoints", hp.checkpoints));
    TfidfConfig tfidf_cfg;
    tfidf_cfg.min_df = static_cast<std::size_t>(kv.get_int("min_df", 1));
    tfidf_cfg.max_features = static_cast<std::size_t>(kv.get_int("max_features", 0));
    int jobs = static_cast<int>(kv.get_int("jobs", 1));
    warn_unused(kv);

    Dataset d = read_dataset_jsonl(dataset_path);
    auto [tfidf, features] = tfidf_fit_transform(d.texts(), tfidf_cfg);
    auto labels = d.labels();
    auto ids = d.ids();

    ValBatch val;
    const ValBatch* val_ptr = nullptr;
    if (!val_path.empty()) {
        Dataset vd = read_dataset_jsonl(val_path);
        val.features = tfidf.transform_all(vd.texts());
        val.labels = vd.labels();
        val_ptr = &val;
    }
    if (proxy == ProxyKind::TracIn && !val_ptr)
        throw ConfigError("tracin proxy needs --val <jsonl>");

    std::vector<std::uint64_t> seeds(r_count);
    for (std::size_t j = 0; j < r_count; ++j)
        seeds[j] = derive_seed(master, static_cast<std::uint64_t>(outer), "score", j);
    ScoreMatrix m = score_matrix(features, labels, ids, proxy, seeds, hp, val_ptr,
                                 d.num_classes, jobs);
    write_score_csv(out_path(args, "scores.csv"), m);
    std::cout << "wrote " << m.n_examples() << "x" << m.n_seeds() << " score matrix\n";
    return 0;
}

int run_aggregate(const CommonArgs& args, const std::string& scores_path,
                  const std::string& clusters_path, const std::string& dataset_path,
                  const std::string& vectors_path, const std::string& method_name) {
    if (scores_path.empty()) throw ConfigError("aggregate needs --scores");
    KeyValueConfig kv = load_config(args);
    std::string method_str = method_name.empty()
                                 ? kv.get_string("method", "full_scarv")
                                 : method_name;
    MethodKind method = MethodKind::parse(method_str);
    ScarvConfig cfg;
    cfg.diversity_weight = kv.get_double("diversity_weight", cfg.diversity_weight);
    cfg.knn_k = static_cast<std::size_t>(kv.get_int("knn_k", static_cast<long long>(cfg.knn_k)));
    cfg.cluster_agg = cluster_agg_from_string(kv.get_string("cluster_agg", "mean"));
    cfg.alloc = alloc_from_string(kv.get_string("alloc", "shrink"));
    cfg.shrink_lambda = kv.get_double("shrink_lambda", cfg.shrink_lambda);
    cfg.cross_seed = cross_seed_from_string(kv.get_string("cross_seed", "median"));
    cfg.softmax_temperature = kv.get_double("softmax_temperature", cfg.softmax_temperature);
    TfidfConfig tfidf_cfg;
    tfidf_cfg.min_df = static_cast<std::size_t>(kv.get_int("min_df", 1));
    tfidf_cfg.max_features = static_cast<std::size_t>(kv.get_int("max_features", 0));
    warn_unused(kv);

    ScoreMatrix m = read_score_csv(scores_path);
    ClusterMap map = clusters_path.empty()
                         ? ClusterMap::singletons(m.example_ids())
                         : read_cluster_csv(clusters_path).completed(m.example_ids());
    if ((method.family == MethodFamily::DedupOracle ||
         method.family == MethodFamily::DedupApprox) &&
        clusters_path.empty())
        throw ConfigError(method_str + " needs --clusters");

    std::vector<double> diversity;
    if (!dataset_path.empty()) {
        Dataset d = read_dataset_jsonl(dataset_path);
        if (d.ids() != m.example_ids())
            throw DataError("dataset ids do not match score matrix ids");
        auto [tfidf, features] = tfidf_fit_transform(d.texts(), tfidf_cfg);
        diversity = knn_mean_cosine_distance(features, cfg.knn_k);
    } else if (!vectors_path.empty()) {
        auto [vec_ids, features] = read_vectors_csv(vectors_path);
        if (vec_ids != m.example_ids())
            throw DataError("vector ids do not match score matrix ids");
        diversity = knn_mean_cosine_distance(features, cfg.knn_k);
    }

    Ranking r = run_method(method, m, map, diversity, cfg);
    write_ranking_csv(out_path(args, "ranking_" + method_str + ".csv"), r);
    std::cout << "wrote ranking for " << method_str << " over " << r.size() << " examples\n";
    return 0;
}

int run_eval(const CommonArgs& args, const std::vector<std::string>& ranking_paths,
             const std::string& dataset_path) {
    if (ranking_paths.size() < 2)
        throw ConfigError("eval needs at least two --ranking files for stability metrics");
    KeyValueConfig kv = load_config(args);
    std::vector<double> budgets = kv.get_double_list("budgets", {0.3});
    std::size_t topk = static_cast<std::size_t>(kv.get_int("topk", 10));
    std::string method_name = kv.get_string("method_name", "external");
    warn_unused(kv);

    std::vector<Ranking> ranks;
    ranks.reserve(ranking_paths.size());
    for (const auto& p : ranking_paths) ranks.push_back(read_ranking_csv(p));

    ExperimentResult result;
    {
        std::string joined;
        for (const auto& p : ranking_paths) joined += p + ";";
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : joined) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        result.config_hash = buf;
    }
    auto add = [&](int outer, const std::string& metric, double value) {
        result.records.push_back({outer, method_name, metric, value});
    };

    const std::size_t n = ranks[0].size();
    add(-1, "stability", pairwise_stability(ranks));
    std::size_t k = std::min(topk, n);
    double top_sum = 0.0, bottom_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        for (std::size_t j = i + 1; j < ranks.size(); ++j) {
            top_sum += topk_jaccard(ranks[i], ranks[j], k, RankEnd::Top);
            bottom_sum += topk_jaccard(ranks[i], ranks[j], k, RankEnd::Bottom);
            ++pairs;
        }
    }
    add(-1, "topk_jaccard", top_sum / static_cast<double>(pairs));
    add(-1, "bottomk_jaccard", bottom_sum / static_cast<double>(pairs));
    for (double b : budgets)
        add(-1, "subset_overlap@" + format_float(b), subset_overlap(ranks, b));

    if (!dataset_path.empty()) {
        Dataset d = read_dataset_jsonl(dataset_path);
        auto flips = d.flip_mask();
        std::size_t flip_count = 0;
        for (bool f : flips) flip_count += f ? 1 : 0;
        if (flip_count > 0) {
            auto ids = d.ids();
            std::unordered_map<ExampleId, std::size_t> row_of;
            for (std::size_t i = 0; i < ids.size(); ++i) row_of[ids[i]] = i;
            double overlap_sum = 0.0;
            for (std::size_t i = 0; i < ranks.size(); ++i)
                for (std::size_t j = i + 1; j < ranks.size(); ++j)
                    overlap_sum += topk_jaccard(ranks[i], ranks[j], flip_count, RankEnd::Bottom);
            add(-1, "suspicious_overlap", overlap_sum / static_cast<double>(pairs));
            std::vector<double> aurocs;
            for (std::size_t r = 0; r < ranks.size(); ++r) {
                std::vector<double> suspicious(ids.size());
                for (std::size_t pos = 0; pos < ranks[r].size(); ++pos)
                    suspicious[row_of.at(ranks[r].order[pos])] = -ranks[r].scores[pos];
                double a = auroc(suspicious, flips);
                add(static_cast<int>(r), "auroc", a);
                aurocs.push_back(a);
            }
            add(-1, "mean_auroc",
                std::accumulate(aurocs.begin(), aurocs.end(), 0.0) /
                    static_cast<double>(aurocs.size()));
        }
    }

    write_results_csv(result, out_path(args, "metrics.csv"));
    std::cout << "wrote " << result.records.size() << " metric rows\n";
    return 0;
}

// Deterministic grid of score-model frontier configurations; the sweep in
// the acceptance protocol uses the same generator.
std::vector<ExperimentConfig> frontier_config_grid(const ExperimentConfig& base,
                                                   std::size_t count) {
    const double coverages[] = {0.3, 0.4, 0.5};
    const double effects[] = {0.8, 1.2};
    std::vector<ExperimentConfig> out;
    for (std::size_t i = 0; i < count; ++i) {
        ExperimentConfig cfg = base;
        cfg.master_seed = derive_seed(base.master_seed, 0, "frontier_config", i);
        if (cfg.score_model) {
            cfg.score_model->coverage = coverages[i % 3];
            cfg.score_model->cluster_effect = effects[(i / 3) % 2];
        }
        out.push_back(cfg);
    }
    return out;
}

int run_frontier_cmd(const CommonArgs& args) {
    KeyValueConfig kv = load_config(args);
    if (!kv.has("source")) kv.set("source", "score_model");
    ExperimentConfig cfg = experiment_config_from(kv);
    std::vector<double> r_raw = kv.get_double_list("r_list", {1, 2, 3, 5, 7, 10});
    std::size_t n_configs = static_cast<std::size_t>(kv.get_int("configs", 1));
    warn_unused(kv);
    std::vector<std::size_t> r_list;
    for (double r : r_raw) r_list.push_back(static_cast<std::size_t>(r));

    std::vector<std::vector<FrontierRow>> all_rows;
    if (n_configs <= 1) {
        all_rows.push_back(run_frontier(cfg, r_list));
    } else {
        for (const auto& sub : frontier_config_grid(cfg, n_configs))
            all_rows.push_back(run_frontier(sub, r_list));
    }

    // mean over configs per R
    std::vector<FrontierRow> mean_rows(r_list.size());
    for (std::size_t ri = 0; ri < r_list.size(); ++ri) {
        FrontierRow& m = mean_rows[ri];
        m.seeds = r_list[ri];
        for (const auto& rows : all_rows) {
            m.full_scarv += rows[ri].full_scarv;
            m.seed_mean += rows[ri].seed_mean;
            m.seed_median += rows[ri].seed_median;
            m.seed_borda += rows[ri].seed_borda;
        }
        double c = static_cast<double>(all_rows.size());
        m.full_scarv /= c;
        m.seed_mean /= c;
        m.seed_median /= c;
        m.seed_borda /= c;
        m.best_upper = std::max({m.seed_mean, m.seed_median, m.seed_borda});
        m.winner = m.best_upper == m.seed_mean
                       ? CrossSeedRule::Mean
                       : (m.best_upper == m.seed_median ? CrossSeedRule::Median
                                                        : CrossSeedRule::Borda);
        m.delta_best = m.full_scarv - m.best_upper;
    }
    write_frontier_csv(mean_rows, out_path(args, "frontier.csv"));
    emit_frontier_svg(mean_rows, out_path(args, "frontier.svg"));

    // per-R sign summary across configs
    std::ofstream summary(out_path(args, "frontier_summary.csv"));
    summary << "R,settings,full_wins,mean_delta_best,median_delta_best\n";
    for (std::size_t ri = 0; ri < r_list.size(); ++ri) {
        std::vector<double> deltas;
        std::size_t wins = 0;
        for (const auto& rows : all_rows) {
            deltas.push_back(rows[ri].delta_best);
            wins += rows[ri].delta_best > 0.0 ? 1 : 0;
        }
        std::sort(deltas.begin(), deltas.end());
        double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) /
                      static_cast<double>(deltas.size());
        double median = deltas.size() % 2 == 1
                            ? deltas[deltas.size() / 2]
                            : 0.5 * (deltas[deltas.size() / 2 - 1] + deltas[deltas.size() / 2]);
        summary << r_list[ri] << ',' << deltas.size() << ',' << wins << ','
                << format_float(mean) << ',' << format_float(median) << '\n';
    }
    std::cout << "wrote frontier over " << all_rows.size() << " config(s), R values "
              << r_list.size() << "\n";
    return 0;
}

int run_decompose(const CommonArgs& args, bool write_rankings) {
    KeyValueConfig kv = load_config(args);
    if (!kv.has("redundancy_rate") && !kv.has("cluster_csv"))
        kv.set("redundancy_rate", "0.3");
    ExperimentConfig cfg = experiment_config_from(kv);
    warn_unused(kv);
    ExperimentResult result = run_decomposition(cfg);
    write_results_csv(result, out_path(args, "results.csv"));
    emit_method_bar_svg(result, out_path(args, "method_stability.svg"));

    // paired significance of full SCARV vs seed-median on per-run metrics
    std::ofstream sig(out_path(args, "significance.csv"));
    sig << "metric,mean_delta,ci_low,ci_high,p_value,n,exact\n";
    for (const auto& metric : {std::string("utility@0.3"), std::string("auroc")}) {
        if (!result.has_value("full_scarv", metric, 0)) continue;
        auto deltas = paired_deltas(result, "full_scarv", "seed_only_median", metric);
        TestResult t = paired_test(deltas);
        sig << metric << ',' << format_float(t.mean_delta) << ',' << format_float(t.ci_low)
            << ',' << format_float(t.ci_high) << ',' << format_float(t.p_value) << ',' << t.n
            << ',' << (t.exact ? "true" : "false") << '\n';
    }

    if (write_rankings) {
        for (const auto& [method, ranks] : result.rankings) {
            for (std::size_t r = 0; r < ranks.size(); ++r) {
                write_ranking_csv(out_path(args, "ranking_" + method + "_run" +
                                                     std::to_string(r) + ".csv"),
                                  ranks[r]);
            }
        }
    }
    std::cout << "decomposition finished in " << format_float(result.wall_seconds) << "s; "
              << result.records.size() << " metric rows\n";
    for (const auto& rec : result.records) {
        if (rec.outer_run == -1 && rec.metric == "stability")
            std::cout << "  stability " << rec.method << " = " << format_float(rec.value)
                      << "\n";
    }
    return 0;
}

int run_report(const CommonArgs& args, const std::string& results_path,
               const std::string& frontier_path, const std::string& format) {
    if (results_path.empty() && frontier_path.empty())
        throw ConfigError("report needs --results and/or --frontier");
    bool want_csv = format.find("csv") != std::string::npos;
    bool want_svg = format.find("svg") != std::string::npos;
    if (!want_csv && !want_svg) throw ConfigError("format must name csv and/or svg");

    if (!results_path.empty()) {
        ExperimentResult result = read_results_csv(results_path);
        if (want_csv) write_results_csv(result, out_path(args, "report.csv"));
        if (want_svg) emit_method_bar_svg(result, out_path(args, "method_stability.svg"));
    }
    if (!frontier_path.empty()) {
        auto rows = read_frontier_csv(frontier_path);
        if (want_csv) write_frontier_csv(rows, out_path(args, "frontier_report.csv"));
        if (want_svg) emit_frontier_svg(rows, out_path(args, "frontier.svg"));
    }
    std::cout << "report written to " << args.out_dir << "\n";
    return 0;
}

int run_experiment_cmd(const CommonArgs& args, bool write_rankings) {
    KeyValueConfig kv = load_config(args);
    ExperimentConfig cfg = experiment_config_from(kv);
    warn_unused(kv);
    ExperimentResult result = run_experiment(cfg);
    write_results_csv(result, out_path(args, "results.csv"));
    emit_method_bar_svg(result, out_path(args, "method_stability.svg"));
    if (write_rankings) {
        for (const auto& [method, ranks] : result.rankings) {
            for (std::size_t r = 0; r < ranks.size(); ++r)
                write_ranking_csv(out_path(args, "ranking_" + method + "_run" +
                                                     std::to_string(r) + ".csv"),
                                  ranks[r]);
        }
    }
    std::cout << "experiment finished in " << format_float(result.wall_seconds) << "s; "
              << result.records.size() << " metric rows\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable sample ranking under redundancy"};
    app.require_subcommand(1);

    CommonArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus with redundancy");
    add_common(gen, gen_args);

    CommonArgs mine_args;
    std::string mine_dataset, mine_vectors;
    auto* mine = app.add_subcommand("mine", "discover redundancy clusters");
    add_common(mine, mine_args);
    mine->add_option("--dataset", mine_dataset, "dataset JSONL");
    mine->add_option("--vectors", mine_vectors, "dense vectors CSV");

    CommonArgs score_args;
    std::string score_dataset, score_val;
    long long score_outer = 0;
    auto* score = app.add_subcommand("score", "train seeds and emit a score matrix");
    add_common(score, score_args);
    score->add_option("--dataset", score_dataset, "dataset JSONL")->required();
    score->add_option("--val", score_val, "validation JSONL (tracin)");
    score->add_option("--outer", score_outer, "outer run index for seed derivation");

    CommonArgs agg_args;
    std::string agg_scores, agg_clusters, agg_dataset, agg_vectors, agg_method;
    auto* agg = app.add_subcommand("aggregate", "turn a score matrix into a ranking");
    add_common(agg, agg_args);
    agg->add_option("--scores", agg_scores, "score matrix CSV")->required();
    agg->add_option("--clusters", agg_clusters, "cluster CSV");
    agg->add_option("--dataset", agg_dataset, "dataset JSONL for the diversity term");
    agg->add_option("--vectors", agg_vectors, "dense vectors CSV for the diversity term");
    agg->add_option("--method", agg_method, "method name (e.g. full_scarv)");

    CommonArgs eval_args;
    std::vector<std::string> eval_rankings;
    std::string eval_dataset;
    auto* eval = app.add_subcommand("eval", "stability metrics over rankings");
    add_common(eval, eval_args);
    eval->add_option("--ranking", eval_rankings, "ranking CSV (repeat for each run)");
    eval->add_option("--dataset", eval_dataset, "dataset JSONL with flip labels");

    CommonArgs frontier_args;
    auto* frontier = app.add_subcommand("frontier", "seed-budget frontier");
    add_common(frontier, frontier_args);

    CommonArgs dec_args;
    bool dec_rankings = false;
    auto* dec = app.add_subcommand("decompose", "method decomposition");
    add_common(dec, dec_args);
    dec->add_flag("--write-rankings", dec_rankings, "also write per-run ranking CSVs");

    CommonArgs rep_args;
    std::string rep_results, rep_frontier, rep_format = "csv,svg";
    auto* rep = app.add_subcommand("report", "emit CSV/SVG reports");
    add_common(rep, rep_args);
    rep->add_option("--results", rep_results, "results CSV");
    rep->add_option("--frontier", rep_frontier, "frontier CSV");
    rep->add_option("--format", rep_format, "csv,svg");

    CommonArgs exp_args;
    bool exp_rankings = false;
    auto* exp = app.add_subcommand("experiment", "full stability experiment");
    add_common(exp, exp_args);
    exp->add_flag("--write-rankings", exp_rankings, "also write per-run ranking CSVs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (mine->parsed()) return run_mine(mine_args, mine_dataset, mine_vectors);
        if (score->parsed()) return run_score(score_args, score_dataset, score_val, score_outer);
        if (agg->parsed())
            return run_aggregate(agg_args, agg_scores, agg_clusters, agg_dataset, agg_vectors,
                                 agg_method);
        if (eval->parsed()) return run_eval(eval_args, eval_rankings, eval_dataset);
        if (frontier->parsed()) return run_frontier_cmd(frontier_args);
        if (dec->parsed()) return run_decompose(dec_args, dec_rankings);
        if (rep->parsed()) return run_report(rep_args, rep_results, rep_frontier, rep_format);
        if (exp->parsed()) return run_experiment_cmd(exp_args, exp_rankings);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
