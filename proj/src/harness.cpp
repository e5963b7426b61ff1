#include "scarv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "scarv/io.hpp"
#include "scarv/parallel.hpp"
#include "scarv/rng.hpp"

namespace scarv {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t outer_run,
                          std::string_view role, std::uint64_t index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_byte = [&h](std::uint8_t b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    auto mix_u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    mix_u64(master);
    mix_u64(outer_run);
    for (char c : role) mix_byte(static_cast<std::uint8_t>(c));
    mix_byte(0);
    mix_u64(index);
    return splitmix64(h);
}

ScoreModel make_score_model(const ScoreModelSpec& spec, std::uint64_t seed) {
    if (spec.n < 2) throw ConfigError("score model needs n >= 2");
    if (spec.coverage < 0.0 || spec.coverage > 1.0)
        throw ConfigError("score model coverage must be in [0, 1]");
    if (spec.cluster_size < 2) throw ConfigError("score model cluster_size must be >= 2");
    if (spec.noise < 0.0) throw ConfigError("score model noise must be >= 0");

    ScoreModel model;
    model.noise = spec.noise;
    model.ids.resize(spec.n);
    std::iota(model.ids.begin(), model.ids.end(), 0);

    Rng rng(seed);
    std::vector<std::size_t> shuffled(spec.n);
    std::iota(shuffled.begin(), shuffled.end(), 0);
    rng.shuffle(shuffled);

    std::size_t covered = static_cast<std::size_t>(spec.coverage * static_cast<double>(spec.n));
    std::size_t n_clusters = covered / spec.cluster_size;
    std::vector<int> assignment(spec.n, 0);
    int next_cluster = 1;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
        for (std::size_t k = 0; k < spec.cluster_size; ++k)
            assignment[shuffled[pos++]] = next_cluster;
        ++next_cluster;
    }
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (assignment[i] == 0) assignment[i] = next_cluster++;
        model.map.assign(static_cast<ExampleId>(i), assignment[i]);
    }

    std::vector<double> cluster_effect(static_cast<std::size_t>(next_cluster), 0.0);
    for (std::size_t c = 1; c < cluster_effect.size(); ++c)
        cluster_effect[c] = spec.cluster_effect * rng.normal();
    model.base.resize(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double quality = spec.quality_scale * rng.normal();
        model.base[i] = quality + cluster_effect[static_cast<std::size_t>(assignment[i])];
    }
    return model;
}

ScoreMatrix sample_score_columns(const ScoreModel& model,
                                 std::span<const std::uint64_t> seeds) {
    const std::size_t n = model.ids.size();
    const std::size_t r_count = seeds.size();
    std::vector<double> values(n * r_count);
    for (std::size_t r = 0; r < r_count; ++r) {
        Rng rng(seeds[r]);
        for (std::size_t i = 0; i < n; ++i)
            values[i * r_count + r] = model.base[i] + model.noise * rng.normal();
    }
    return ScoreMatrix(model.ids, {seeds.begin(), seeds.end()}, std::move(values));
}

void ExperimentConfig::validate() const {
    int sources = (synthetic ? 1 : 0) + (dataset_path.empty() ? 0 : 1) + (score_model ? 1 : 0);
    if (sources != 1)
        throw ConfigError("exactly one data source (synthetic, dataset or score model) "
                          "must be configured");
    if (score_model && (redundancy || !cluster_csv.empty() || noise_rate > 0.0))
        throw ConfigError("the score-model source takes its clusters from the model spec");
    if (redundancy && !cluster_csv.empty())
        throw ConfigError("configure either injected redundancy or an imported cluster "
                          "map, not both");
    if (methods.empty()) throw ConfigError("no methods configured");
    if (seeds_per_run < 1) throw ConfigError("seeds_per_run must be >= 1");
    if (outer_runs < 2) throw ConfigError("stability metrics need outer_runs >= 2");
    for (double b : budgets) {
        if (b <= 0.0 || b > 1.0) throw ConfigError("budgets must be in (0, 1]");
    }
    if (noise_rate < 0.0 || noise_rate > 1.0) throw ConfigError("noise_rate must be in [0, 1]");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
        throw ConfigError("val_fraction must be in [0, 1)");
    if (topk < 1) throw ConfigError("topk must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    scarv.validate();
}

namespace {

std::string canonical_string(const ExperimentConfig& cfg) {
    std::ostringstream ss;
    if (cfg.synthetic) {
        ss << "source=synthetic n=" << cfg.synthetic->n << " vocab=" << cfg.synthetic->vocab_size
           << " classes=" << cfg.synthetic->class_count << " heldout=" << cfg.synthetic->heldout;
    } else if (cfg.score_model) {
        ss << "source=score_model n=" << cfg.score_model->n
           << " coverage=" << cfg.score_model->coverage
           << " cluster_size=" << cfg.score_model->cluster_size
           << " quality=" << cfg.score_model->quality_scale
           << " effect=" << cfg.score_model->cluster_effect
           << " noise=" << cfg.score_model->noise;
    } else {
        ss << "source=jsonl path=" << cfg.dataset_path;
    }
    if (cfg.redundancy) {
        ss << " redundancy=" << cfg.redundancy->rate << "/" << cfg.redundancy->strength << "/"
           << cfg.redundancy->cluster_size;
    }
    if (!cfg.cluster_csv.empty()) ss << " cluster_csv=" << cfg.cluster_csv;
    ss << " noise=" << cfg.noise_rate << " proxy=" << proxy_to_string(cfg.proxy) << " methods=";
    for (const auto& m : cfg.methods) ss << m.name() << ";";
    ss << " R=" << cfg.seeds_per_run << " outer=" << cfg.outer_runs
       << " master=" << cfg.master_seed << " budgets=";
    for (double b : cfg.budgets) ss << b << ";";
    ss << " topk=" << cfg.topk << " val_fraction=" << cfg.val_fraction
       << " mine=" << cfg.mine_threshold << " w=" << cfg.scarv.diversity_weight
       << " k=" << cfg.scarv.knn_k << " A=" << static_cast<int>(cfg.scarv.cluster_agg)
       << " B=" << static_cast<int>(cfg.scarv.alloc) << " lambda=" << cfg.scarv.shrink_lambda
       << " agg=" << cross_seed_to_string(cfg.scarv.cross_seed)
       << " T=" << cfg.scarv.softmax_temperature << " epochs=" << cfg.train.epochs
       << " batch=" << cfg.train.batch << " lr=" << cfg.train.learning_rate
       << " l2=" << cfg.train.l2 << " init=" << cfg.train.init_scale
       << " ckpt=" << cfg.train.checkpoints << " min_df=" << cfg.tfidf.min_df
       << " max_features=" << cfg.tfidf.max_features;
    return ss.str();
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
    std::string s = canonical_string(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig experiment_config_from(const KeyValueConfig& kv) {
    ExperimentConfig cfg;
    std::string source = kv.get_string("source", kv.has("dataset") ? "jsonl" : "synthetic");
    if (source == "synthetic") {
        SyntheticSpec spec;
        spec.n = static_cast<std::size_t>(kv.get_int("n", static_cast<long long>(spec.n)));
        spec.vocab_size = static_cast<std::size_t>(
            kv.get_int("vocab_size", static_cast<long long>(spec.vocab_size)));
        spec.class_count = static_cast<int>(kv.get_int("class_count", spec.class_count));
        spec.heldout = static_cast<std::size_t>(
            kv.get_int("heldout", static_cast<long long>(spec.heldout)));
        cfg.synthetic = spec;
    } else if (source == "jsonl") {
        cfg.dataset_path = kv.get_string("dataset", "");
        if (cfg.dataset_path.empty()) throw ConfigError("jsonl source needs dataset = <path>");
    } else if (source == "score_model") {
        ScoreModelSpec spec;
        spec.n = static_cast<std::size_t>(kv.get_int("model_n", static_cast<long long>(spec.n)));
        spec.coverage = kv.get_double("model_coverage", spec.coverage);
        spec.cluster_size = static_cast<std::size_t>(
            kv.get_int("model_cluster_size", static_cast<long long>(spec.cluster_size)));
        spec.quality_scale = kv.get_double("model_quality_scale", spec.quality_scale);
        spec.cluster_effect = kv.get_double("model_cluster_effect", spec.cluster_effect);
        spec.noise = kv.get_double("model_noise", spec.noise);
        cfg.score_model = spec;
    } else {
        throw ConfigError("unknown source '" + source + "'");
    }

    if (kv.has("redundancy_rate")) {
        RedundancySpec spec;
        spec.rate = kv.get_double("redundancy_rate", spec.rate);
        spec.strength = kv.get_double("perturbation_strength", spec.strength);
        spec.cluster_size = static_cast<std::size_t>(
            kv.get_int("cluster_size", static_cast<long long>(spec.cluster_size)));
        cfg.redundancy = spec;
    }
    cfg.cluster_csv = kv.get_string("cluster_csv", "");
    cfg.noise_rate = kv.get_double("noise_rate", cfg.noise_rate);
    cfg.proxy = proxy_from_string(kv.get_string("proxy", "loss"));
    for (const auto& name :
         kv.get_string_list("methods", {"bare", "seed_only_mean", "full_scarv"}))
        cfg.methods.push_back(MethodKind::parse(name));
    cfg.seeds_per_run = static_cast<std::size_t>(
        kv.get_int("seeds_per_run", static_cast<long long>(cfg.seeds_per_run)));
    cfg.outer_runs = static_cast<std::size_t>(
        kv.get_int("outer_runs", static_cast<long long>(cfg.outer_runs)));
    cfg.master_seed = static_cast<std::uint64_t>(
        kv.get_int("master_seed", static_cast<long long>(cfg.master_seed)));
    cfg.budgets = kv.get_double_list("budgets", cfg.budgets);
    cfg.topk = static_cast<std::size_t>(kv.get_int("topk", static_cast<long long>(cfg.topk)));
    cfg.val_fraction = kv.get_double("val_fraction", cfg.val_fraction);
    cfg.mine_threshold = kv.get_double("mine_threshold", cfg.mine_threshold);
    cfg.jobs = static_cast<int>(kv.get_int("jobs", cfg.jobs));

    cfg.scarv.diversity_weight = kv.get_double("diversity_weight", cfg.scarv.diversity_weight);
    cfg.scarv.knn_k = static_cast<std::size_t>(
        kv.get_int("knn_k", static_cast<long long>(cfg.scarv.knn_k)));
    cfg.scarv.cluster_agg = cluster_agg_from_string(kv.get_string("cluster_agg", "mean"));
    cfg.scarv.alloc = alloc_from_string(kv.get_string("alloc", "shrink"));
    cfg.scarv.shrink_lambda = kv.get_double("shrink_lambda", cfg.scarv.shrink_lambda);
    cfg.scarv.cross_seed = cross_seed_from_string(kv.get_string("cross_seed", "median"));
    cfg.scarv.softmax_temperature =
        kv.get_double("softmax_temperature", cfg.scarv.softmax_temperature);

    cfg.train.epochs = static_cast<int>(kv.get_int("epochs", cfg.train.epochs));
    cfg.train.batch = static_cast<int>(kv.get_int("batch", cfg.train.batch));
    cfg.train.learning_rate = kv.get_double("learning_rate", cfg.train.learning_rate);
    cfg.train.l2 = kv.get_double("l2", cfg.train.l2);
    cfg.train.init_scale = kv.get_double("init_scale", cfg.train.init_scale);
    cfg.train.checkpoints = static_cast<int>(kv.get_int("checkpoints", cfg.train.checkpoints));

    cfg.tfidf.min_df = static_cast<std::size_t>(
        kv.get_int("min_df", static_cast<long long>(cfg.tfidf.min_df)));
    cfg.tfidf.max_features = static_cast<std::size_t>(
        kv.get_int("max_features", static_cast<long long>(cfg.tfidf.max_features)));
    return cfg;
}

double ExperimentResult::value(const std::string& method, const std::string& metric,
                               int outer_run) const {
    for (const auto& rec : records) {
        if (rec.outer_run == outer_run && rec.method == method && rec.metric == metric)
            return rec.value;
    }
    throw DataError("no record for method '" + method + "', metric '" + metric +
                    "', run " + std::to_string(outer_run));
}

bool ExperimentResult::has_value(const std::string& method, const std::string& metric,
                                 int outer_run) const {
    for (const auto& rec : records) {
        if (rec.outer_run == outer_run && rec.method == method && rec.metric == metric)
            return true;
    }
    return false;
}

std::vector<double> ExperimentResult::per_run_values(const std::string& method,
                                                     const std::string& metric) const {
    std::vector<std::pair<int, double>> found;
    for (const auto& rec : records) {
        if (rec.outer_run >= 0 && rec.method == method && rec.metric == metric)
            found.push_back({rec.outer_run, rec.value});
    }
    std::sort(found.begin(), found.end());
    std::vector<double> out;
    out.reserve(found.size());
    for (const auto& [_, v] : found) out.push_back(v);
    return out;
}

namespace {

struct PreparedData {
    Dataset train;
    std::vector<ExampleId> ids;
    std::vector<int> labels;
    ClusterMap structural_map;  // injected or imported; all-singleton otherwise
    bool has_oracle = false;
    ClusterMap approx_map;
    bool has_approx = false;
    TfidfModel tfidf;
    FeatureSet features;
    std::vector<double> diversity;
    FeatureSet heldout_x;
    std::vector<int> heldout_y;
    bool has_heldout = false;
    std::vector<bool> flips;
    std::size_t flip_count = 0;
};

PreparedData prepare_data(const ExperimentConfig& cfg) {
    PreparedData prep;
    Dataset heldout;

    if (cfg.synthetic) {
        const auto& spec = *cfg.synthetic;
        prep.train = make_synthetic_corpus(spec.n, spec.vocab_size, spec.class_count,
                                           derive_seed(cfg.master_seed, 0, "corpus", 0));
        if (spec.heldout > 0) {
            heldout = make_synthetic_corpus(spec.heldout, spec.vocab_size, spec.class_count,
                                            derive_seed(cfg.master_seed, 0, "heldout", 0));
            prep.has_heldout = true;
        }
    } else {
        Dataset all = read_dataset_jsonl(cfg.dataset_path);
        std::size_t val_n =
            static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(all.size()));
        if (val_n > 0) {
            Rng rng(derive_seed(cfg.master_seed, 0, "valsplit", 0));
            auto picks = rng.sample_without_replacement(all.size(), val_n);
            std::vector<bool> is_val(all.size(), false);
            for (std::size_t i : picks) is_val[i] = true;
            heldout.num_classes = all.num_classes;
            prep.train.num_classes = all.num_classes;
            for (std::size_t i = 0; i < all.size(); ++i) {
                (is_val[i] ? heldout : prep.train).examples.push_back(all.examples[i]);
            }
            prep.has_heldout = true;
        } else {
            prep.train = std::move(all);
        }
    }

    if (cfg.redundancy) {
        PerturbationConfig pc;
        pc.strength = cfg.redundancy->strength;
        pc.vocabulary = corpus_vocabulary(prep.train);
        auto [augmented, injected] =
            inject_near_duplicates(prep.train, cfg.redundancy->rate, pc,
                                   cfg.redundancy->cluster_size,
                                   derive_seed(cfg.master_seed, 0, "redundancy", 0));
        prep.train = std::move(augmented);
        prep.structural_map = std::move(injected);
        prep.has_oracle = true;
    }
    if (cfg.noise_rate > 0.0) {
        prep.train = inject_label_noise(prep.train, cfg.noise_rate,
                                        derive_seed(cfg.master_seed, 0, "noise", 0));
    }

    prep.ids = prep.train.ids();
    prep.labels = prep.train.labels();
    prep.flips = prep.train.flip_mask();
    for (bool f : prep.flips) prep.flip_count += f ? 1 : 0;

    auto texts = prep.train.texts();
    auto [tfidf, features] = tfidf_fit_transform(texts, cfg.tfidf);
    prep.tfidf = std::move(tfidf);
    prep.features = std::move(features);
    prep.diversity = knn_mean_cosine_distance(prep.features, cfg.scarv.knn_k);

    if (!cfg.cluster_csv.empty()) {
        prep.structural_map = read_cluster_csv(cfg.cluster_csv).completed(prep.ids);
        prep.has_oracle = true;
    } else if (!prep.has_oracle) {
        prep.structural_map = ClusterMap::singletons(prep.ids);
    }

    if (prep.has_heldout) {
        prep.heldout_x = prep.tfidf.transform_all(heldout.texts());
        prep.heldout_y = heldout.labels();
    }
    return prep;
}

void ensure_approx_map(PreparedData& prep, const ExperimentConfig& cfg) {
    if (prep.has_approx) return;
    auto pairs = tfidf_cosine_pairs(prep.ids, prep.features.rows, cfg.mine_threshold);
    prep.approx_map = threshold_clusters(prep.ids, pairs, cfg.mine_threshold);
    prep.has_approx = true;
}

const ClusterMap& map_for_method(const MethodKind& kind, PreparedData& prep,
                                 const ExperimentConfig& cfg) {
    switch (kind.family) {
        case MethodFamily::DedupOracle:
            if (!prep.has_oracle)
                throw ConfigError("dedup_oracle needs an injected or imported cluster map");
            return prep.structural_map;
        case MethodFamily::DedupApprox:
            ensure_approx_map(prep, cfg);
            return prep.approx_map;
        default:
            return prep.structural_map;
    }
}

/// Score matrices for every outer run, all (run, seed) trainings flattened
/// into one parallel pool; results are placed by index so scheduling can
/// not change them.
std::vector<ScoreMatrix> trained_matrices(const ExperimentConfig& cfg,
                                          const PreparedData& prep, std::size_t r_count) {
    const std::size_t n = prep.ids.size();
    const std::size_t total = cfg.outer_runs * r_count;
    ValBatch val{prep.heldout_x, prep.heldout_y};
    const ValBatch* val_ptr = prep.has_heldout ? &val : nullptr;
    if (cfg.proxy == ProxyKind::TracIn && !prep.has_heldout)
        throw ConfigError("tracin proxy needs a held-out validation batch");

    std::vector<std::vector<double>> columns(total);
    parallel_for(total, cfg.jobs, [&](std::size_t t) {
        const std::size_t outer = t / r_count;
        const std::size_t j = t % r_count;
        std::uint64_t seed = derive_seed(cfg.master_seed, outer, "score", j);
        LinearModel model =
            train_logreg(prep.features, prep.labels, seed, cfg.train, prep.train.num_classes);
        columns[t] = score_proxy(cfg.proxy, model, prep.features, prep.labels, val_ptr);
    });

    std::vector<ScoreMatrix> matrices;
    matrices.reserve(cfg.outer_runs);
    for (std::size_t outer = 0; outer < cfg.outer_runs; ++outer) {
        std::vector<std::uint64_t> seeds(r_count);
        std::vector<double> values(n * r_count);
        for (std::size_t j = 0; j < r_count; ++j) {
            seeds[j] = derive_seed(cfg.master_seed, outer, "score", j);
            const auto& col = columns[outer * r_count + j];
            for (std::size_t i = 0; i < n; ++i) values[i * r_count + j] = col[i];
        }
        matrices.emplace_back(prep.ids, std::move(seeds), std::move(values));
    }
    return matrices;
}

std::vector<ScoreMatrix> model_matrices(const ExperimentConfig& cfg, const ScoreModel& model,
                                        std::size_t r_count) {
    std::vector<ScoreMatrix> matrices;
    matrices.reserve(cfg.outer_runs);
    for (std::size_t outer = 0; outer < cfg.outer_runs; ++outer) {
        std::vector<std::uint64_t> seeds(r_count);
        for (std::size_t j = 0; j < r_count; ++j)
            seeds[j] = derive_seed(cfg.master_seed, outer, "score", j);
        matrices.push_back(sample_score_columns(model, seeds));
    }
    return matrices;
}

ScoreMatrix slice_columns(const ScoreMatrix& m, std::size_t r_count) {
    std::vector<std::uint64_t> seeds(m.seed_labels().begin(),
                                     m.seed_labels().begin() + static_cast<long>(r_count));
    std::vector<double> values(m.n_examples() * r_count);
    for (std::size_t i = 0; i < m.n_examples(); ++i)
        for (std::size_t r = 0; r < r_count; ++r) values[i * r_count + r] = m.at(i, r);
    return ScoreMatrix(m.example_ids(), std::move(seeds), std::move(values));
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Retained-subset utility with memoization: identical subsets across
/// methods/runs retrain once. One fixed retrain seed for the whole
/// experiment, so utility spread reflects ranking variation only.
class SubsetUtility {
public:
    SubsetUtility(const ExperimentConfig& cfg, const PreparedData& prep)
        : cfg_(cfg), prep_(prep),
          retrain_seed_(derive_seed(cfg.master_seed, 0, "retain", 0)) {
        for (std::size_t i = 0; i < prep.ids.size(); ++i) row_of_[prep.ids[i]] = i;
    }

    double utility(std::vector<ExampleId> subset) {
        std::sort(subset.begin(), subset.end());
        auto it = cache_.find(subset);
        if (it != cache_.end()) return it->second;
        FeatureSet x;
        x.dim = prep_.features.dim;
        x.rows.reserve(subset.size());
        std::vector<int> y;
        y.reserve(subset.size());
        for (ExampleId id : subset) {
            std::size_t row = row_of_.at(id);
            x.rows.push_back(prep_.features.rows[row]);
            y.push_back(prep_.labels[row]);
        }
        LinearModel m = train_logreg(x, y, retrain_seed_, cfg_.train, prep_.train.num_classes);
        double acc = accuracy(m, prep_.heldout_x, prep_.heldout_y);
        cache_.emplace(std::move(subset), acc);
        return acc;
    }

private:
    const ExperimentConfig& cfg_;
    const PreparedData& prep_;
    std::uint64_t retrain_seed_;
    std::unordered_map<ExampleId, std::size_t> row_of_;
    std::map<std::vector<ExampleId>, double> cache_;
};

std::vector<double> scores_by_position(const Ranking& r,
                                       const std::vector<ExampleId>& ids) {
    std::unordered_map<ExampleId, double> by_id;
    by_id.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) by_id[r.order[i]] = r.scores[i];
    std::vector<double> out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = by_id.at(ids[i]);
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    auto start = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.config_hash = config_hash(cfg);

    std::optional<PreparedData> prep;
    std::optional<ScoreModel> model;
    std::vector<ScoreMatrix> matrices;
    const ClusterMap* model_map = nullptr;
    std::span<const double> diversity;

    if (cfg.score_model) {
        model = make_score_model(*cfg.score_model, derive_seed(cfg.master_seed, 0, "quality", 0));
        matrices = model_matrices(cfg, *model, cfg.seeds_per_run);
        model_map = &model->map;
    } else {
        prep = prepare_data(cfg);
        matrices = trained_matrices(cfg, *prep, cfg.seeds_per_run);
        diversity = prep->diversity;
    }

    const std::vector<ExampleId>& ids = matrices.front().example_ids();
    const std::size_t n = ids.size();

    for (const MethodKind& kind : cfg.methods) {
        const ClusterMap& map =
            cfg.score_model ? *model_map : map_for_method(kind, *prep, cfg);
        std::vector<Ranking> ranks;
        ranks.reserve(cfg.outer_runs);
        for (std::size_t outer = 0; outer < cfg.outer_runs; ++outer)
            ranks.push_back(run_method(kind, matrices[outer], map, diversity, cfg.scarv));
        result.rankings[kind.name()] = std::move(ranks);
    }

    std::optional<SubsetUtility> utility;
    if (prep && prep->has_heldout) utility.emplace(cfg, *prep);

    for (const MethodKind& kind : cfg.methods) {
        const std::string& name = kind.name();
        const auto& ranks = result.rankings.at(name);
        auto add = [&](int outer, const std::string& metric, double value) {
            result.records.push_back({outer, name, metric, value});
        };

        add(-1, "stability", pairwise_stability(ranks));
        const std::size_t k = std::min(cfg.topk, n);
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

        for (double budget : cfg.budgets) {
            const std::string tag = "@" + format_float(budget);
            add(-1, "subset_overlap" + tag, subset_overlap(ranks, budget));
            if (utility) {
                std::size_t keep =
                    static_cast<std::size_t>(budget * static_cast<double>(n));
                if (keep == 0) throw ConfigError("budget yields an empty retained subset");
                std::vector<double> utils;
                utils.reserve(ranks.size());
                for (std::size_t outer = 0; outer < ranks.size(); ++outer) {
                    std::vector<ExampleId> subset(ranks[outer].order.begin(),
                                                  ranks[outer].order.begin() +
                                                      static_cast<long>(keep));
                    double u = utility->utility(std::move(subset));
                    utils.push_back(u);
                    add(static_cast<int>(outer), "utility" + tag, u);
                }
                add(-1, "mean_utility" + tag, mean_of(utils));
                add(-1, "selection_gap" + tag, selection_gap(utils));
            }
        }

        if (prep && prep->flip_count > 0) {
            const std::size_t k_sus = prep->flip_count;
            double overlap_sum = 0.0;
            std::size_t overlap_pairs = 0;
            for (std::size_t i = 0; i < ranks.size(); ++i) {
                for (std::size_t j = i + 1; j < ranks.size(); ++j) {
                    overlap_sum += topk_jaccard(ranks[i], ranks[j], k_sus, RankEnd::Bottom);
                    ++overlap_pairs;
                }
            }
            add(-1, "suspicious_overlap", overlap_sum / static_cast<double>(overlap_pairs));

            std::vector<double> aurocs, precs, recs;
            for (std::size_t outer = 0; outer < ranks.size(); ++outer) {
                auto scores = scores_by_position(ranks[outer], prep->ids);
                std::vector<double> suspicious(scores.size());
                for (std::size_t i = 0; i < scores.size(); ++i) suspicious[i] = -scores[i];
                double a = auroc(suspicious, prep->flips);
                auto [p, r] = precision_recall_at_k(suspicious, prep->ids, prep->flips, k_sus);
                add(static_cast<int>(outer), "auroc", a);
                add(static_cast<int>(outer), "precision_at_k", p);
                add(static_cast<int>(outer), "recall_at_k", r);
                aurocs.push_back(a);
                precs.push_back(p);
                recs.push_back(r);
            }
            add(-1, "mean_auroc", mean_of(aurocs));
            add(-1, "mean_precision_at_k", mean_of(precs));
            add(-1, "mean_recall_at_k", mean_of(recs));
        }
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<FrontierRow> run_frontier(const ExperimentConfig& cfg,
                                      std::span<const std::size_t> r_list) {
    if (r_list.empty()) throw ConfigError("frontier needs a non-empty R list");
    for (std::size_t r : r_list) {
        if (r < 1) throw ConfigError("frontier R values must be >= 1");
    }
    ExperimentConfig base = cfg;
    base.methods = {MethodKind{MethodFamily::FullScarv}};
    base.validate();

    const std::size_t r_max = *std::max_element(r_list.begin(), r_list.end());

    std::optional<PreparedData> prep;
    std::optional<ScoreModel> model;
    std::vector<ScoreMatrix> matrices;
    const ClusterMap* map = nullptr;
    std::span<const double> diversity;
    if (cfg.score_model) {
        model = make_score_model(*cfg.score_model, derive_seed(cfg.master_seed, 0, "quality", 0));
        matrices = model_matrices(base, *model, r_max);
        map = &model->map;
    } else {
        prep = prepare_data(base);
        matrices = trained_matrices(base, *prep, r_max);
        map = &prep->structural_map;
        diversity = prep->diversity;
    }

    const std::vector<MethodKind> methods = {
        {MethodFamily::FullScarv},
        {MethodFamily::SeedOnly, CrossSeedRule::Mean},
        {MethodFamily::SeedOnly, CrossSeedRule::Median},
        {MethodFamily::SeedOnly, CrossSeedRule::Borda},
    };

    std::vector<FrontierRow> rows;
    for (std::size_t r_count : r_list) {
        std::vector<ScoreMatrix> sliced;
        sliced.reserve(matrices.size());
        for (const auto& m : matrices) sliced.push_back(slice_columns(m, r_count));

        FrontierRow row;
        row.seeds = r_count;
        for (const auto& kind : methods) {
            std::vector<Ranking> ranks;
            ranks.reserve(sliced.size());
            for (const auto& m : sliced)
                ranks.push_back(run_method(kind, m, *map, diversity, cfg.scarv));
            double stab = pairwise_stability(ranks);
            switch (kind.family) {
                case MethodFamily::FullScarv: row.full_scarv = stab; break;
                default:
                    if (kind.seed_rule == CrossSeedRule::Mean) row.seed_mean = stab;
                    else if (kind.seed_rule == CrossSeedRule::Median) row.seed_median = stab;
                    else row.seed_borda = stab;
            }
        }
        row.best_upper = row.seed_mean;
        row.winner = CrossSeedRule::Mean;
        if (row.seed_median > row.best_upper) {
            row.best_upper = row.seed_median;
            row.winner = CrossSeedRule::Median;
        }
        if (row.seed_borda > row.best_upper) {
            row.best_upper = row.seed_borda;
            row.winner = CrossSeedRule::Borda;
        }
        row.delta_best = row.full_scarv - row.best_upper;
        rows.push_back(row);
    }
    return rows;
}

ExperimentResult run_decomposition(const ExperimentConfig& cfg) {
    ExperimentConfig decomposed = cfg;
    decomposed.methods = {
        {MethodFamily::Bare},
        {MethodFamily::ClusterOnly},
        {MethodFamily::SeedOnly, CrossSeedRule::Mean},
        {MethodFamily::SeedOnly, CrossSeedRule::Median},
        {MethodFamily::SeedOnly, CrossSeedRule::Borda},
        {MethodFamily::FullScarv},
        {MethodFamily::DedupApprox},
        {MethodFamily::DedupOracle},
    };
    if (!decomposed.redundancy && decomposed.cluster_csv.empty())
        throw ConfigError("decomposition needs an injected or imported cluster map "
                          "for dedup_oracle");
    return run_experiment(decomposed);
}

std::vector<double> paired_deltas(const ExperimentResult& result, const std::string& method_a,
                                  const std::string& method_b, const std::string& metric) {
    auto a = result.per_run_values(method_a, metric);
    auto b = result.per_run_values(method_b, metric);
    if (a.empty() || a.size() != b.size())
        throw DataError("cannot pair metric '" + metric + "' between '" + method_a +
                        "' and '" + method_b + "'");
    std::vector<double> deltas(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) deltas[i] = a[i] - b[i];
    return deltas;
}

void write_results_csv(const ExperimentResult& result, const std::string& path) {
    if (result.records.empty()) throw DataError("refusing to write an empty results file");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "config_hash,outer_run,method,metric,value\n";
    for (const auto& rec : result.records) {
        out << result.config_hash << ',' << rec.outer_run << ',' << rec.method << ','
            << rec.metric << ',' << format_float(rec.value) << '\n';
    }
}

ExperimentResult read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path + " for reading");
    std::string line;
    if (!std::getline(in, line) || line != "config_hash,outer_run,method,metric,value")
        throw DataError(path + ": expected results CSV header");
    ExperimentResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string hash, outer, method, metric, value;
        if (!std::getline(ss, hash, ',') || !std::getline(ss, outer, ',') ||
            !std::getline(ss, method, ',') || !std::getline(ss, metric, ',') ||
            !std::getline(ss, value))
            throw DataError(path + ":" + std::to_string(line_no) + ": bad row");
        if (result.config_hash.empty()) result.config_hash = hash;
        try {
            result.records.push_back({std::stoi(outer), method, metric, std::stod(value)});
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad numeric field");
        }
    }
    if (result.records.empty()) throw DataError(path + ": no result rows");
    return result;
}

void write_frontier_csv(std::span<const FrontierRow> rows, const std::string& path) {
    if (rows.empty()) throw DataError("refusing to write an empty frontier file");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "R,full_scarv,seed_mean,seed_median,seed_borda,best_upper,delta_best,winner\n";
    for (const auto& r : rows) {
        out << r.seeds << ',' << format_float(r.full_scarv) << ',' << format_float(r.seed_mean)
            << ',' << format_float(r.seed_median) << ',' << format_float(r.seed_borda) << ','
            << format_float(r.best_upper) << ',' << format_float(r.delta_best) << ','
            << cross_seed_to_string(r.winner) << '\n';
    }
}

std::vector<FrontierRow> read_frontier_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path + " for reading");
    std::string line;
    if (!std::getline(in, line) ||
        line != "R,full_scarv,seed_mean,seed_median,seed_borda,best_upper,delta_best,winner")
        throw DataError(path + ": expected frontier CSV header");
    std::vector<FrontierRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 8 fields");
        FrontierRow row;
        try {
            row.seeds = static_cast<std::size_t>(std::stoull(fields[0]));
            row.full_scarv = std::stod(fields[1]);
            row.seed_mean = std::stod(fields[2]);
            row.seed_median = std::stod(fields[3]);
            row.seed_borda = std::stod(fields[4]);
            row.best_upper = std::stod(fields[5]);
            row.delta_best = std::stod(fields[6]);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad numeric field");
        }
        row.winner = cross_seed_from_string(fields[7]);
        rows.push_back(row);
    }
    if (rows.empty()) throw DataError(path + ": no frontier rows");
    return rows;
}

}  // namespace scarv
