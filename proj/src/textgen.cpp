#include "scarv/textgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "scarv/rng.hpp"

namespace scarv {

std::vector<ExampleId> Dataset::ids() const {
    std::vector<ExampleId> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.id);
    return out;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.label);
    return out;
}

std::vector<std::string> Dataset::texts() const {
    std::vector<std::string> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.text);
    return out;
}

std::vector<bool> Dataset::flip_mask() const {
    std::vector<bool> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.flipped);
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::vector<std::string> corpus_vocabulary(const Dataset& d) {
    std::set<std::string> uniq;
    for (const auto& e : d.examples) {
        for (auto& t : tokenize(e.text)) uniq.insert(t);
    }
    return {uniq.begin(), uniq.end()};
}

Dataset make_synthetic_corpus(std::size_t n, std::size_t vocab_size, int class_count,
                              std::uint64_t seed) {
    if (n < 1) throw ConfigError("corpus size must be >= 1");
    if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
    if (class_count < 2) throw ConfigError("class_count must be >= 2");

    // Each class owns a contiguous keyword slice; the rest is shared
    // background vocabulary.
    std::size_t per_class = std::max<std::size_t>(
        1, vocab_size / (4 * static_cast<std::size_t>(class_count)));
    if (per_class * static_cast<std::size_t>(class_count) > vocab_size)
        per_class = vocab_size / static_cast<std::size_t>(class_count);
    if (per_class == 0)
        throw ConfigError("vocab_size too small for " + std::to_string(class_count) +
                          " classes");
    std::size_t background_start = per_class * static_cast<std::size_t>(class_count);

    Rng rng(seed);
    Dataset d;
    d.num_classes = class_count;
    d.examples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(class_count)));
        int len = rng.uniform_int(5, 30);
        // Per-example clarity: both classes span the full range from
        // keyword-dense (easy) to nearly ambiguous (hard), so example
        // difficulty is a property of the example rather than of the class.
        double clarity = rng.uniform();
        double p_own = 0.15 + 0.35 * clarity;
        double p_confuse = 0.04 + 0.10 * (1.0 - clarity);
        std::vector<std::string> tokens;
        tokens.reserve(static_cast<std::size_t>(len));
        for (int t = 0; t < len; ++t) {
            double roll = rng.uniform();
            std::size_t word;
            if (roll < p_own) {
                word = static_cast<std::size_t>(label) * per_class + rng.below(per_class);
            } else if (roll < p_own + p_confuse) {
                int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(class_count - 1)));
                if (other >= label) ++other;
                word = static_cast<std::size_t>(other) * per_class + rng.below(per_class);
            } else if (background_start < vocab_size) {
                word = background_start + rng.below(vocab_size - background_start);
            } else {
                word = rng.below(vocab_size);
            }
            tokens.push_back("w" + std::to_string(word));
        }
        Example e;
        e.id = static_cast<ExampleId>(i);
        e.text = join_tokens(tokens);
        e.label = label;
        d.examples.push_back(std::move(e));
    }
    return d;
}

std::string perturb_text(const std::string& text, const PerturbationConfig& cfg,
                         std::uint64_t seed) {
    std::vector<std::string> tokens = tokenize(text);
    if (tokens.empty()) throw ConfigError("perturb_text needs non-empty text");
    if (cfg.strength == 0.0) return text;

    Rng rng(seed);

    // word dropout; at least one token survives
    {
        std::vector<std::string> kept;
        for (auto& t : tokens) {
            if (!rng.bernoulli(cfg.dropout_prob())) kept.push_back(t);
        }
        if (kept.empty()) kept.push_back(tokens[rng.below(tokens.size())]);
        tokens = std::move(kept);
    }

    // local swaps of adjacent tokens
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (rng.bernoulli(cfg.swap_prob())) std::swap(tokens[i], tokens[i + 1]);
    }

    // word repetition
    {
        std::vector<std::string> out;
        out.reserve(tokens.size());
        for (auto& t : tokens) {
            out.push_back(t);
            if (rng.bernoulli(cfg.repeat_prob())) out.push_back(t);
        }
        tokens = std::move(out);
    }

    // token replacement; falls back to the sentence's own tokens when no
    // vocabulary is configured
    for (auto& t : tokens) {
        if (rng.bernoulli(cfg.replace_prob())) {
            if (!cfg.vocabulary.empty()) {
                t = cfg.vocabulary[rng.below(cfg.vocabulary.size())];
            } else {
                t = tokens[rng.below(tokens.size())];
            }
        }
    }

    // segment shuffle: split into 2-3 segments and permute them
    if (tokens.size() >= 2 && rng.bernoulli(cfg.segment_shuffle_prob())) {
        int want = rng.uniform_int(2, 3);
        std::size_t cuts_wanted = static_cast<std::size_t>(want - 1);
        std::vector<std::size_t> cut_pool(tokens.size() - 1);
        for (std::size_t i = 0; i < cut_pool.size(); ++i) cut_pool[i] = i + 1;
        rng.shuffle(cut_pool);
        std::vector<std::size_t> cuts(cut_pool.begin(),
                                      cut_pool.begin() +
                                          std::min(cuts_wanted, cut_pool.size()));
        std::sort(cuts.begin(), cuts.end());
        std::vector<std::vector<std::string>> segments;
        std::size_t start = 0;
        for (std::size_t c : cuts) {
            segments.emplace_back(tokens.begin() + start, tokens.begin() + c);
            start = c;
        }
        segments.emplace_back(tokens.begin() + start, tokens.end());
        rng.shuffle(segments);
        tokens.clear();
        for (auto& seg : segments)
            for (auto& t : seg) tokens.push_back(std::move(t));
    }

    return join_tokens(tokens);
}

std::pair<Dataset, ClusterMap> inject_near_duplicates(const Dataset& d, double rate,
                                                      const PerturbationConfig& cfg,
                                                      std::size_t cluster_size,
                                                      std::uint64_t seed) {
    if (rate < 0.0) throw ConfigError("redundancy rate must be >= 0");
    if (cluster_size < 2) throw ConfigError("cluster_size must be >= 2");
    const std::size_t n = d.size();
    const std::size_t copies = static_cast<std::size_t>(rate * static_cast<double>(n));
    const std::size_t copies_per_source = cluster_size - 1;
    if (copies > n * copies_per_source)
        throw ConfigError("redundancy rate " + std::to_string(rate) +
                          " exhausts sources at cluster_size " +
                          std::to_string(cluster_size));

    Dataset out = d;
    if (copies == 0) {
        auto all = out.ids();
        return {std::move(out), ClusterMap::singletons(all)};
    }

    Rng rng(seed);
    const std::size_t n_sources = (copies + copies_per_source - 1) / copies_per_source;
    auto source_idx = rng.sample_without_replacement(n, n_sources);

    ExampleId next_id = 0;
    for (const auto& e : d.examples) next_id = std::max(next_id, e.id);
    ++next_id;

    ClusterMap map;
    int next_cluster = 1;
    std::vector<int> source_cluster(n_sources);
    for (std::size_t s = 0; s < n_sources; ++s) {
        source_cluster[s] = next_cluster++;
        map.assign(d.examples[source_idx[s]].id, source_cluster[s]);
    }
    for (std::size_t j = 0; j < copies; ++j) {
        const Example& src = d.examples[source_idx[j % n_sources]];
        Example copy;
        copy.id = next_id++;
        copy.text = perturb_text(src.text, cfg, rng.next_u64());
        copy.label = src.label;
        copy.source_id = src.id;
        out.examples.push_back(std::move(copy));
        map.assign(out.examples.back().id, source_cluster[j % n_sources]);
    }
    for (const auto& e : out.examples) {
        if (!map.contains(e.id)) map.assign(e.id, next_cluster++);
    }
    return {std::move(out), std::move(map)};
}

Dataset inject_label_noise(const Dataset& d, double rate, std::uint64_t seed) {
    if (rate < 0.0 || rate > 1.0) throw ConfigError("noise rate must be in [0, 1]");
    Dataset out = d;
    for (auto& e : out.examples) e.flipped = false;
    const std::size_t flips = static_cast<std::size_t>(rate * static_cast<double>(d.size()));
    if (flips == 0) return out;
    if (d.num_classes < 2)
        throw DataError("cannot flip labels in a single-class dataset");
    Rng rng(seed);
    auto targets = rng.sample_without_replacement(d.size(), flips);
    for (std::size_t idx : targets) {
        Example& e = out.examples[idx];
        int other = static_cast<int>(rng.below(static_cast<std::uint64_t>(d.num_classes - 1)));
        if (other >= e.label) ++other;
        e.label = other;
        e.flipped = true;
    }
    return out;
}

}  // namespace scarv
