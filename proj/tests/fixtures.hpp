#ifndef NGRAMLR_TESTS_FIXTURES_HPP
#define NGRAMLR_TESTS_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ngramlr/counts.hpp"
#include "ngramlr/synthetic.hpp"

namespace fixtures {

/// A bigram model holding exactly one scored N-gram ("x","y") with the given
/// counts; unit counts are derived so they dominate the pair counts.
inline ngramlr::FrequencyModel single_bigram_model(std::uint64_t c_de, std::uint64_t c_nu,
                                                   std::uint64_t n_de, std::uint64_t n_nu) {
    ngramlr::FrequencyModel model;
    model.order = 2;
    model.n_de = n_de;
    model.n_nu = n_nu;
    model.de_lower.resize(1);
    model.nu_lower.resize(1);
    const ngramlr::NGram w{"x", "y"};
    if (c_de > 0) model.de_counts[w] = c_de;
    if (c_nu > 0) model.nu_counts[w] = c_nu;
    model.de_unit_counts[{1, "x"}] = 3 * c_de + 7;
    model.nu_unit_counts[{1, "x"}] = 2 * c_nu + 3;
    model.de_unit_counts[{2, "y"}] = 2 * c_de + 11;
    model.nu_unit_counts[{2, "y"}] = c_nu + 5;
    model.vocab.insert("x");
    model.vocab.insert("y");
    return model;
}

/// Draws a plausible random count configuration: totals in [1e4, 1e8] and
/// [1e2, 1e5], pair counts from 0 up to a few thousand.
struct RandomCounts {
    std::uint64_t n_de, n_nu, c_de, c_nu;
};

inline RandomCounts random_counts(std::mt19937_64& rng, bool allow_zero = true) {
    auto below = [&](std::uint64_t n) { return rng() % n; };
    RandomCounts counts;
    counts.n_de = 10'000 + below(100'000'000);
    counts.n_nu = 100 + below(100'000);
    counts.c_de = allow_zero && below(4) == 0 ? 0 : 1 + below(5000);
    const std::uint64_t c_nu_cap = std::min<std::uint64_t>(counts.n_nu, 2000);
    counts.c_nu = allow_zero && below(3) == 0 ? 0 : 1 + below(c_nu_cap);
    return counts;
}

inline double random_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Log-uniform draw over [1e-9, 1e-1].
inline double random_lambda(std::mt19937_64& rng) {
    return std::pow(10.0, -9.0 + 8.0 * random_unit(rng));
}

/// A small annotated corpus with a couple of entity types; deterministic.
inline std::vector<ngramlr::Document> small_corpus(std::uint64_t seed, std::size_t n_docs = 40,
                                                   std::size_t vocab = 20) {
    ngramlr::GeneratorOptions opt;
    opt.seed = seed;
    opt.vocab_size = vocab;
    opt.n_docs = n_docs;
    opt.planted = {
        {{"xto", "xMr."}, "PER", 0.9},
        {{"xcourt", "xin"}, "LOC", 0.8},
    };
    opt.spontaneous_entity_rate = 0.01;
    auto split = ngramlr::generate_synthetic(opt);
    std::vector<ngramlr::Document> docs;
    for (auto* part : {&split.train, &split.valid, &split.test}) {
        for (auto& doc : *part) docs.push_back(std::move(doc));
    }
    return docs;
}

inline std::vector<ngramlr::Document> pool_all(ngramlr::SplitSet split) {
    std::vector<ngramlr::Document> docs;
    for (auto* part : {&split.train, &split.valid, &split.test}) {
        for (auto& doc : *part) docs.push_back(std::move(doc));
    }
    return docs;
}

/// Bigram corpus pair for the zero-frequency experiments. Training plants
/// "diagonal" entity contexts (xu_i, yv_i); the test pool additionally
/// plants off-diagonal recombinations of warm words, which therefore occur
/// in test but never in training. Distractor pairs recombine the hot words:
/// their units are frequent near entities but the pairs themselves are
/// rarely followed by one, and they occur as plain text in training, which
/// is exactly the evidence the dependency term uses against them.
struct ZeroFreqHarness {
    std::vector<ngramlr::Document> train_docs;
    std::vector<ngramlr::Document> test_docs;
    std::vector<ngramlr::NGram> unseen_true;
    ngramlr::EntityTypeFilter filter{"PER"};
};

inline ZeroFreqHarness zero_freq_harness(std::size_t train_docs = 260, std::size_t test_docs = 120) {
    const std::size_t n_diag = 34;
    const std::size_t n_hot = 10;
    auto word = [](const char* prefix, std::size_t i) {
        return std::string(prefix) + std::to_string(i);
    };

    std::vector<ngramlr::PlantedContext> train_planted;
    for (std::size_t i = 0; i < n_diag; ++i) {
        train_planted.push_back({{word("xu", i), word("yv", i)}, "PER", 0.9});
    }
    for (std::size_t i = 0; i < n_hot; ++i) { // hot diagonal pairs planted 3x as often
        train_planted.push_back({{word("xu", i), word("yv", i)}, "PER", 0.9});
        train_planted.push_back({{word("xu", i), word("yv", i)}, "PER", 0.9});
    }
    std::vector<ngramlr::PlantedContext> distractors;
    for (std::size_t i = 0; i < n_hot; ++i) {
        for (std::size_t step : {1, 2}) {
            distractors.push_back(
                {{word("xu", i), word("yv", (i + step) % n_hot)}, "PER", 0.04});
        }
    }
    train_planted.insert(train_planted.end(), distractors.begin(), distractors.end());

    ZeroFreqHarness harness;
    ngramlr::GeneratorOptions train_opt;
    train_opt.seed = 2001;
    train_opt.vocab_size = 400;
    train_opt.n_docs = train_docs;
    train_opt.planted = train_planted;
    train_opt.plant_prob = 0.12;
    train_opt.repeat_prob = 0.1;
    harness.train_docs = pool_all(ngramlr::generate_synthetic(train_opt));

    auto test_planted = train_planted;
    for (std::size_t i = n_hot; i < n_diag - 2; ++i) { // warm off-diagonal recombinations
        ngramlr::NGram pair{word("xu", i), word("yv", n_hot + ((i - n_hot + 7) % (n_diag - n_hot)))};
        if (pair[1] == word("yv", i)) continue;
        harness.unseen_true.push_back(pair);
        test_planted.push_back({pair, "PER", 0.9});
    }
    ngramlr::GeneratorOptions test_opt = train_opt;
    test_opt.seed = 2002;
    test_opt.n_docs = test_docs;
    test_opt.planted = test_planted;
    harness.test_docs = pool_all(ngramlr::generate_synthetic(test_opt));
    return harness;
}

/// Bigram corpus where the context signal lives in the pair, not the units:
/// every true context shares the second word "yin", that word is frequent in
/// plain text, and the validation pool plants unit-frequent but pair-new
/// combinations (xe_k, yin) that are almost never entity contexts.
struct DependencyHarness {
    std::vector<ngramlr::Document> train_docs;
    std::vector<ngramlr::Document> valid_docs;
    ngramlr::EntityTypeFilter filter{"LOC"};
};

inline DependencyHarness dependency_harness(std::size_t train_docs = 200,
                                            std::size_t valid_docs = 80) {
    auto word = [](const char* prefix, std::size_t i) {
        return std::string(prefix) + std::to_string(i);
    };
    std::vector<ngramlr::PlantedContext> train_planted;
    for (std::size_t i = 0; i < 20; ++i) {
        train_planted.push_back({{word("xg", i), "yin"}, "LOC", 0.85});
    }
    for (std::size_t k = 0; k < 10; ++k) { // keeps "yin" frequent away from entities
        train_planted.push_back({{word("xz", k), "yin"}, "LOC", 0.02});
    }
    for (std::size_t k = 0; k < 12; ++k) { // gives xe_k numerator mass elsewhere
        train_planted.push_back({{word("xe", k), word("ym", k)}, "LOC", 0.5});
    }

    DependencyHarness harness;
    ngramlr::GeneratorOptions train_opt;
    train_opt.seed = 3001;
    train_opt.vocab_size = 300;
    train_opt.n_docs = train_docs;
    train_opt.planted = train_planted;
    train_opt.plant_prob = 0.12;
    train_opt.repeat_prob = 0.1;
    train_opt.spontaneous_entity_rate = 0.008;
    harness.train_docs = pool_all(ngramlr::generate_synthetic(train_opt));

    auto valid_planted = train_planted;
    for (std::size_t k = 0; k < 12; ++k) { // unit-frequent pairs unseen in training
        valid_planted.push_back({{word("xe", k), "yin"}, "LOC", 0.02});
    }
    ngramlr::GeneratorOptions valid_opt = train_opt;
    valid_opt.seed = 3002;
    valid_opt.n_docs = valid_docs;
    valid_opt.planted = valid_planted;
    harness.valid_docs = pool_all(ngramlr::generate_synthetic(valid_opt));
    return harness;
}

} // namespace fixtures

#endif
