#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ngramlr/estimators.hpp"
#include "ngramlr/kneser_ney.hpp"

using namespace ngramlr;

namespace {

/// Independent oracle: the standard interpolated recursion evaluated by
/// recounting windows of the raw sequences on every call. Deliberately slow
/// and table-free so it shares nothing with the implementation under test.
class ReferenceKn {
public:
    ReferenceKn(std::vector<std::vector<std::string>> sequences, std::set<std::string> vocab)
        : sequences_(std::move(sequences)), vocab_(std::move(vocab)) {}

    double prob(const std::vector<std::string>& context, const std::string& item, double d) const {
        return level(context.size() + 1, context.size() + 1, context, item, d);
    }

private:
    std::uint64_t raw_count(const std::vector<std::string>& gram) const {
        std::uint64_t count = 0;
        for (const auto& seq : sequences_) {
            if (seq.size() < gram.size()) continue;
            for (std::size_t i = 0; i + gram.size() <= seq.size(); ++i) {
                if (std::equal(gram.begin(), gram.end(), seq.begin() + static_cast<std::ptrdiff_t>(i))) {
                    ++count;
                }
            }
        }
        return count;
    }

    std::uint64_t continuation_count(const std::vector<std::string>& gram) const {
        std::set<std::string> predecessors;
        for (const auto& seq : sequences_) {
            if (seq.size() < gram.size() + 1) continue;
            for (std::size_t i = 0; i + gram.size() + 1 <= seq.size(); ++i) {
                if (std::equal(gram.begin(), gram.end(),
                               seq.begin() + static_cast<std::ptrdiff_t>(i + 1))) {
                    predecessors.insert(seq[i]);
                }
            }
        }
        return predecessors.size();
    }

    double level(std::size_t k, std::size_t m, const std::vector<std::string>& context,
                 const std::string& item, double d) const {
        const bool top = k == m;
        auto count_of = [&](const std::vector<std::string>& gram) {
            return top ? raw_count(gram) : continuation_count(gram);
        };
        if (k == 1) {
            std::uint64_t total = 0, types = 0;
            for (const auto& a : vocab_) {
                const std::uint64_t c = count_of({a});
                total += c;
                if (c > 0) ++types;
            }
            if (total == 0) return 1.0 / static_cast<double>(vocab_.size());
            const double c = static_cast<double>(count_of({item}));
            return (std::max(c - d, 0.0) +
                    d * static_cast<double>(types) / static_cast<double>(vocab_.size())) /
                   static_cast<double>(total);
        }
        const std::vector<std::string> local_context(context.end() - static_cast<std::ptrdiff_t>(k - 1),
                                                     context.end());
        std::uint64_t total = 0, distinct = 0;
        for (const auto& a : vocab_) {
            auto gram = local_context;
            gram.push_back(a);
            const std::uint64_t c = count_of(gram);
            total += c;
            if (c > 0) ++distinct;
        }
        if (total == 0) return level(k - 1, m, context, item, d);
        auto gram = local_context;
        gram.push_back(item);
        const double c = static_cast<double>(count_of(gram));
        return (std::max(c - d, 0.0) +
                d * static_cast<double>(distinct) * level(k - 1, m, context, item, d)) /
               static_cast<double>(total);
    }

    std::vector<std::vector<std::string>> sequences_;
    std::set<std::string> vocab_;
};

std::vector<std::vector<std::string>> numerator_sequences(const std::vector<Document>& docs,
                                                          std::size_t order,
                                                          const std::string& label) {
    std::vector<std::vector<std::string>> sequences;
    for (const auto& doc : docs) {
        for (const auto& span : doc.spans) {
            if (span.label != label || span.start < order) continue;
            sequences.emplace_back(doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.start - order),
                                   doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.start));
        }
    }
    return sequences;
}

std::vector<NGram> all_contexts(const std::set<std::string>& vocab, std::size_t max_len) {
    std::vector<NGram> contexts{{}};
    std::vector<NGram> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<NGram> next;
        for (const auto& c : frontier) {
            for (const auto& a : vocab) {
                auto extended = c;
                extended.push_back(a);
                next.push_back(extended);
            }
        }
        contexts.insert(contexts.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return contexts;
}

} // namespace

TEST_CASE("degenerate one-word vocabulary is certain") {
    Document doc{{"a", "a", "a", "a"}, {}};
    const auto model = build_model({doc}, 2, EntityTypeFilter{"PER"});
    for (double d : {0.1, 0.5, 0.9}) {
        REQUIRE(kn_conditional(model, Side::denominator, {"a"}, "a", d) == 1.0);
        REQUIRE(kn_conditional(model, Side::denominator, {}, "a", d) == 1.0);
    }
}

TEST_CASE("hand-checked bigram conditional") {
    // Sequence a b a b: c(a,b)=2, c(b,a)=1, both unigram continuation
    // counts are 1, so p(b|a) = (2-0.5 + 0.5*1*0.5)/2.
    Document doc{{"a", "b", "a", "b"}, {}};
    const auto model = build_model({doc}, 2, EntityTypeFilter{"PER"});
    REQUIRE(kn_conditional(model, Side::denominator, {"a"}, "b", 0.5) == 0.875);
    REQUIRE(kn_conditional(model, Side::denominator, {"a"}, "a", 0.5) == 0.125);
}

TEST_CASE("conditionals match the recount-everything oracle") {
    // A 28-token corpus over a three-word vocabulary, with entities so the
    // numerator side is exercised too.
    Document doc{{"a", "b", "a", "c", "b", "b", "a", "P_1", "c", "a", "b", "c", "c", "a",
                  "b", "a", "a", "c", "b", "P_1", "a", "c", "c", "b", "a", "b", "c", "a"},
                 {{7, 8, "PER"}, {19, 20, "PER"}}};
    const std::size_t order = 3;
    const auto model = build_model({doc}, order, EntityTypeFilter{"PER"});
    const KneserNey kn(model);

    const ReferenceKn de_oracle({doc.tokens}, model.vocab);
    const ReferenceKn nu_oracle(numerator_sequences({doc}, order, "PER"), model.vocab);

    const auto contexts = all_contexts(model.vocab, order - 1);
    for (double d : {0.3, 0.75}) {
        for (const auto& context : contexts) {
            for (const auto& item : model.vocab) {
                REQUIRE_THAT(kn.conditional(Side::denominator, context, item, d),
                             Catch::Matchers::WithinRel(de_oracle.prob(context, item, d), 1e-12));
                REQUIRE_THAT(kn.conditional(Side::numerator, context, item, d),
                             Catch::Matchers::WithinRel(nu_oracle.prob(context, item, d), 1e-12));
            }
        }
    }
}

TEST_CASE("every smoothed conditional normalizes over the vocabulary") {
    const auto docs = fixtures::small_corpus(17, 50, 20);
    const std::size_t order = 4;
    const auto model = build_model(docs, order, EntityTypeFilter{"PER"});
    REQUIRE(model.vocab.size() >= 20);
    const KneserNey kn(model);

    // Observed and unobserved contexts of every length, both sides.
    std::vector<NGram> contexts{{}};
    const NGram sample = model.de_counts.begin()->first;
    for (std::size_t len = 1; len < order; ++len) {
        contexts.emplace_back(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(len));
        contexts.push_back(NGram(len, "zz_unseen"));
    }
    for (Side side : {Side::denominator, Side::numerator}) {
        for (double d : {0.2, 0.5, 0.9}) {
            for (const auto& context : contexts) {
                double sum = 0.0;
                for (const auto& item : model.vocab) {
                    const double p = kn.conditional(side, context, item, d);
                    REQUIRE(p >= 0.0);
                    sum += p;
                }
                REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
            }
        }
    }
}

TEST_CASE("chain probability is the product of per-order conditionals") {
    const auto docs = fixtures::small_corpus(8, 40, 12);
    const std::size_t order = 4;
    const auto model = build_model(docs, order, EntityTypeFilter{"PER"});
    const KneserNey kn(model);
    const KnDiscounts discounts{{0.4, 0.5, 0.6, 0.7}, {0.3, 0.5, 0.7, 0.8}};

    std::size_t checked = 0;
    for (const auto& [w, c] : model.de_counts) {
        if (++checked > 25) break;
        double expected_de = 1.0, expected_nu = 1.0;
        for (std::size_t m = 1; m <= order; ++m) {
            const NGram context(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m - 1));
            expected_de *= kn.conditional(Side::denominator, context, w[m - 1], discounts.de[m - 1]);
            expected_nu *= kn.conditional(Side::numerator, context, w[m - 1], discounts.nu[m - 1]);
        }
        const auto estimate = smoothed_ratio(model, kn, w, discounts);
        REQUIRE(estimate.kind == EstimateKind::finite);
        REQUIRE_THAT(estimate.value, Catch::Matchers::WithinRel(expected_nu / expected_de, 1e-12));
        REQUIRE(estimate.value > 0.0);
    }
}

TEST_CASE("identical numerator and denominator data give ratio one") {
    const auto docs = fixtures::small_corpus(9, 30, 10);
    auto model = build_model(docs, 3, EntityTypeFilter{"PER"});
    model.nu_counts = model.de_counts;
    model.nu_lower = model.de_lower;
    model.n_nu = model.n_de;
    const KneserNey kn(model);
    const auto discounts = KnDiscounts::uniform(3, 0.6);
    std::size_t checked = 0;
    for (const auto& [w, c] : model.de_counts) {
        if (++checked > 20) break;
        REQUIRE(smoothed_ratio(model, kn, w, discounts).value == 1.0);
    }
}

TEST_CASE("out-of-vocabulary items are flagged, not scored") {
    const auto docs = fixtures::small_corpus(10, 20, 10);
    const auto model = build_model(docs, 2, EntityTypeFilter{"PER"});
    const KneserNey kn(model);
    const auto estimate = smoothed_ratio(model, kn, {"zz_unseen", "w0"}, KnDiscounts::uniform(2));
    REQUIRE(estimate.kind == EstimateKind::oov);
}

TEST_CASE("discounts outside (0,1) are rejected") {
    Document doc{{"a", "b", "a"}, {}};
    const auto model = build_model({doc}, 2, EntityTypeFilter{"PER"});
    REQUIRE_THROWS_AS(kn_conditional(model, Side::denominator, {"a"}, "b", 0.0), precondition_error);
    REQUIRE_THROWS_AS(kn_conditional(model, Side::denominator, {"a"}, "b", 1.0), precondition_error);
}
