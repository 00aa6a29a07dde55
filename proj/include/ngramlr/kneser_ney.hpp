#ifndef NGRAMLR_KNESER_NEY_HPP
#define NGRAMLR_KNESER_NEY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ngramlr/counts.hpp"
#include "ngramlr/errors.hpp"

namespace ngramlr {

enum class Side { denominator, numerator };

/// Interpolated Kneser-Ney conditionals over one model's window tables.
///
/// The order-m conditional discounts raw order-m counts at its top level and
/// recurses through lower levels built from continuation counts (distinct
/// predecessors); the unigram level interpolates with the uniform
/// distribution over the observed vocabulary. An unseen context contributes
/// no mass of its own and falls through to the next level. Each conditional
/// carries a single discount d in (0,1) across its whole recursion, so a
/// model of order N has 2N tunable discounts.
///
/// The evaluator borrows the model's tables; the model must outlive it.
class KneserNey {
public:
    explicit KneserNey(const FrequencyModel& model) : model_(&model) {
        build_side(false, de_);
        build_side(true, nu_);
    }

    std::size_t order() const { return model_->order; }

    bool in_vocab(const std::string& item) const { return model_->vocab.count(item) > 0; }

    bool in_vocab(const NGram& w) const {
        return std::all_of(w.begin(), w.end(), [&](const auto& item) { return in_vocab(item); });
    }

    /// Smoothed conditional probability of `item` after `context`; the
    /// conditional's order is context.size() + 1. Sums to one over the
    /// vocabulary for every context.
    double conditional(Side side, const NGram& context, const std::string& item, double d) const {
        if (!(d > 0.0) || !(d < 1.0)) throw precondition_error("discount must lie in (0,1)");
        const std::size_t m = context.size() + 1;
        if (m > model_->order) throw precondition_error("conditional order exceeds model order");
        return level(tables(side), m, m, context, item, d);
    }

    /// The order-N chain probability: conditionals of order 1..N evaluated on
    /// the prefixes of w, each with its own discount.
    double chain_probability(Side side, const NGram& w, const std::vector<double>& discounts) const {
        if (w.size() != model_->order) throw precondition_error("ngram order does not match model");
        if (discounts.size() != model_->order) {
            throw precondition_error("need one discount per chain conditional");
        }
        double probability = 1.0;
        for (std::size_t m = 1; m <= w.size(); ++m) {
            const NGram context(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m - 1));
            probability *= conditional(side, context, w[m - 1], discounts[m - 1]);
        }
        return probability;
    }

    /// Training-data log-likelihood of the order-m conditional at discount d:
    /// every observed order-m window scores its final item given its prefix.
    double log_likelihood(Side side, std::size_t m, double d) const {
        const auto& raw = model_->window_table(side == Side::numerator, m);
        double total = 0.0;
        for (const auto& [w, count] : raw) {
            const NGram context(w.begin(), w.end() - 1);
            total += static_cast<double>(count) * std::log(conditional(side, context, w.back(), d));
        }
        return total;
    }

private:
    using Table = std::map<NGram, std::uint64_t>;

    struct LevelTables {
        const Table* counts = nullptr; // owned elsewhere for raw levels
        Table owned_counts;            // continuation counts for lower levels
        Table context_total;           // context -> sum of successor counts
        Table context_distinct;        // context -> number of distinct successors
    };

    struct SideTables {
        std::vector<LevelTables> raw;          // index m-1, m = 1..N
        std::vector<LevelTables> continuation; // index m-1, m = 1..N-1
    };

    static void index_contexts(const Table& counts, LevelTables& level) {
        for (const auto& [w, c] : counts) {
            const NGram context(w.begin(), w.end() - 1);
            level.context_total[context] += c;
            level.context_distinct[context] += 1;
        }
    }

    void build_side(bool numerator, SideTables& side) {
        const std::size_t order = model_->order;
        side.raw.resize(order);
        if (order > 1) side.continuation.resize(order - 1);
        for (std::size_t m = 1; m <= order; ++m) {
            auto& level = side.raw[m - 1];
            level.counts = &model_->window_table(numerator, m);
            index_contexts(*level.counts, level);
            // Distinct predecessors of every (m-1)-gram, read off the raw
            // order-m table (keys are unique, so each entry is one predecessor).
            if (m >= 2) {
                auto& cont = side.continuation[m - 2];
                for (const auto& [w, c] : *level.counts) {
                    (void)c;
                    cont.owned_counts[NGram(w.begin() + 1, w.end())] += 1;
                }
                cont.counts = &cont.owned_counts;
                index_contexts(cont.owned_counts, cont);
            }
        }
    }

    const SideTables& tables(Side side) const {
        return side == Side::numerator ? nu_ : de_;
    }

    static std::uint64_t lookup(const Table& table, const NGram& key) {
        auto it = table.find(key);
        return it == table.end() ? 0 : it->second;
    }

    double level(const SideTables& side, std::size_t k, std::size_t m, const NGram& context,
                 const std::string& item, double d) const {
        const LevelTables& tables = (k == m) ? side.raw[k - 1] : side.continuation[k - 1];
        if (k == 1) {
            const double vocab_size = static_cast<double>(model_->vocab.size());
            if (vocab_size == 0.0) throw precondition_error("model has an empty vocabulary");
            const std::uint64_t total = lookup(tables.context_total, NGram{});
            if (total == 0) return 1.0 / vocab_size;
            const std::uint64_t types = lookup(tables.context_distinct, NGram{});
            const double c = static_cast<double>(lookup(*tables.counts, NGram{item}));
            return (std::max(c - d, 0.0) + d * static_cast<double>(types) / vocab_size) /
                   static_cast<double>(total);
        }
        const NGram local_context(context.end() - static_cast<std::ptrdiff_t>(k - 1), context.end());
        const std::uint64_t total = lookup(tables.context_total, local_context);
        if (total == 0) return level(side, k - 1, m, context, item, d);
        const std::uint64_t distinct = lookup(tables.context_distinct, local_context);
        NGram key = local_context;
        key.push_back(item);
        const double c = static_cast<double>(lookup(*tables.counts, key));
        const double lower = level(side, k - 1, m, context, item, d);
        return (std::max(c - d, 0.0) + d * static_cast<double>(distinct) * lower) /
               static_cast<double>(total);
    }

    const FrequencyModel* model_;
    SideTables de_;
    SideTables nu_;
};

/// One-off conditional lookup; builds the evaluator each call, so prefer a
/// long-lived KneserNey when scoring many candidates.
inline double kn_conditional(const FrequencyModel& model, Side side, const NGram& context,
                             const std::string& item, double d) {
    return KneserNey(model).conditional(side, context, item, d);
}

} // namespace ngramlr

#endif
