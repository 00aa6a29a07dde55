#ifndef NGRAMLR_ESTIMATORS_HPP
#define NGRAMLR_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ngramlr/counts.hpp"
#include "ngramlr/errors.hpp"
#include "ngramlr/kneser_ney.hpp"

namespace ngramlr {

/// The five likelihood-ratio estimators. External interfaces name them
/// B, K, KN, ITEM, and OURS respectively.
enum class EstimatorKind {
    baseline,            // ratio of count MLEs
    regularized,         // denominator-regularized count ratio
    kneser_ney,          // ratio of smoothed chain probabilities
    itemized,            // product of per-unit regularized ratios
    itemized_dependency, // itemized ratio plus fitted dependency term
};

inline const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::baseline: return "B";
        case EstimatorKind::regularized: return "K";
        case EstimatorKind::kneser_ney: return "KN";
        case EstimatorKind::itemized: return "ITEM";
        case EstimatorKind::itemized_dependency: return "OURS";
    }
    return "?";
}

inline EstimatorKind parse_estimator(const std::string& name) {
    if (name == "B") return EstimatorKind::baseline;
    if (name == "K") return EstimatorKind::regularized;
    if (name == "KN") return EstimatorKind::kneser_ney;
    if (name == "ITEM") return EstimatorKind::itemized;
    if (name == "OURS") return EstimatorKind::itemized_dependency;
    throw precondition_error("unknown estimator \"" + name + "\" (expected B, K, KN, ITEM, OURS)");
}

/// Per-order discounts for the two smoothed chains.
struct KnDiscounts {
    std::vector<double> de;
    std::vector<double> nu;

    static KnDiscounts uniform(std::size_t order, double d = 0.5) {
        KnDiscounts out;
        out.de.assign(order, d);
        out.nu.assign(order, d);
        return out;
    }

    void validate(std::size_t order) const {
        if (de.size() != order || nu.size() != order) {
            throw precondition_error("need one discount per order and side");
        }
        for (const auto* side : {&de, &nu}) {
            for (double d : *side) {
                if (!(d > 0.0) || !(d < 1.0)) throw precondition_error("discounts must lie in (0,1)");
            }
        }
    }
};

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::baseline;
    double lambda = 0.0;
    double lambda_item = 0.0;
    double lambda_d = 0.0;
    /// Optional per-position override; empty means the shared lambda_item
    /// applies at every position.
    std::vector<double> lambda_item_per_position;
    KnDiscounts kn;

    void validate(std::size_t order) const {
        if (lambda < 0.0 || lambda_item < 0.0 || lambda_d < 0.0) {
            throw precondition_error("regularization parameters must be non-negative");
        }
        for (double value : lambda_item_per_position) {
            if (value < 0.0) throw precondition_error("regularization parameters must be non-negative");
        }
        if (!lambda_item_per_position.empty() && lambda_item_per_position.size() != order) {
            throw precondition_error("per-position lambda vector must match the order");
        }
        if (kind == EstimatorKind::kneser_ney) kn.validate(order);
    }
};

enum class EstimateKind {
    finite,
    infinite,  // numerator evidence with an empty denominator (baseline only)
    undefined, // no evidence on either side (baseline only)
    oov,       // contains an item outside the model vocabulary (KN only)
};

struct Estimate {
    EstimateKind kind = EstimateKind::finite;
    double value = 0.0;
    std::optional<double> itemized_part; // populated by OURS
    std::optional<double> dependency_part;

    static Estimate finite(double v) { return Estimate{EstimateKind::finite, v, {}, {}}; }
    static Estimate infinite() { return Estimate{EstimateKind::infinite, 0.0, {}, {}}; }
    static Estimate undefined() { return Estimate{EstimateKind::undefined, 0.0, {}, {}}; }
    static Estimate oov() { return Estimate{EstimateKind::oov, 0.0, {}, {}}; }
};

namespace detail {

inline void require_totals(const FrequencyModel& model) {
    if (model.n_de == 0 || model.n_nu == 0) {
        throw precondition_error("model totals must be positive");
    }
}

inline void require_order(const FrequencyModel& model, const NGram& w) {
    if (w.size() != model.order) throw precondition_error("ngram order does not match model");
}

} // namespace detail

/// Ratio of the two count MLEs. Zero numerator evidence gives 0, an empty
/// denominator with numerator evidence gives the infinity sentinel, and no
/// evidence at all is undefined.
inline Estimate mle_ratio(const FrequencyModel& model, const NGram& w) {
    detail::require_totals(model);
    detail::require_order(model, w);
    const std::uint64_t c_de = model.de_count(w);
    const std::uint64_t c_nu = model.nu_count(w);
    if (c_de == 0 && c_nu == 0) return Estimate::undefined();
    if (c_de == 0) return Estimate::infinite();
    const double p_nu = static_cast<double>(c_nu) / static_cast<double>(model.n_nu);
    const double p_de = static_cast<double>(c_de) / static_cast<double>(model.n_de);
    return Estimate::finite(p_nu / p_de);
}

/// Denominator-regularized ratio: (c_de/n_de + lambda)^-1 (c_nu/n_nu).
/// Reduces to the MLE ratio at lambda = 0 on denominator-observed N-grams.
inline Estimate regularized_ratio(const FrequencyModel& model, const NGram& w, double lambda) {
    detail::require_totals(model);
    detail::require_order(model, w);
    if (lambda < 0.0) throw precondition_error("lambda must be non-negative");
    const std::uint64_t c_de = model.de_count(w);
    if (lambda == 0.0 && c_de == 0) {
        throw precondition_error("lambda = 0 divides by zero on an unobserved ngram");
    }
    const double p_de = static_cast<double>(c_de) / static_cast<double>(model.n_de);
    const double p_nu = static_cast<double>(model.nu_count(w)) / static_cast<double>(model.n_nu);
    return Estimate::finite(p_nu / (p_de + lambda));
}

/// Product over positions of the unit-level regularized ratios, with a shared
/// regularizer (or one per position). Defined for N-grams never observed as a
/// whole, as long as each unit either has denominator evidence or a positive
/// regularizer.
inline Estimate itemized_ratio(const FrequencyModel& model, const NGram& w,
                               const std::vector<double>& lambda_per_position) {
    detail::require_totals(model);
    detail::require_order(model, w);
    if (lambda_per_position.size() != w.size()) {
        throw precondition_error("need one regularizer per position");
    }
    double product = 1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double lambda = lambda_per_position[k];
        if (lambda < 0.0) throw precondition_error("lambda_item must be non-negative");
        const std::uint64_t unit_de = model.de_unit(k + 1, w[k]);
        if (lambda == 0.0 && unit_de == 0) {
            throw precondition_error("lambda_item = 0 divides by zero on an unobserved unit");
        }
        const double p_de = static_cast<double>(unit_de) / static_cast<double>(model.n_de);
        const double p_nu =
            static_cast<double>(model.nu_unit(k + 1, w[k])) / static_cast<double>(model.n_nu);
        product *= p_nu / (p_de + lambda);
    }
    return Estimate::finite(product);
}

inline Estimate itemized_ratio(const FrequencyModel& model, const NGram& w, double lambda_item) {
    return itemized_ratio(model, w, std::vector<double>(w.size(), lambda_item));
}

/// Closed-form minimizer of the per-N-gram dependency objective:
/// (c_de/n_de + lambda_d)^-1 (c_nu/n_nu - r_item c_de/n_de). May be negative;
/// identically zero for N-grams with no evidence on either side.
inline double dependency_term(const FrequencyModel& model, const NGram& w, double itemized,
                              double lambda_d) {
    detail::require_totals(model);
    detail::require_order(model, w);
    if (lambda_d < 0.0) throw precondition_error("lambda_d must be non-negative");
    const std::uint64_t c_de = model.de_count(w);
    if (lambda_d == 0.0 && c_de == 0) {
        throw precondition_error("lambda_d = 0 divides by zero on an unobserved ngram; "
                                 "set lambda_d > 0");
    }
    const double p_de = static_cast<double>(c_de) / static_cast<double>(model.n_de);
    const double p_nu = static_cast<double>(model.nu_count(w)) / static_cast<double>(model.n_nu);
    return (p_nu - itemized * p_de) / (p_de + lambda_d);
}

/// The single-coordinate squared-loss objective the dependency term
/// minimizes, evaluated at beta. Test oracle for the closed form.
inline double dependency_objective(const FrequencyModel& model, const NGram& w, double beta,
                                   double itemized, double lambda_d) {
    detail::require_totals(model);
    detail::require_order(model, w);
    const double p_de = static_cast<double>(model.de_count(w)) / static_cast<double>(model.n_de);
    const double p_nu = static_cast<double>(model.nu_count(w)) / static_cast<double>(model.n_nu);
    return (0.5 * beta * beta + itemized * beta) * p_de - beta * p_nu +
           0.5 * lambda_d * beta * beta;
}

/// Itemized ratio plus dependency term, clamped at zero. The parts carry the
/// two addends before clamping.
inline Estimate combined_ratio(const FrequencyModel& model, const NGram& w,
                               const std::vector<double>& lambda_item_per_position,
                               double lambda_d) {
    const Estimate itemized = itemized_ratio(model, w, lambda_item_per_position);
    const double beta = dependency_term(model, w, itemized.value, lambda_d);
    Estimate out = Estimate::finite(std::max(0.0, itemized.value + beta));
    out.itemized_part = itemized.value;
    out.dependency_part = beta;
    return out;
}

inline Estimate combined_ratio(const FrequencyModel& model, const NGram& w, double lambda_item,
                               double lambda_d) {
    return combined_ratio(model, w, std::vector<double>(w.size(), lambda_item), lambda_d);
}

/// Ratio of the two smoothed chain probabilities. N-grams with items outside
/// the model vocabulary are flagged rather than given invented mass.
inline Estimate smoothed_ratio(const FrequencyModel& model, const KneserNey& kn, const NGram& w,
                               const KnDiscounts& discounts) {
    detail::require_order(model, w);
    discounts.validate(model.order);
    if (!kn.in_vocab(w)) return Estimate::oov();
    const double p_nu = kn.chain_probability(Side::numerator, w, discounts.nu);
    const double p_de = kn.chain_probability(Side::denominator, w, discounts.de);
    return Estimate::finite(p_nu / p_de);
}

inline Estimate smoothed_ratio(const FrequencyModel& model, const NGram& w,
                               const KnDiscounts& discounts) {
    const KneserNey kn(model);
    return smoothed_ratio(model, kn, w, discounts);
}

/// Scores one candidate under the configured estimator. `kn` may be null for
/// everything except the KN kind.
inline Estimate score(const FrequencyModel& model, const KneserNey* kn, const NGram& w,
                      const EstimatorConfig& config) {
    switch (config.kind) {
        case EstimatorKind::baseline:
            return mle_ratio(model, w);
        case EstimatorKind::regularized:
            return regularized_ratio(model, w, config.lambda);
        case EstimatorKind::itemized:
            return config.lambda_item_per_position.empty()
                       ? itemized_ratio(model, w, config.lambda_item)
                       : itemized_ratio(model, w, config.lambda_item_per_position);
        case EstimatorKind::itemized_dependency:
            return config.lambda_item_per_position.empty()
                       ? combined_ratio(model, w, config.lambda_item, config.lambda_d)
                       : combined_ratio(model, w, config.lambda_item_per_position, config.lambda_d);
        case EstimatorKind::kneser_ney: {
            if (!kn) throw precondition_error("KN scoring needs prepared smoothing tables");
            return smoothed_ratio(model, *kn, w, config.kn);
        }
    }
    throw precondition_error("unknown estimator kind");
}

/// Scores every candidate; the result is independent of the thread count.
inline std::map<NGram, Estimate> score_candidates(const FrequencyModel& model, const KneserNey* kn,
                                                  const std::set<NGram>& candidates,
                                                  const EstimatorConfig& config,
                                                  unsigned threads = 1) {
    config.validate(model.order);
    std::vector<const NGram*> ordered;
    ordered.reserve(candidates.size());
    for (const auto& w : candidates) ordered.push_back(&w);
    std::vector<Estimate> estimates(ordered.size());

    const unsigned workers = std::max(1u, threads);
    if (workers == 1 || ordered.size() < 2) {
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            estimates[i] = score(model, kn, *ordered[i], config);
        }
    } else {
        const std::size_t chunk = (ordered.size() + workers - 1) / workers;
        std::vector<std::future<void>> futures;
        for (unsigned t = 0; t < workers; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(ordered.size(), begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, [&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    estimates[i] = score(model, kn, *ordered[i], config);
                }
            }));
        }
        for (auto& f : futures) f.get();
    }

    std::map<NGram, Estimate> out;
    for (std::size_t i = 0; i < ordered.size(); ++i) out.emplace(*ordered[i], estimates[i]);
    return out;
}

} // namespace ngramlr

#endif
