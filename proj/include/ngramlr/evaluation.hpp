#ifndef NGRAMLR_EVALUATION_HPP
#define NGRAMLR_EVALUATION_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ngramlr/counts.hpp"
#include "ngramlr/errors.hpp"
#include "ngramlr/estimators.hpp"

namespace ngramlr {

struct RankedEntry {
    NGram ngram;
    Estimate estimate;
    bool truth = false;
};

/// Candidates in scoring order: infinity sentinels first, finite estimates in
/// descending order, unscorable candidates (undefined/oov) last; every tie
/// group is sorted lexicographically by items. Truncated at `cutoff`.
struct RankedList {
    std::vector<RankedEntry> entries;
    std::size_t cutoff = 0;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

struct CurveSeries {
    std::vector<CurvePoint> points;
    double auc = 0.0;
    std::size_t cutoff = 0;
};

struct TuningGrid {
    std::vector<double> values;

    /// The nine-point grid 1e-9 .. 1e-1.
    static TuningGrid default_grid() {
        return TuningGrid{{1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}};
    }

    void validate() const {
        if (values.empty()) throw precondition_error("tuning grid is empty");
        double previous = 0.0;
        for (double v : values) {
            if (!(v > previous)) {
                throw precondition_error("tuning grid must be strictly positive and increasing");
            }
            previous = v;
        }
    }
};

/// The default discount grid 0.1 .. 0.9.
inline std::vector<double> default_discount_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

/// Every distinct N-gram occurring in the given documents.
inline std::set<NGram> candidate_set(const std::vector<Document>& docs, std::size_t order) {
    std::set<NGram> candidates;
    for (const auto& doc : docs) {
        for (auto& w : extract_ngrams(doc, order)) candidates.insert(std::move(w));
    }
    return candidates;
}

/// The correction set: N-grams occurring at least `min_count` times
/// immediately left of a filtered entity span. Spans with fewer than N
/// tokens before them contribute nothing.
inline std::set<NGram> truth_labels(const std::vector<Document>& docs,
                                    const EntityTypeFilter& filter, std::size_t order,
                                    std::size_t min_count = 1) {
    if (min_count == 0) throw precondition_error("min_count must be at least 1");
    std::map<NGram, std::size_t> occurrences;
    for (const auto& doc : docs) {
        for (const auto& span : doc.spans) {
            if (span.label != filter.label || span.start < order) continue;
            occurrences[NGram(doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.start - order),
                              doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.start))] += 1;
        }
    }
    std::set<NGram> truth;
    for (const auto& [w, n] : occurrences) {
        if (n >= min_count) truth.insert(w);
    }
    return truth;
}

namespace detail {

inline int rank_class(const Estimate& e) {
    switch (e.kind) {
        case EstimateKind::infinite: return 0;
        case EstimateKind::finite: return 1;
        case EstimateKind::undefined:
        case EstimateKind::oov: return 2;
    }
    return 2;
}

} // namespace detail

/// Deterministic ranking of scored candidates, truncated at the cutoff.
inline RankedList rank(const std::set<NGram>& candidates, const std::map<NGram, Estimate>& scores,
                       const std::set<NGram>& truth, std::size_t cutoff) {
    if (cutoff == 0) throw precondition_error("cutoff must be at least 1");
    RankedList ranked;
    ranked.cutoff = cutoff;
    ranked.entries.reserve(candidates.size());
    for (const auto& w : candidates) {
        auto it = scores.find(w);
        if (it == scores.end()) throw precondition_error("candidate is missing a score");
        ranked.entries.push_back(RankedEntry{w, it->second, truth.count(w) > 0});
    }
    std::stable_sort(ranked.entries.begin(), ranked.entries.end(),
                     [](const RankedEntry& a, const RankedEntry& b) {
                         const int class_a = detail::rank_class(a.estimate);
                         const int class_b = detail::rank_class(b.estimate);
                         if (class_a != class_b) return class_a < class_b;
                         if (class_a == 1 && a.estimate.value != b.estimate.value) {
                             return a.estimate.value > b.estimate.value;
                         }
                         return a.ngram < b.ngram;
                     });
    if (ranked.entries.size() > cutoff) ranked.entries.resize(cutoff);
    return ranked;
}

/// Recall of the correction set among the top r candidates, for every rank r.
/// The area is the mean per-rank recall over ranks 1..cutoff; a list shorter
/// than the cutoff extends flat.
inline CurveSeries rank_recall(const RankedList& ranked, const std::set<NGram>& truth) {
    if (truth.empty()) throw precondition_error("correction set is empty");
    CurveSeries curve;
    curve.cutoff = ranked.cutoff;
    curve.points.reserve(ranked.entries.size());
    const double denom = static_cast<double>(truth.size());
    std::size_t hits = 0;
    double recall_sum = 0.0;
    for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
        if (ranked.entries[r].truth) ++hits;
        const double recall = static_cast<double>(hits) / denom;
        curve.points.push_back(CurvePoint{static_cast<double>(r + 1), recall});
        recall_sum += recall;
    }
    const double final_recall = curve.points.empty() ? 0.0 : curve.points.back().y;
    if (ranked.entries.size() < ranked.cutoff) {
        recall_sum += static_cast<double>(ranked.cutoff - ranked.entries.size()) * final_recall;
    }
    curve.auc = recall_sum / static_cast<double>(ranked.cutoff);
    return curve;
}

/// Per-rank (recall, precision) points over the ranked list.
inline CurveSeries precision_recall(const RankedList& ranked, const std::set<NGram>& truth) {
    if (truth.empty()) throw precondition_error("correction set is empty");
    CurveSeries curve;
    curve.cutoff = ranked.cutoff;
    curve.points.reserve(ranked.entries.size());
    const double denom = static_cast<double>(truth.size());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
        if (ranked.entries[r].truth) ++hits;
        curve.points.push_back(CurvePoint{static_cast<double>(hits) / denom,
                                          static_cast<double>(hits) / static_cast<double>(r + 1)});
    }
    return curve;
}

struct TuneTraceRow {
    EstimatorConfig config;
    double auc = 0.0;
};

struct TuneResult {
    EstimatorConfig best;
    std::vector<TuneTraceRow> trace;
};

/// Grid search maximizing validation rank-recall area. K and ITEM scan the
/// grid once; OURS scans the full lambda_item x lambda_d product. Ties go to
/// the earliest grid point scanned (smallest parameter, lambda_d first for
/// OURS).
inline TuneResult tune(const FrequencyModel& train_model, const std::vector<Document>& valid_docs,
                       EstimatorKind kind, const TuningGrid& grid, std::size_t cutoff,
                       std::size_t truth_min_count = 1, unsigned threads = 1) {
    grid.validate();
    if (kind != EstimatorKind::regularized && kind != EstimatorKind::itemized &&
        kind != EstimatorKind::itemized_dependency) {
        throw precondition_error("only K, ITEM, and OURS have a regularization grid");
    }
    const auto candidates = candidate_set(valid_docs, train_model.order);
    const auto truth = truth_labels(valid_docs, EntityTypeFilter{train_model.filter_label},
                                    train_model.order, truth_min_count);
    if (truth.empty()) throw precondition_error("correction set is empty");

    std::vector<EstimatorConfig> configs;
    if (kind == EstimatorKind::itemized_dependency) {
        for (double lambda_d : grid.values) {
            for (double lambda_item : grid.values) {
                EstimatorConfig config;
                config.kind = kind;
                config.lambda_item = lambda_item;
                config.lambda_d = lambda_d;
                configs.push_back(config);
            }
        }
    } else {
        for (double value : grid.values) {
            EstimatorConfig config;
            config.kind = kind;
            (kind == EstimatorKind::regularized ? config.lambda : config.lambda_item) = value;
            configs.push_back(config);
        }
    }

    TuneResult result;
    result.trace.reserve(configs.size());
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto scores = score_candidates(train_model, nullptr, candidates, configs[i], threads);
        const auto ranked = rank(candidates, scores, truth, cutoff);
        const double auc = rank_recall(ranked, truth).auc;
        result.trace.push_back(TuneTraceRow{configs[i], auc});
        if (auc > result.trace[best_index].auc) best_index = i;
    }
    result.best = result.trace[best_index].config;
    return result;
}

struct KnTuneRow {
    Side side = Side::denominator;
    std::size_t order = 1;
    double discount = 0.0;
    double log_likelihood = 0.0;
};

struct KnTuneResult {
    KnDiscounts best;
    std::vector<KnTuneRow> trace;
};

/// Tunes each of the 2N smoothed conditionals independently: the winning
/// discount maximizes that conditional's training-data log-likelihood, ties
/// toward the smaller discount.
inline KnTuneResult tune_kn(const FrequencyModel& train_model, const std::vector<double>& d_grid) {
    if (d_grid.empty()) throw precondition_error("discount grid is empty");
    const KneserNey kn(train_model);
    KnTuneResult result;
    result.best.de.assign(train_model.order, d_grid.front());
    result.best.nu.assign(train_model.order, d_grid.front());
    for (Side side : {Side::denominator, Side::numerator}) {
        for (std::size_t m = 1; m <= train_model.order; ++m) {
            double best_d = d_grid.front();
            double best_ll = -std::numeric_limits<double>::infinity();
            for (double d : d_grid) {
                const double ll = kn.log_likelihood(side, m, d);
                result.trace.push_back(KnTuneRow{side, m, d, ll});
                if (ll > best_ll) {
                    best_ll = ll;
                    best_d = d;
                }
            }
            (side == Side::numerator ? result.best.nu : result.best.de)[m - 1] = best_d;
        }
    }
    return result;
}

} // namespace ngramlr

#endif
