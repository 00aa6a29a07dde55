#ifndef NGRAMLR_WORKED_EXAMPLES_HPP
#define NGRAMLR_WORKED_EXAMPLES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ngramlr/counts.hpp"
#include "ngramlr/estimators.hpp"
#include "ngramlr/evaluation.hpp"

namespace ngramlr {

/// Built-in bigram frequency tables for four reference N-grams spanning the
/// frequent / rare / zero-numerator regimes, together with their itemized
/// unit counts. They back `reproduce-figures` and the regression tests, so
/// those need no external data.
struct WorkedExampleRow {
    const char* name;
    NGram ngram;
    std::uint64_t de;
    std::uint64_t nu;
    std::uint64_t unit1_de, unit1_nu;
    std::uint64_t unit2_de, unit2_nu;
    double mle; // reference ratio of count MLEs
};

inline const std::array<WorkedExampleRow, 4>& worked_example_rows() {
    static const std::array<WorkedExampleRow, 4> rows = {{
        {"w_A", {"A1", "A2"}, 5000, 100, 8000, 1000, 5000, 500, 20.0},
        {"w_B", {"B1", "B2"}, 50, 1, 240, 30, 150, 15, 20.0},
        {"w_C", {"C1", "C2"}, 50, 2, 80, 10, 50, 5, 40.0},
        {"w_D", {"D1", "D2"}, 14, 0, 80, 10, 50, 5, 0.0},
    }};
    return rows;
}

inline constexpr std::uint64_t worked_example_n_de = 10'000'000;
inline constexpr std::uint64_t worked_example_n_nu = 10'000;

/// A scoring fixture, not a build_model output: only the four reference
/// bigrams and their units are tabulated, so the conservation invariants of
/// corpus-built models intentionally do not hold here.
inline FrequencyModel worked_example_model() {
    FrequencyModel model;
    model.order = 2;
    model.n_de = worked_example_n_de;
    model.n_nu = worked_example_n_nu;
    model.de_lower.resize(1);
    model.nu_lower.resize(1);
    for (const auto& row : worked_example_rows()) {
        model.de_counts[row.ngram] = row.de;
        if (row.nu > 0) model.nu_counts[row.ngram] = row.nu;
        model.de_unit_counts[UnitKey{1, row.ngram[0]}] = row.unit1_de;
        model.nu_unit_counts[UnitKey{1, row.ngram[0]}] = row.unit1_nu;
        model.de_unit_counts[UnitKey{2, row.ngram[1]}] = row.unit2_de;
        model.nu_unit_counts[UnitKey{2, row.ngram[1]}] = row.unit2_nu;
        model.vocab.insert(row.ngram[0]);
        model.vocab.insert(row.ngram[1]);
    }
    return model;
}

/// One sweep row: the regularizer value and the four estimates.
struct SweepRow {
    double parameter = 0.0;
    std::array<double, 4> estimates{};
};

/// Regularized-ratio estimates across the default grid.
inline std::vector<SweepRow> regularized_ratio_sweep() {
    const auto model = worked_example_model();
    std::vector<SweepRow> rows;
    for (double lambda : TuningGrid::default_grid().values) {
        SweepRow row;
        row.parameter = lambda;
        for (std::size_t i = 0; i < 4; ++i) {
            row.estimates[i] = regularized_ratio(model, worked_example_rows()[i].ngram, lambda).value;
        }
        rows.push_back(row);
    }
    return rows;
}

/// Combined-ratio estimates sweeping lambda_item with lambda_d pinned.
inline std::vector<SweepRow> combined_ratio_item_sweep(double fixed_lambda_d = 1e-5) {
    const auto model = worked_example_model();
    std::vector<SweepRow> rows;
    for (double lambda_item : TuningGrid::default_grid().values) {
        SweepRow row;
        row.parameter = lambda_item;
        for (std::size_t i = 0; i < 4; ++i) {
            row.estimates[i] =
                combined_ratio(model, worked_example_rows()[i].ngram, lambda_item, fixed_lambda_d)
                    .value;
        }
        rows.push_back(row);
    }
    return rows;
}

/// Combined-ratio estimates sweeping lambda_d with lambda_item pinned.
inline std::vector<SweepRow> combined_ratio_dependency_sweep(double fixed_lambda_item = 1e-4) {
    const auto model = worked_example_model();
    std::vector<SweepRow> rows;
    for (double lambda_d : TuningGrid::default_grid().values) {
        SweepRow row;
        row.parameter = lambda_d;
        for (std::size_t i = 0; i < 4; ++i) {
            row.estimates[i] =
                combined_ratio(model, worked_example_rows()[i].ngram, fixed_lambda_item, lambda_d)
                    .value;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace ngramlr

#endif
