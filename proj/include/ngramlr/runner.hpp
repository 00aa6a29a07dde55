#ifndef NGRAMLR_RUNNER_HPP
#define NGRAMLR_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ngramlr/corpus.hpp"
#include "ngramlr/counts.hpp"
#include "ngramlr/errors.hpp"
#include "ngramlr/estimators.hpp"
#include "ngramlr/evaluation.hpp"
#include "ngramlr/report.hpp"
#include "ngramlr/synthetic.hpp"
#include "ngramlr/worked_examples.hpp"

namespace ngramlr {

/// Everything a run needs. The config file is a flat key=value format and
/// command-line flags override file values; the manifest echoes the
/// effective configuration so a run can be reproduced byte-identically.
struct RunConfig {
    std::size_t order = 2;
    std::string label = "PER";
    std::string estimator = "OURS";
    double lambda = 1e-5;
    double lambda_item = 1e-4;
    double lambda_d = 1e-5;
    std::vector<double> kn_de; // empty: 0.5 at every order
    std::vector<double> kn_nu;
    std::size_t cutoff = 8000;
    std::size_t truth_min_count = 1;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool svg = false;
    std::string train_path;
    std::string valid_path;
    std::string test_path;
    std::string model_path;
    std::string out_dir = "out";
    // generator settings
    std::size_t vocab_size = 500;
    std::size_t n_docs = 100;
    std::vector<PlantedContext> planted;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value for " + key + ": \"" + value + "\"");
    }
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t parsed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer value for " + key + ": \"" + value + "\"");
    }
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (in >> item) out.push_back(parse_double(key, item));
    return out;
}

/// `tok1 tok2 ...|LABEL|rate`
inline PlantedContext parse_planted(const std::string& key, const std::string& value) {
    const auto bar1 = value.find('|');
    const auto bar2 = bar1 == std::string::npos ? std::string::npos : value.find('|', bar1 + 1);
    if (bar2 == std::string::npos) {
        throw std::invalid_argument("bad planted context for " + key +
                                    " (want `tokens|LABEL|rate`): \"" + value + "\"");
    }
    PlantedContext planted;
    std::istringstream items(value.substr(0, bar1));
    std::string item;
    while (items >> item) planted.items.push_back(item);
    planted.label = value.substr(bar1 + 1, bar2 - bar1 - 1);
    planted.rate = parse_double(key, value.substr(bar2 + 1));
    return planted;
}

} // namespace detail

/// Applies one key=value setting; unknown keys are usage errors.
inline void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "order") config.order = detail::parse_unsigned(key, value);
    else if (key == "label") config.label = value;
    else if (key == "estimator") config.estimator = value;
    else if (key == "lambda") config.lambda = detail::parse_double(key, value);
    else if (key == "lambda_item") config.lambda_item = detail::parse_double(key, value);
    else if (key == "lambda_d") config.lambda_d = detail::parse_double(key, value);
    else if (key == "kn_d.de") config.kn_de = detail::parse_double_list(key, value);
    else if (key == "kn_d.nu") config.kn_nu = detail::parse_double_list(key, value);
    else if (key == "cutoff") config.cutoff = detail::parse_unsigned(key, value);
    else if (key == "truth_min_count") config.truth_min_count = detail::parse_unsigned(key, value);
    else if (key == "seed") config.seed = detail::parse_unsigned(key, value);
    else if (key == "threads") config.threads = static_cast<unsigned>(detail::parse_unsigned(key, value));
    else if (key == "svg") config.svg = value == "1" || value == "true";
    else if (key == "train") config.train_path = value;
    else if (key == "valid") config.valid_path = value;
    else if (key == "test") config.test_path = value;
    else if (key == "model") config.model_path = value;
    else if (key == "out") config.out_dir = value;
    else if (key == "vocab_size") config.vocab_size = detail::parse_unsigned(key, value);
    else if (key == "docs") config.n_docs = detail::parse_unsigned(key, value);
    else if (key.rfind("plant.", 0) == 0) config.planted.push_back(detail::parse_planted(key, value));
    else throw std::invalid_argument("unknown configuration key \"" + key + "\"");
}

inline void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": expected key=value");
        }
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

namespace detail {

inline std::string format_double_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += format_double(values[i]);
    }
    return out;
}

} // namespace detail

/// The effective settings as sorted key=value lines. `threads` is excluded:
/// it never changes outputs.
inline std::map<std::string, std::string> config_echo(const RunConfig& config) {
    std::map<std::string, std::string> echo;
    echo["order"] = std::to_string(config.order);
    echo["label"] = config.label;
    echo["estimator"] = config.estimator;
    echo["lambda"] = format_double(config.lambda);
    echo["lambda_item"] = format_double(config.lambda_item);
    echo["lambda_d"] = format_double(config.lambda_d);
    if (!config.kn_de.empty()) echo["kn_d.de"] = detail::format_double_list(config.kn_de);
    if (!config.kn_nu.empty()) echo["kn_d.nu"] = detail::format_double_list(config.kn_nu);
    echo["cutoff"] = std::to_string(config.cutoff);
    echo["truth_min_count"] = std::to_string(config.truth_min_count);
    echo["seed"] = std::to_string(config.seed);
    echo["svg"] = config.svg ? "1" : "0";
    if (!config.train_path.empty()) echo["train"] = config.train_path;
    if (!config.valid_path.empty()) echo["valid"] = config.valid_path;
    if (!config.test_path.empty()) echo["test"] = config.test_path;
    if (!config.model_path.empty()) echo["model"] = config.model_path;
    echo["out"] = config.out_dir;
    echo["vocab_size"] = std::to_string(config.vocab_size);
    echo["docs"] = std::to_string(config.n_docs);
    for (std::size_t i = 0; i < config.planted.size(); ++i) {
        const auto& p = config.planted[i];
        echo["plant." + std::to_string(i)] =
            detail::join_items(p.items) + "|" + p.label + "|" + format_double(p.rate);
    }
    return echo;
}

inline void write_manifest(const RunConfig& config, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "# run manifest: reapplying these settings reproduces the outputs byte-identically\n";
    for (const auto& [key, value] : config_echo(config)) out << key << '=' << value << '\n';
    for (const auto& [name, file] :
         std::vector<std::pair<std::string, std::string>>{{"train", config.train_path},
                                                          {"valid", config.valid_path},
                                                          {"test", config.test_path},
                                                          {"model", config.model_path}}) {
        if (!file.empty() && std::filesystem::exists(file)) {
            out << "checksum." << name << '=' << fnv1a_file(file) << '\n';
        }
    }
}

inline EstimatorConfig estimator_config(const RunConfig& config) {
    EstimatorConfig out;
    out.kind = parse_estimator(config.estimator);
    out.lambda = config.lambda;
    out.lambda_item = config.lambda_item;
    out.lambda_d = config.lambda_d;
    if (out.kind == EstimatorKind::kneser_ney) {
        out.kn = KnDiscounts::uniform(config.order);
        if (!config.kn_de.empty()) out.kn.de = config.kn_de;
        if (!config.kn_nu.empty()) out.kn.nu = config.kn_nu;
    }
    out.validate(config.order);
    return out;
}

inline std::filesystem::path ensure_out_dir(const RunConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<Document> read_corpus(const std::string& path, const char* role) {
    if (path.empty()) throw std::invalid_argument(std::string("no ") + role + " corpus configured");
    if (!std::filesystem::exists(path)) {
        throw data_error(std::string(role) + " corpus not found: " + path);
    }
    return parse_annotated_file(path);
}

inline std::filesystem::path model_cache_path(const RunConfig& config) {
    if (!config.model_path.empty()) return config.model_path;
    return std::filesystem::path(config.out_dir) / "model.txt";
}

/// Counts the training corpus into a cached model file. Re-running writes a
/// byte-identical cache.
inline std::filesystem::path cmd_count(const RunConfig& config) {
    const auto docs = read_corpus(config.train_path, "train");
    const auto model =
        build_model_parallel(docs, config.order, EntityTypeFilter{config.label}, config.threads);
    ensure_out_dir(config);
    const auto path = model_cache_path(config);
    save_model_file(model, path);
    return path;
}

inline FrequencyModel load_or_build_model(const RunConfig& config) {
    const auto cache = model_cache_path(config);
    if (std::filesystem::exists(cache)) return load_model_file(cache);
    const auto docs = read_corpus(config.train_path, "train");
    return build_model_parallel(docs, config.order, EntityTypeFilter{config.label}, config.threads);
}

/// Scores and ranks the test candidates, writes the ranked table, both
/// curves, the marker file, and the manifest into the output directory.
inline RankedList cmd_rank(const RunConfig& config) {
    const auto model = load_or_build_model(config);
    if (model.order != config.order) {
        throw data_error("cached model order does not match the configured order");
    }
    const auto test_docs = read_corpus(config.test_path, "test");
    const auto candidates = candidate_set(test_docs, config.order);
    const auto truth = truth_labels(test_docs, EntityTypeFilter{config.label}, config.order,
                                    config.truth_min_count);
    const auto est = estimator_config(config);
    std::unique_ptr<KneserNey> kn;
    if (est.kind == EstimatorKind::kneser_ney) kn = std::make_unique<KneserNey>(model);
    const auto scores = score_candidates(model, kn.get(), candidates, est, config.threads);
    const auto ranked = rank(candidates, scores, truth, config.cutoff);
    const auto rr = rank_recall(ranked, truth);
    const auto pr = precision_recall(ranked, truth);

    const auto dir = ensure_out_dir(config);
    write_ranked_csv(dir / "ranked.csv", ranked);
    write_curve_csv(dir / "rank_recall.csv", rr, "rank", "recall");
    write_curve_csv(dir / "precision_recall.csv", pr, "recall", "precision");
    write_marker_csv(dir / "precision_recall_markers.csv", pr);
    if (config.svg) {
        write_svg_curves(dir / "rank_recall.svg", {{config.estimator, rr}}, "rank", "recall");
        write_svg_curves(dir / "precision_recall.svg", {{config.estimator, pr}}, "recall",
                         "precision");
    }
    write_manifest(config, dir / "manifest.txt");
    return ranked;
}

/// Grid-tunes the configured estimator on the validation split; writes the
/// full trace and the winning parameters.
inline TuneResult cmd_tune(const RunConfig& config) {
    const auto model = load_or_build_model(config);
    const auto valid_docs = read_corpus(config.valid_path, "valid");
    const auto kind = parse_estimator(config.estimator);
    const auto result = tune(model, valid_docs, kind, TuningGrid::default_grid(), config.cutoff,
                             config.truth_min_count, config.threads);

    const auto dir = ensure_out_dir(config);
    {
        auto out = open_output(dir / "tune_trace.csv");
        out << "lambda,lambda_item,lambda_d,auc\n";
        for (const auto& row : result.trace) {
            const bool uses_lambda = kind == EstimatorKind::regularized;
            const bool uses_item = kind != EstimatorKind::regularized;
            const bool uses_d = kind == EstimatorKind::itemized_dependency;
            out << (uses_lambda ? format_double(row.config.lambda) : "") << ','
                << (uses_item ? format_double(row.config.lambda_item) : "") << ','
                << (uses_d ? format_double(row.config.lambda_d) : "") << ','
                << format_double(row.auc) << '\n';
        }
    }
    {
        auto out = open_output(dir / "tuned.txt");
        out << "estimator=" << estimator_name(kind) << '\n';
        if (kind == EstimatorKind::regularized) {
            out << "lambda=" << format_double(result.best.lambda) << '\n';
        } else {
            out << "lambda_item=" << format_double(result.best.lambda_item) << '\n';
        }
        if (kind == EstimatorKind::itemized_dependency) {
            out << "lambda_d=" << format_double(result.best.lambda_d) << '\n';
        }
    }
    write_manifest(config, dir / "manifest.txt");
    return result;
}

/// Tunes the 2N smoothing discounts by training likelihood; writes the trace
/// and the winners as loadable settings.
inline KnTuneResult cmd_tune_kn(const RunConfig& config) {
    const auto model = load_or_build_model(config);
    const auto result = tune_kn(model, default_discount_grid());
    const auto dir = ensure_out_dir(config);
    {
        auto out = open_output(dir / "kn_trace.csv");
        out << "side,order,d,log_likelihood\n";
        for (const auto& row : result.trace) {
            out << (row.side == Side::numerator ? "nu" : "de") << ',' << row.order << ','
                << format_double(row.discount) << ',' << format_double(row.log_likelihood) << '\n';
        }
    }
    {
        auto out = open_output(dir / "tuned_kn.txt");
        out << "kn_d.de=" << detail::format_double_list(result.best.de) << '\n';
        out << "kn_d.nu=" << detail::format_double_list(result.best.nu) << '\n';
    }
    write_manifest(config, dir / "manifest.txt");
    return result;
}

/// Generates a synthetic split and writes the three annotated files.
inline SplitSet cmd_generate(const RunConfig& config) {
    GeneratorOptions opt;
    opt.seed = config.seed;
    opt.vocab_size = config.vocab_size;
    opt.n_docs = config.n_docs;
    opt.planted = config.planted;
    const auto split = generate_synthetic(opt);
    const auto dir = ensure_out_dir(config);
    write_annotated_file(dir / "train.txt", split.train);
    write_annotated_file(dir / "valid.txt", split.valid);
    write_annotated_file(dir / "test.txt", split.test);
    write_manifest(config, dir / "manifest.txt");
    return split;
}

namespace detail {

inline void write_sweep_csv(const std::filesystem::path& path, const std::string& parameter_name,
                            const std::vector<SweepRow>& rows) {
    auto out = open_output(path);
    out << parameter_name << ",w_A,w_B,w_C,w_D\n";
    for (const auto& row : rows) {
        out << format_double(row.parameter);
        for (double v : row.estimates) out << ',' << format_double(v);
        out << '\n';
    }
}

inline void write_sweep_svg(const std::filesystem::path& path,
                            const std::vector<SweepRow>& rows, const std::string& x_label) {
    static const char* kNames[4] = {"w_A", "w_B", "w_C", "w_D"};
    std::vector<std::pair<std::string, CurveSeries>> series(4);
    for (std::size_t s = 0; s < 4; ++s) {
        series[s].first = kNames[s];
        series[s].second.cutoff = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            series[s].second.points.push_back(
                CurvePoint{static_cast<double>(i + 1), rows[i].estimates[s]});
        }
    }
    write_svg_curves(path, series, x_label + " (grid index)", "estimate");
}

} // namespace detail

/// Emits the three built-in regularization sweeps as CSVs (and optional
/// SVGs): the regularized ratio over lambda, and the combined ratio over
/// lambda_item (lambda_d pinned at 1e-5) and over lambda_d (lambda_item
/// pinned at 1e-4).
inline void cmd_reproduce_figures(const RunConfig& config) {
    const auto dir = ensure_out_dir(config);
    const auto fig1 = regularized_ratio_sweep();
    const auto fig2 = combined_ratio_item_sweep();
    const auto fig3 = combined_ratio_dependency_sweep();
    detail::write_sweep_csv(dir / "fig1_regularized_ratio.csv", "lambda", fig1);
    detail::write_sweep_csv(dir / "fig2_combined_ratio_lambda_item.csv", "lambda_item", fig2);
    detail::write_sweep_csv(dir / "fig3_combined_ratio_lambda_d.csv", "lambda_d", fig3);
    if (config.svg) {
        detail::write_sweep_svg(dir / "fig1_regularized_ratio.svg", fig1, "lambda");
        detail::write_sweep_svg(dir / "fig2_combined_ratio_lambda_item.svg", fig2, "lambda_item");
        detail::write_sweep_svg(dir / "fig3_combined_ratio_lambda_d.svg", fig3, "lambda_d");
    }
}

} // namespace ngramlr

#endif
