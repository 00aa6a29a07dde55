// Command-line surface for the N-gram likelihood-ratio toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 precondition or
// estimator error.

#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ngramlr/runner.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides; // key, value in flag order
    std::vector<std::string> plants;
};

void add_common_options(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--config", cli.config_path, "flat key=value config file (flags override it)");
    const std::vector<std::pair<std::string, std::string>> options = {
        {"--order", "order"},
        {"--label", "label"},
        {"--estimator", "estimator"},
        {"--lambda", "lambda"},
        {"--lambda-item", "lambda_item"},
        {"--lambda-d", "lambda_d"},
        {"--cutoff", "cutoff"},
        {"--seed", "seed"},
        {"--threads", "threads"},
        {"--out", "out"},
        {"--train", "train"},
        {"--valid", "valid"},
        {"--test", "test"},
        {"--model", "model"},
        {"--vocab-size", "vocab_size"},
        {"--docs", "docs"},
        {"--kn-d-de", "kn_d.de"},
        {"--kn-d-nu", "kn_d.nu"},
    };
    for (const auto& [flag, key] : options) {
        cmd->add_option_function<std::string>(
            flag,
            [&cli, key = key](const std::string& value) { cli.overrides.emplace_back(key, value); });
    }
    cmd->add_option_function<std::string>(
           "--truth-min-count",
           [&cli](const std::string& value) { cli.overrides.emplace_back("truth_min_count", value); })
        ->check(CLI::IsMember({"1", "2"}));
    cmd->add_option("--plant", cli.plants, "planted context `tok1 tok2|LABEL|rate` (repeatable)");
    cmd->add_flag_function("--svg", [&cli](std::int64_t) { cli.overrides.emplace_back("svg", "1"); },
                           "also write SVG plots");
}

ngramlr::RunConfig assemble(const Cli& cli) {
    ngramlr::RunConfig config;
    if (!cli.config_path.empty()) ngramlr::load_config_file(config, cli.config_path);
    for (const auto& [key, value] : cli.overrides) ngramlr::apply_setting(config, key, value);
    for (std::size_t i = 0; i < cli.plants.size(); ++i) {
        ngramlr::apply_setting(config, "plant." + std::to_string(i), cli.plants[i]);
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood-ratio estimation for discrete N-grams from paired frequency samples"};
    app.require_subcommand(1);
    Cli cli;

    auto* count = app.add_subcommand("count", "count a training corpus into a cached model");
    auto* rank = app.add_subcommand("rank", "score, rank, and evaluate test candidates");
    auto* tune = app.add_subcommand("tune", "grid-tune regularization on the validation split");
    auto* tune_kn = app.add_subcommand("tune-kn", "tune smoothing discounts by training likelihood");
    auto* generate = app.add_subcommand("generate", "generate a synthetic annotated corpus");
    auto* figures = app.add_subcommand("reproduce-figures", "emit the built-in regularization sweeps");
    for (auto* cmd : {count, rank, tune, tune_kn, generate, figures}) {
        add_common_options(cmd, cli);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto config = assemble(cli);
        if (count->parsed()) {
            const auto path = ngramlr::cmd_count(config);
            std::printf("wrote %s\n", path.string().c_str());
        } else if (rank->parsed()) {
            const auto ranked = ngramlr::cmd_rank(config);
            std::printf("ranked %zu candidates into %s\n", ranked.entries.size(),
                        config.out_dir.c_str());
        } else if (tune->parsed()) {
            const auto result = ngramlr::cmd_tune(config);
            std::printf("tuned %s over %zu grid points into %s\n", config.estimator.c_str(),
                        result.trace.size(), config.out_dir.c_str());
        } else if (tune_kn->parsed()) {
            const auto result = ngramlr::cmd_tune_kn(config);
            std::printf("tuned %zu discounts into %s\n",
                        result.best.de.size() + result.best.nu.size(), config.out_dir.c_str());
        } else if (generate->parsed()) {
            const auto split = ngramlr::cmd_generate(config);
            std::printf("generated %zu/%zu/%zu documents into %s\n", split.train.size(),
                        split.valid.size(), split.test.size(), config.out_dir.c_str());
        } else if (figures->parsed()) {
            ngramlr::cmd_reproduce_figures(config);
            std::printf("wrote sweep CSVs into %s\n", config.out_dir.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const ngramlr::precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const ngramlr::data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
