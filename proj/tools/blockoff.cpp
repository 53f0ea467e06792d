#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "blockoff/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"blockoff: detect replaceable function blocks and search for the fastest offload pattern"};
    app.require_subcommand(1);

    blockoff::RunConfig config;
    std::vector<std::string> sources;
    bool assume_yes = false;
    bool assume_no = false;
    std::string out_dir = "out";

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("sources", sources, "C source files")->required()->check(CLI::ExistingFile);
        cmd->add_option("--db", config.db_root, "Pattern database root")->required()->check(CLI::ExistingDirectory);
        cmd->add_option("--sigma", config.sigma, "Similarity threshold")
            ->default_val(blockoff::kDefaultSigma)
            ->check(CLI::Range(0.0, 1.0));
    };

    auto* detect = app.add_subcommand("detect", "List offload candidates");
    add_common(detect);

    auto* search = app.add_subcommand("search", "Measure offload patterns and select the fastest");
    add_common(search);
    search->add_option("--profiles", config.profiles, "Backend profiles JSON")->required()->check(CLI::ExistingFile);
    search->add_option("--reps", config.repetitions, "Runs per pattern")
        ->default_val(blockoff::kDefaultRepetitions)
        ->check(CLI::PositiveNumber);
    search->add_option("--out", out_dir, "Output directory")->default_val("out");
    auto* yes = search->add_flag("--assume-yes", assume_yes, "Approve every interface change");
    search->add_flag("--assume-no", assume_no, "Decline every interface change")->excludes(yes);

    CLI11_PARSE(app, argc, argv);

    for (const auto& s : sources) config.sources.emplace_back(s);
    config.out_dir = out_dir;
    if (assume_yes) config.mode = blockoff::ConfirmMode::AssumeYes;
    if (assume_no) config.mode = blockoff::ConfirmMode::AssumeNo;

    const blockoff::Console console{std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0};
    try {
        if (detect->parsed()) return blockoff::cmd_detect(config, console);
        return blockoff::cmd_search(config, console);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return blockoff::kExitInputError;
    }
}
