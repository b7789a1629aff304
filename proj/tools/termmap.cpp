// Command-line front end: the full pipeline as `run`, plus one subcommand
// per stage so intermediate dumps can be produced and inspected separately.

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "termmap/pipeline.hpp"
#include "termmap/util.hpp"

namespace {

// Stage-identifying exit codes; configuration and usage problems exit 2.
const std::map<std::string, int> kStageExitCodes = {
    {"ingest", 10}, {"extract", 11}, {"graph", 12},
    {"cluster", 13}, {"export", 14}, {"compare", 15},
};

int run_stages(const termmap::PipelineContext& ctx, const std::string& only_stage) {
    for (const auto& [name, stage] : termmap::pipeline_stages()) {
        if (!only_stage.empty() && name != only_stage) continue;
        try {
            stage(ctx);
        } catch (const std::exception& e) {
            std::cerr << "termmap: " << name << ": " << e.what() << "\n";
            return kStageExitCodes.at(name);
        }
    }
    if (only_stage.empty()) {
        try {
            termmap::write_manifest(ctx);
        } catch (const std::exception& e) {
            std::cerr << "termmap: manifest: " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"termmap: multiword-term topic maps and trend reports from bibliographic records"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;

    std::vector<std::string> stage_names;
    for (const auto& [name, _] : termmap::pipeline_stages()) stage_names.push_back(name);

    std::map<std::string, CLI::App*> subcommands;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "pipeline config file (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--threads", threads, "worker threads; affects speed only, never output")
            ->check(CLI::Range(1, 256));
    };

    add_common(subcommands.emplace("run", app.add_subcommand("run", "run every stage and write the manifest"))
                   .first->second);
    for (const std::string& name : stage_names) {
        add_common(subcommands.emplace(name, app.add_subcommand(name, name + " stage")).first->second);
    }

    CLI11_PARSE(app, argc, argv);

    std::string chosen = app.get_subcommands().front()->get_name();

    termmap::PipelineConfig cfg;
    try {
        cfg = termmap::PipelineConfig::load_file(config_path);
        if (chosen == "run" || chosen == "ingest") cfg.validate_files();
        if (chosen == "compare" && cfg.periods.size() < 2) {
            throw termmap::ConfigError("compare needs at least two periods in the config");
        }
    } catch (const std::exception& e) {
        std::cerr << "termmap: config: " << e.what() << "\n";
        return 2;
    }

    termmap::PipelineContext ctx = termmap::make_context(std::move(cfg), out_dir, threads);
    return run_stages(ctx, chosen == "run" ? "" : chosen);
}
