#ifndef TERMMAP_PIPELINE_HPP
#define TERMMAP_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "termmap/config.hpp"

namespace termmap {

struct PipelineContext {
    PipelineConfig cfg;
    std::filesystem::path out_dir;  // cfg.output_directory unless overridden
    int threads = 1;
};

PipelineContext make_context(PipelineConfig cfg, const std::filesystem::path& out_override = {},
                             int threads = 1);

// Stage functions. Each one reads the previous stage's dumps from the output
// tree and writes its own, so chaining the subcommands reproduces exactly
// what run_pipeline writes. Outputs are staged in memory and committed
// together; a failing stage leaves no partial artifacts behind.
void stage_ingest(const PipelineContext& ctx);
void stage_extract(const PipelineContext& ctx);
void stage_graph(const PipelineContext& ctx);
void stage_cluster(const PipelineContext& ctx);
void stage_export(const PipelineContext& ctx);
void stage_compare(const PipelineContext& ctx);

using StageFn = void (*)(const PipelineContext&);
// Ordered stage table shared by run_pipeline and the CLI.
const std::vector<std::pair<std::string, StageFn>>& pipeline_stages();

// All stages in order, then the run manifest (config hash + artifact checksums).
void run_pipeline(const PipelineContext& ctx);

void write_manifest(const PipelineContext& ctx);
inline constexpr const char* kManifestFile = "manifest.json";

}  // namespace termmap

#endif
