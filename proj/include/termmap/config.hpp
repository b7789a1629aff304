#ifndef TERMMAP_CONFIG_HPP
#define TERMMAP_CONFIG_HPP

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "termmap/cluster.hpp"
#include "termmap/corpus.hpp"
#include "termmap/termex.hpp"
#include "termmap/variants.hpp"

namespace termmap {

// Whole-pipeline configuration, loaded from a JSON file. Relative paths are
// resolved against the config file's directory; the raw strings are kept so
// the config hash does not depend on where the tree is checked out.
struct PipelineConfig {
    std::filesystem::path input_path;
    std::string input_path_raw;
    std::string input_format = "isi";  // "isi" | "jsonl"

    std::vector<PeriodSpec> periods;

    std::filesystem::path pos_lexicon_path;
    std::filesystem::path plural_exceptions_path;
    std::filesystem::path synsets_path;
    std::string pos_lexicon_raw;
    std::string plural_exceptions_raw;
    std::string synsets_raw;

    TermexConfig termex;
    RelationConfig relations;
    RelationWeights weights = RelationWeights::defaults();

    int display_top_k = 60;
    int display_min_size = 2;
    bool clu_by_component = false;

    std::filesystem::path output_directory = "out";
    std::set<std::string> output_formats = {"graphml", "json", "pajek"};

    static PipelineConfig load_file(const std::filesystem::path& path);
    static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

    // Canonical form of every output-affecting field, defaults materialized.
    // Excludes the output directory (location, not content) and anything set
    // only on the command line (thread count).
    nlohmann::json semantic_json() const;
    std::string config_hash() const;

    // Referenced files must exist; used before running stages.
    void validate_files() const;
};

}  // namespace termmap

#endif
