#include "termmap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "termmap/util.hpp"

namespace termmap {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + key + "' in " + where);
        }
    }
}

std::int64_t micro_from_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    double d = v.get<double>();
    if (!(d >= 0)) throw ConfigError(where + " must be non-negative");
    return static_cast<std::int64_t>(std::llround(d * static_cast<double>(kWeightScale)));
}

int int_in_range(const json& v, int lo, int hi, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    long long n = v.get<long long>();
    if (n < lo || n > hi) {
        throw ConfigError(where + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(n);
}

RelationKind kind_from_config(const std::string& name, const std::string& where) {
    RelationKind kind;
    if (!relation_kind_from_name(name, kind)) {
        throw ConfigError("unknown relation kind '" + name + "' in " + where);
    }
    return kind;
}

std::filesystem::path resolve(const std::string& raw, const std::filesystem::path& base_dir) {
    std::filesystem::path p(raw);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

bool label_is_pathsafe(const std::string& label) {
    if (label.empty()) return false;
    for (char c : label) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '_' || c == '-';
        if (!ok) return false;
    }
    return label != "." && label != "..";
}

}  // namespace

PipelineConfig PipelineConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    return from_json(j, path.parent_path());
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(j, {"input", "periods", "lexicons", "termex", "relations", "clustering",
                            "display", "output"},
                        "config root");

    PipelineConfig cfg;

    // input
    if (!j.contains("input")) throw ConfigError("config needs an 'input' section");
    const json& input = j.at("input");
    reject_unknown_keys(input, {"path", "format"}, "input");
    if (!input.contains("path") || !input.at("path").is_string()) {
        throw ConfigError("input.path must be a string");
    }
    cfg.input_path_raw = input.at("path").get<std::string>();
    cfg.input_path = resolve(cfg.input_path_raw, base_dir);
    cfg.input_format = input.value("format", "isi");
    if (cfg.input_format != "isi" && cfg.input_format != "jsonl") {
        throw ConfigError("input.format must be 'isi' or 'jsonl'");
    }

    // periods
    if (!j.contains("periods") || !j.at("periods").is_array()) {
        throw ConfigError("config needs a 'periods' array");
    }
    for (const json& p : j.at("periods")) {
        reject_unknown_keys(p, {"label", "start_year", "end_year"}, "periods[]");
        PeriodSpec spec;
        if (!p.contains("label") || !p.at("label").is_string()) {
            throw ConfigError("period label must be a string");
        }
        spec.label = p.at("label").get<std::string>();
        if (!label_is_pathsafe(spec.label)) {
            throw ConfigError("period label '" + spec.label + "' must be filesystem-safe ([A-Za-z0-9._-])");
        }
        spec.start_year = int_in_range(p.at("start_year"), 1800, 2100, "period start_year");
        spec.end_year = int_in_range(p.at("end_year"), 1800, 2100, "period end_year");
        cfg.periods.push_back(std::move(spec));
    }
    validate_periods(cfg.periods);

    // lexicons
    if (!j.contains("lexicons")) throw ConfigError("config needs a 'lexicons' section");
    const json& lex = j.at("lexicons");
    reject_unknown_keys(lex, {"pos", "plural_exceptions", "synsets"}, "lexicons");
    for (const char* key : {"pos", "plural_exceptions", "synsets"}) {
        if (!lex.contains(key) || !lex.at(key).is_string()) {
            throw ConfigError(std::string("lexicons.") + key + " must be a string path");
        }
    }
    cfg.pos_lexicon_raw = lex.at("pos").get<std::string>();
    cfg.plural_exceptions_raw = lex.at("plural_exceptions").get<std::string>();
    cfg.synsets_raw = lex.at("synsets").get<std::string>();
    cfg.pos_lexicon_path = resolve(cfg.pos_lexicon_raw, base_dir);
    cfg.plural_exceptions_path = resolve(cfg.plural_exceptions_raw, base_dir);
    cfg.synsets_path = resolve(cfg.synsets_raw, base_dir);

    // termex
    if (j.contains("termex")) {
        const json& t = j.at("termex");
        reject_unknown_keys(t, {"max_term_length", "min_doc_freq", "emit_subterms"}, "termex");
        if (t.contains("max_term_length")) {
            cfg.termex.max_term_length = int_in_range(t.at("max_term_length"), 2, 6, "termex.max_term_length");
        }
        if (t.contains("min_doc_freq")) {
            cfg.termex.min_doc_freq = int_in_range(t.at("min_doc_freq"), 1, 1000000, "termex.min_doc_freq");
        }
        if (t.contains("emit_subterms")) {
            if (!t.at("emit_subterms").is_boolean()) throw ConfigError("termex.emit_subterms must be a boolean");
            cfg.termex.emit_subterms = t.at("emit_subterms").get<bool>();
        }
    }

    // relations
    if (j.contains("relations")) {
        const json& r = j.at("relations");
        reject_unknown_keys(r, {"enabled", "weights", "tight"}, "relations");
        if (r.contains("enabled")) {
            for (const auto& [name, value] : r.at("enabled").items()) {
                if (!value.is_boolean()) throw ConfigError("relations.enabled values must be booleans");
                cfg.relations.set_enabled(kind_from_config(name, "relations.enabled"), value.get<bool>());
            }
        }
        if (r.contains("weights")) {
            for (const auto& [name, value] : r.at("weights").items()) {
                cfg.weights.set_weight(kind_from_config(name, "relations.weights"),
                                       micro_from_number(value, "relations.weights." + name));
            }
        }
        if (r.contains("tight")) {
            if (!r.at("tight").is_array()) throw ConfigError("relations.tight must be an array");
            cfg.weights.tight_kinds.clear();
            for (const json& name : r.at("tight")) {
                if (!name.is_string()) throw ConfigError("relations.tight entries must be strings");
                cfg.weights.tight_kinds.insert(kind_from_config(name.get<std::string>(), "relations.tight"));
            }
        }
    }

    // clustering
    if (j.contains("clustering")) {
        const json& c = j.at("clustering");
        reject_unknown_keys(c, {"merge_threshold", "max_iterations"}, "clustering");
        if (c.contains("merge_threshold")) {
            cfg.weights.merge_threshold_micro = micro_from_number(c.at("merge_threshold"), "clustering.merge_threshold");
        }
        if (c.contains("max_iterations")) {
            cfg.weights.max_iterations = int_in_range(c.at("max_iterations"), 1, 1000, "clustering.max_iterations");
        }
    }
    cfg.weights.validate();

    // display
    if (j.contains("display")) {
        const json& d = j.at("display");
        reject_unknown_keys(d, {"top_k", "min_size", "clu_mode"}, "display");
        if (d.contains("top_k")) cfg.display_top_k = int_in_range(d.at("top_k"), 1, 1000000, "display.top_k");
        if (d.contains("min_size")) {
            cfg.display_min_size = int_in_range(d.at("min_size"), 0, 1000000, "display.min_size");
        }
        if (d.contains("clu_mode")) {
            std::string mode = d.at("clu_mode").get<std::string>();
            if (mode != "self" && mode != "component") {
                throw ConfigError("display.clu_mode must be 'self' or 'component'");
            }
            cfg.clu_by_component = (mode == "component");
        }
    }

    // output
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown_keys(o, {"directory", "formats"}, "output");
        if (o.contains("directory")) {
            cfg.output_directory = resolve(o.at("directory").get<std::string>(), base_dir);
        }
        if (o.contains("formats")) {
            if (!o.at("formats").is_array()) throw ConfigError("output.formats must be an array");
            cfg.output_formats.clear();
            for (const json& f : o.at("formats")) {
                std::string name = f.get<std::string>();
                if (name != "pajek" && name != "graphml" && name != "json") {
                    throw ConfigError("unknown output format '" + name + "'");
                }
                cfg.output_formats.insert(name);
            }
        }
    }

    return cfg;
}

nlohmann::json PipelineConfig::semantic_json() const {
    json j;
    j["input"] = {{"path", input_path_raw}, {"format", input_format}};
    json periods_json = json::array();
    for (const PeriodSpec& p : periods) {
        periods_json.push_back({{"label", p.label}, {"start_year", p.start_year}, {"end_year", p.end_year}});
    }
    j["periods"] = periods_json;
    j["lexicons"] = {{"pos", pos_lexicon_raw},
                     {"plural_exceptions", plural_exceptions_raw},
                     {"synsets", synsets_raw}};
    j["termex"] = {{"max_term_length", termex.max_term_length},
                   {"min_doc_freq", termex.min_doc_freq},
                   {"emit_subterms", termex.emit_subterms}};
    json enabled = json::object();
    json weight_map = json::object();
    for (int i = 0; i < kRelationKindCount; ++i) {
        RelationKind kind = static_cast<RelationKind>(i);
        enabled[relation_kind_name(kind)] = relations.is_enabled(kind);
        weight_map[relation_kind_name(kind)] = weights.weight_of(kind);
    }
    std::vector<std::string> tight;
    for (RelationKind kind : weights.tight_kinds) tight.push_back(relation_kind_name(kind));
    std::sort(tight.begin(), tight.end());
    j["relations"] = {{"enabled", enabled}, {"weights_micro", weight_map}, {"tight", tight}};
    j["clustering"] = {{"merge_threshold_micro", weights.merge_threshold_micro},
                       {"max_iterations", weights.max_iterations}};
    j["display"] = {{"top_k", display_top_k},
                    {"min_size", display_min_size},
                    {"clu_mode", clu_by_component ? "component" : "self"}};
    j["output_formats"] = std::vector<std::string>(output_formats.begin(), output_formats.end());
    return j;
}

std::string PipelineConfig::config_hash() const { return fnv1a64_hex(semantic_json().dump()); }

void PipelineConfig::validate_files() const {
    namespace fs = std::filesystem;
    for (const auto& [name, path] : std::initializer_list<std::pair<const char*, const fs::path*>>{
             {"input.path", &input_path},
             {"lexicons.pos", &pos_lexicon_path},
             {"lexicons.plural_exceptions", &plural_exceptions_path},
             {"lexicons.synsets", &synsets_path}}) {
        if (!fs::exists(*path)) {
            throw ConfigError(std::string(name) + " does not exist: " + path->string());
        }
    }
}

}  // namespace termmap
