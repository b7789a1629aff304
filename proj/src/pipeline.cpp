#include "termmap/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "termmap/mapout.hpp"
#include "termmap/util.hpp"

#include <json.hpp>

namespace termmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stage outputs are collected first and written together so an error in the
// middle of a stage never leaves a partial artifact set behind.
class StageOutputs {
public:
    void add(fs::path path, std::string content) {
        files_.emplace_back(std::move(path), std::move(content));
    }

    void commit() {
        std::vector<fs::path> written;
        try {
            for (const auto& [path, content] : files_) {
                write_file_atomic(path, content);
                written.push_back(path);
            }
        } catch (...) {
            for (const fs::path& p : written) {
                std::error_code ec;
                fs::remove(p, ec);
            }
            throw;
        }
    }

private:
    std::vector<std::pair<fs::path, std::string>> files_;
};

fs::path period_dir(const PipelineContext& ctx, const std::string& label) {
    return ctx.out_dir / label;
}

std::vector<Record> load_period_records(const PipelineContext& ctx, const std::string& label) {
    fs::path dir = period_dir(ctx, label);

    // the stats sidecar carries the ingest format version for this period
    std::ifstream stats_in(dir / "stats.json");
    if (!stats_in) {
        throw ConfigError("missing " + (dir / "stats.json").string() + "; run the ingest stage first");
    }
    json stats = json::parse(stats_in, nullptr, false);
    if (stats.is_discarded() || stats.value("format", "") != "termmap-stats" || stats.value("version", -1) != 1) {
        throw ConfigError("stats dump version mismatch: expected 'termmap-stats' v1 in " +
                          (dir / "stats.json").string());
    }

    std::ifstream in(dir / "records.jsonl");
    if (!in) {
        throw ConfigError("missing " + (dir / "records.jsonl").string() + "; run the ingest stage first");
    }
    return parse_jsonl(in).records;
}

CorpusStats load_period_stats(const PipelineContext& ctx, const std::string& label) {
    fs::path path = period_dir(ctx, label) / "stats.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("format", "") != "termmap-stats" || j.value("version", -1) != 1) {
        throw ConfigError("stats dump version mismatch: expected 'termmap-stats' v1 in " + path.string());
    }
    CorpusStats stats;
    stats.record_count = j.at("record_count").get<long long>();
    for (const auto& [source, count] : j.at("per_source").items()) {
        stats.per_source_counts[source] = count.get<long long>();
    }
    for (const auto& [year, count] : j.at("per_year").items()) {
        stats.per_year_counts[std::stoi(year)] = count.get<long long>();
    }
    return stats;
}

TermIndex load_period_index(const PipelineContext& ctx, const std::string& label) {
    fs::path path = period_dir(ctx, label) / "terms.tsv";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing " + path.string() + "; run the extract stage first");
    return TermIndex::parse_dump(in);
}

TermGraph load_period_graph(const PipelineContext& ctx, const std::string& label, const TermIndex& index) {
    fs::path path = period_dir(ctx, label) / "edges.tsv";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing " + path.string() + "; run the graph stage first");
    return parse_graph_dump(in, index);
}

std::vector<Cluster> load_period_clusters(const PipelineContext& ctx, const std::string& label,
                                          const TermIndex& index) {
    fs::path path = period_dir(ctx, label) / "clusters.tsv";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing " + path.string() + "; run the cluster stage first");
    return parse_clusters_dump(in, index);
}

std::string stats_json_text(const CorpusStats& stats, const PeriodSpec& period) {
    json j;
    j["format"] = "termmap-stats";
    j["version"] = 1;
    j["period"] = {{"label", period.label}, {"start_year", period.start_year}, {"end_year", period.end_year}};
    j["record_count"] = stats.record_count;
    json sources = json::object();
    for (const auto& [source, count] : stats.per_source_counts) sources[source] = count;
    j["per_source"] = sources;
    json years = json::object();
    for (const auto& [year, count] : stats.per_year_counts) years[std::to_string(year)] = count;
    j["per_year"] = years;
    return j.dump(2) + "\n";
}

}  // namespace

PipelineContext make_context(PipelineConfig cfg, const fs::path& out_override, int threads) {
    PipelineContext ctx;
    ctx.out_dir = out_override.empty() ? cfg.output_directory : out_override;
    ctx.cfg = std::move(cfg);
    ctx.threads = std::max(threads, 1);
    return ctx;
}

void stage_ingest(const PipelineContext& ctx) {
    ctx.cfg.validate_files();

    std::ifstream in(ctx.cfg.input_path);
    if (!in) throw IoError("cannot open input: " + ctx.cfg.input_path.string());
    ParseResult parsed = ctx.cfg.input_format == "isi" ? parse_isi(in) : parse_jsonl(in);

    auto buckets = split_periods(parsed.records, ctx.cfg.periods);

    StageOutputs out;
    json summary;
    summary["format"] = "termmap-ingest";
    summary["version"] = 1;
    summary["input_format"] = ctx.cfg.input_format;
    summary["records"] = static_cast<long long>(parsed.records.size());
    summary["skipped"] = parsed.skipped;
    summary["warnings"] = parsed.warnings;
    json period_counts = json::object();

    for (const PeriodSpec& period : ctx.cfg.periods) {
        const std::vector<Record>& records = buckets.at(period.label);
        fs::path dir = period_dir(ctx, period.label);
        out.add(dir / "records.jsonl", serialize_jsonl(records));
        out.add(dir / "stats.json", stats_json_text(corpus_stats(records), period));
        period_counts[period.label] = static_cast<long long>(records.size());
    }
    const std::vector<Record>& unassigned = buckets.at(kUnassignedPeriod);
    summary["periods"] = period_counts;
    summary["unassigned"] = static_cast<long long>(unassigned.size());
    if (!unassigned.empty()) {
        out.add(ctx.out_dir / kUnassignedPeriod / "records.jsonl", serialize_jsonl(unassigned));
    }
    out.add(ctx.out_dir / "ingest.json", summary.dump(2) + "\n");
    out.commit();
}

void stage_extract(const PipelineContext& ctx) {
    PosLexicon lexicon = PosLexicon::load_file(ctx.cfg.pos_lexicon_path);
    PluralExceptions plurals = PluralExceptions::load_file(ctx.cfg.plural_exceptions_path);

    StageOutputs out;
    for (const PeriodSpec& period : ctx.cfg.periods) {
        std::vector<Record> records = load_period_records(ctx, period.label);

        // data-parallel per record; partial indexes merge commutatively
        std::vector<TermIndex> partial(static_cast<std::size_t>(ctx.threads) + 1);
        parallel_chunks(records.size(), ctx.threads,
                        [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                            TermIndex& local = partial[chunk];
                            for (std::size_t r = begin; r < end; ++r) {
                                const Record& rec = records[r];
                                std::vector<std::vector<Token>> tagged;
                                for (const RawSentence& sentence : tokenize(rec.analysis_text())) {
                                    tagged.push_back(pos_tag(sentence, lexicon));
                                }
                                for (const TermOccurrence& occ :
                                     extract_terms(tagged, plurals, ctx.cfg.termex)) {
                                    local.add_occurrence(occ.term, rec.id);
                                }
                            }
                        });
        TermIndex merged;
        for (const TermIndex& p : partial) merged.merge(p);
        out.add(period_dir(ctx, period.label) / "terms.tsv", merged.pruned(ctx.cfg.termex).dump());
    }
    out.commit();
}

void stage_graph(const PipelineContext& ctx) {
    SynLex syn = SynLex::load_file(ctx.cfg.synsets_path);
    if (!ctx.cfg.relations.any_enabled()) {
        std::cerr << "termmap: warning: all relation kinds are disabled; edge lists will be empty\n";
    }

    StageOutputs out;
    for (const PeriodSpec& period : ctx.cfg.periods) {
        TermIndex index = load_period_index(ctx, period.label);
        TermGraph g = build_graph(index, syn, ctx.cfg.relations, ctx.threads);
        out.add(period_dir(ctx, period.label) / "edges.tsv", dump_graph(g));
    }
    out.commit();
}

void stage_cluster(const PipelineContext& ctx) {
    StageOutputs out;
    for (const PeriodSpec& period : ctx.cfg.periods) {
        TermIndex index = load_period_index(ctx, period.label);
        TermGraph g = load_period_graph(ctx, period.label, index);
        auto components = tight_components(g, ctx.cfg.weights);
        std::vector<Cluster> clusters = merge_components(components, g, ctx.cfg.weights);
        out.add(period_dir(ctx, period.label) / "clusters.tsv", dump_clusters(clusters));
    }
    out.commit();
}

void stage_export(const PipelineContext& ctx) {
    StageOutputs out;
    for (const PeriodSpec& period : ctx.cfg.periods) {
        TermIndex index = load_period_index(ctx, period.label);
        TermGraph g = load_period_graph(ctx, period.label, index);
        std::vector<Cluster> clusters = load_period_clusters(ctx, period.label, index);
        CorpusStats stats = load_period_stats(ctx, period.label);

        ClusterGraph full = build_cluster_graph(clusters, g);
        ClusterGraph display = select_for_display(full, ctx.cfg.display_top_k, ctx.cfg.display_min_size);
        if (display.clusters.empty()) {
            throw ConfigError("display selection yields no clusters for period '" + period.label +
                              "'; lower display.min_size or check the corpus");
        }

        fs::path dir = period_dir(ctx, period.label);
        if (ctx.cfg.output_formats.count("pajek")) {
            PajekFiles pajek = write_pajek(display, ctx.cfg.clu_by_component);
            out.add(dir / "map.net", pajek.net);
            out.add(dir / "map.clu", pajek.clu);
            out.add(dir / "map.vec", pajek.vec);
        }
        if (ctx.cfg.output_formats.count("graphml")) {
            out.add(dir / "map.graphml", write_graphml(display));
        }
        // the JSON report always ships: it records the run and feeds compare
        out.add(dir / "report.json", write_report(make_report(display, stats, period)));
    }
    out.commit();
}

void stage_compare(const PipelineContext& ctx) {
    if (ctx.cfg.periods.size() < 2) {
        std::cerr << "termmap: note: fewer than two periods; nothing to compare\n";
        return;
    }
    StageOutputs out;
    for (std::size_t i = 0; i + 1 < ctx.cfg.periods.size(); ++i) {
        const std::string& l1 = ctx.cfg.periods[i].label;
        const std::string& l2 = ctx.cfg.periods[i + 1].label;
        auto load = [&](const std::string& label) {
            fs::path path = period_dir(ctx, label) / "report.json";
            std::ifstream in(path);
            if (!in) throw ConfigError("missing " + path.string() + "; run the export stage first");
            return load_report(in);
        };
        ComparisonReport report = compare_periods(load(l1), load(l2));
        out.add(ctx.out_dir / ("compare_" + l1 + "_vs_" + l2 + ".json"), write_comparison(report));
    }
    out.commit();
}

const std::vector<std::pair<std::string, StageFn>>& pipeline_stages() {
    static const std::vector<std::pair<std::string, StageFn>> stages = {
        {"ingest", &stage_ingest}, {"extract", &stage_extract}, {"graph", &stage_graph},
        {"cluster", &stage_cluster}, {"export", &stage_export}, {"compare", &stage_compare},
    };
    return stages;
}

void run_pipeline(const PipelineContext& ctx) {
    for (const auto& [_, stage] : pipeline_stages()) stage(ctx);
    write_manifest(ctx);
}

void write_manifest(const PipelineContext& ctx) {
    json artifacts = json::object();
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(ctx.out_dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().filename() == kManifestFile) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& path : files) {
        std::string rel = fs::relative(path, ctx.out_dir).generic_string();
        artifacts[rel] = fnv1a64_hex(read_file(path));
    }
    json manifest;
    manifest["format"] = "termmap-manifest";
    manifest["version"] = 1;
    manifest["config_hash"] = ctx.cfg.config_hash();
    manifest["artifacts"] = artifacts;
    write_file_atomic(ctx.out_dir / kManifestFile, manifest.dump(2) + "\n");
}

}  // namespace termmap
