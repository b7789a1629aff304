#include "termmap/mapout.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "termmap/util.hpp"

#include <json.hpp>

namespace termmap {

namespace {

using nlohmann::json;

json stats_to_json(const CorpusStats& stats) {
    json j;
    j["record_count"] = stats.record_count;
    json sources = json::object();
    for (const auto& [source, count] : stats.per_source_counts) sources[source] = count;
    j["per_source"] = sources;
    json years = json::object();
    for (const auto& [year, count] : stats.per_year_counts) years[std::to_string(year)] = count;
    j["per_year"] = years;
    return j;
}

CorpusStats stats_from_json(const json& j) {
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

void require_format(const json& j, const std::string& format, int version) {
    std::string found_format = j.value("format", "?");
    int found_version = j.value("version", -1);
    if (found_format != format || found_version != version) {
        throw ConfigError("report version mismatch: expected '" + format + "' v" +
                          std::to_string(version) + ", found '" + found_format + "' v" +
                          std::to_string(found_version));
    }
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string pajek_quote(const std::string& label) {
    std::string out = "\"";
    for (char c : label) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

PeriodReport make_report(const ClusterGraph& cg, const CorpusStats& stats, const PeriodSpec& period) {
    if (cg.clusters.empty()) throw ConfigError("refusing to report an empty cluster list");
    PeriodReport report;
    report.period = period;
    report.stats = stats;
    for (const Cluster& c : cg.clusters) {
        ReportCluster rc;
        rc.id = c.id;
        rc.label = c.label;
        for (const Term& t : c.members) rc.members.push_back(t.canonical);
        report.clusters.push_back(std::move(rc));
    }
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const ReportCluster& a, const ReportCluster& b) { return a.id < b.id; });
    for (const auto& [pair, count] : cg.links) {
        report.links.push_back(ReportLink{pair.first, pair.second, count});
    }
    std::sort(report.links.begin(), report.links.end(), [](const ReportLink& a, const ReportLink& b) {
        return std::pair(a.a, a.b) < std::pair(b.a, b.b);
    });
    return report;
}

std::string write_report(const PeriodReport& report) {
    if (report.clusters.empty()) throw ConfigError("refusing to report an empty cluster list");
    json j;
    j["format"] = "termmap-report";
    j["version"] = 1;
    j["period"] = {{"label", report.period.label},
                   {"start_year", report.period.start_year},
                   {"end_year", report.period.end_year}};
    j["corpus_stats"] = stats_to_json(report.stats);
    json clusters = json::array();
    for (const ReportCluster& c : report.clusters) {
        clusters.push_back({{"id", c.id}, {"label", c.label}, {"size", c.size()}, {"members", c.members}});
    }
    j["clusters"] = clusters;
    json links = json::array();
    for (const ReportLink& l : report.links) {
        links.push_back({{"a", l.a}, {"b", l.b}, {"count", l.count}});
    }
    j["links"] = links;
    return j.dump(2) + "\n";
}

PeriodReport load_report(std::istream& in) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("report is not valid JSON");
    require_format(j, "termmap-report", 1);
    PeriodReport report;
    report.period.label = j.at("period").at("label").get<std::string>();
    report.period.start_year = j.at("period").at("start_year").get<int>();
    report.period.end_year = j.at("period").at("end_year").get<int>();
    report.stats = stats_from_json(j.at("corpus_stats"));
    for (const json& c : j.at("clusters")) {
        ReportCluster rc;
        rc.id = c.at("id").get<int>();
        rc.label = c.at("label").get<std::string>();
        for (const json& m : c.at("members")) rc.members.push_back(m.get<std::string>());
        if (rc.size() != c.at("size").get<long long>()) {
            throw ConfigError("report cluster size does not match member count");
        }
        report.clusters.push_back(std::move(rc));
    }
    for (const json& l : j.at("links")) {
        report.links.push_back(
            ReportLink{l.at("a").get<int>(), l.at("b").get<int>(), l.at("count").get<long long>()});
    }
    if (report.clusters.empty()) throw ConfigError("report has an empty cluster list");
    return report;
}

ComparisonReport compare_periods(const PeriodReport& r1, const PeriodReport& r2) {
    if (r1.period.label == r2.period.label) {
        throw ConfigError("cannot compare a period against itself: '" + r1.period.label + "'");
    }
    std::map<std::string, long long> sizes1, sizes2;
    for (const ReportCluster& c : r1.clusters) sizes1[c.label] += c.size();
    for (const ReportCluster& c : r2.clusters) sizes2[c.label] += c.size();

    ComparisonReport out;
    out.period1 = r1.period.label;
    out.period2 = r2.period.label;
    for (const auto& [label, size1] : sizes1) {
        auto it = sizes2.find(label);
        if (it != sizes2.end()) {
            out.persistent.push_back(ComparisonEntry{label, size1, it->second});
        } else {
            out.vanished.push_back(ComparisonEntry{label, size1, 0});
        }
    }
    for (const auto& [label, size2] : sizes2) {
        if (!sizes1.count(label)) out.emergent.push_back(ComparisonEntry{label, 0, size2});
    }
    std::sort(out.persistent.begin(), out.persistent.end(),
              [](const ComparisonEntry& a, const ComparisonEntry& b) {
                  if (a.size2 != b.size2) return a.size2 > b.size2;
                  return a.label < b.label;
              });
    std::sort(out.emergent.begin(), out.emergent.end(),
              [](const ComparisonEntry& a, const ComparisonEntry& b) {
                  if (a.size2 != b.size2) return a.size2 > b.size2;
                  return a.label < b.label;
              });
    std::sort(out.vanished.begin(), out.vanished.end(),
              [](const ComparisonEntry& a, const ComparisonEntry& b) {
                  if (a.size1 != b.size1) return a.size1 > b.size1;
                  return a.label < b.label;
              });
    return out;
}

std::string write_comparison(const ComparisonReport& report) {
    json j;
    j["format"] = "termmap-comparison";
    j["version"] = 1;
    j["period1"] = report.period1;
    j["period2"] = report.period2;
    json persistent = json::array();
    for (const ComparisonEntry& e : report.persistent) {
        persistent.push_back({{"label", e.label}, {"size1", e.size1}, {"size2", e.size2}});
    }
    j["persistent"] = persistent;
    json emergent = json::array();
    for (const ComparisonEntry& e : report.emergent) {
        emergent.push_back({{"label", e.label}, {"size", e.size2}});
    }
    j["emergent"] = emergent;
    json vanished = json::array();
    for (const ComparisonEntry& e : report.vanished) {
        vanished.push_back({{"label", e.label}, {"size", e.size1}});
    }
    j["vanished"] = vanished;
    return j.dump(2) + "\n";
}

ComparisonReport load_comparison(std::istream& in) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("comparison is not valid JSON");
    require_format(j, "termmap-comparison", 1);
    ComparisonReport report;
    report.period1 = j.at("period1").get<std::string>();
    report.period2 = j.at("period2").get<std::string>();
    for (const json& e : j.at("persistent")) {
        report.persistent.push_back(ComparisonEntry{e.at("label").get<std::string>(),
                                                    e.at("size1").get<long long>(),
                                                    e.at("size2").get<long long>()});
    }
    for (const json& e : j.at("emergent")) {
        report.emergent.push_back(
            ComparisonEntry{e.at("label").get<std::string>(), 0, e.at("size").get<long long>()});
    }
    for (const json& e : j.at("vanished")) {
        report.vanished.push_back(
            ComparisonEntry{e.at("label").get<std::string>(), e.at("size").get<long long>(), 0});
    }
    return report;
}

PajekFiles write_pajek(const ClusterGraph& cg, bool clu_by_component) {
    if (cg.clusters.empty()) throw ConfigError("Pajek output needs at least one cluster");

    // vertices in sorted-label order, 1-based
    std::vector<const Cluster*> order;
    for (const Cluster& c : cg.clusters) order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const Cluster* a, const Cluster* b) { return a->label < b->label; });
    std::map<int, int> vertex_of;  // cluster id -> vertex number
    for (std::size_t i = 0; i < order.size(); ++i) vertex_of[order[i]->id] = static_cast<int>(i) + 1;

    const std::string header = "*Vertices " + std::to_string(order.size()) + "\n";

    PajekFiles files;
    files.net = header;
    for (std::size_t i = 0; i < order.size(); ++i) {
        files.net += std::to_string(i + 1) + " " + pajek_quote(order[i]->label) + "\n";
    }
    files.net += "*Edges\n";
    std::vector<std::pair<std::pair<int, int>, long long>> edges;
    for (const auto& [pair, count] : cg.links) {
        int u = vertex_of.at(pair.first);
        int v = vertex_of.at(pair.second);
        edges.push_back({{std::min(u, v), std::max(u, v)}, count});
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& [pair, count] : edges) {
        files.net += std::to_string(pair.first) + " " + std::to_string(pair.second) + " " +
                     std::to_string(count) + "\n";
    }

    files.vec = header;
    for (const Cluster* c : order) files.vec += std::to_string(c->size()) + "\n";

    files.clu = header;
    if (!clu_by_component) {
        for (std::size_t i = 0; i < order.size(); ++i) files.clu += std::to_string(i + 1) + "\n";
    } else {
        // connected components of the link graph, numbered by first vertex
        std::vector<int> parent(order.size() + 1);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&parent](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        for (const auto& [pair, _] : edges) {
            int a = find(pair.first), b = find(pair.second);
            if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
        std::map<int, int> component_id;
        for (std::size_t i = 1; i <= order.size(); ++i) {
            int root = find(static_cast<int>(i));
            if (!component_id.count(root)) component_id[root] = static_cast<int>(component_id.size()) + 1;
            files.clu += std::to_string(component_id[root]) + "\n";
        }
    }
    return files;
}

std::string write_graphml(const ClusterGraph& cg) {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n";
    out += "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n";
    out += "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
           "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
    out += "  <key id=\"d0\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n";
    out += "  <key id=\"d1\" for=\"node\" attr.name=\"size\" attr.type=\"long\"/>\n";
    out += "  <key id=\"d2\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n";
    out += "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (const Cluster& c : cg.clusters) {
        out += "    <node id=\"n" + std::to_string(c.id) + "\">\n";
        out += "      <data key=\"d0\">" + xml_escape(c.label) + "</data>\n";
        out += "      <data key=\"d1\">" + std::to_string(c.size()) + "</data>\n";
        out += "    </node>\n";
    }
    for (const auto& [pair, count] : cg.links) {
        out += "    <edge source=\"n" + std::to_string(pair.first) + "\" target=\"n" +
               std::to_string(pair.second) + "\">\n";
        out += "      <data key=\"d2\">" + std::to_string(count) + "</data>\n";
        out += "    </edge>\n";
    }
    out += "  </graph>\n";
    out += "</graphml>\n";
    return out;
}

}  // namespace termmap
