#ifndef TERMMAP_MAPOUT_HPP
#define TERMMAP_MAPOUT_HPP

#include <istream>
#include <string>
#include <vector>

#include "termmap/cluster.hpp"
#include "termmap/corpus.hpp"

namespace termmap {

// Serialization-facing view of one period's cluster map: labels, member
// canonicals, link counts, corpus statistics. Round-trips through JSON.
struct ReportCluster {
    int id = 0;
    std::string label;
    std::vector<std::string> members;  // sorted canonicals

    long long size() const { return static_cast<long long>(members.size()); }
    bool operator==(const ReportCluster&) const = default;
};

struct ReportLink {
    int a = 0;
    int b = 0;
    long long count = 0;
    bool operator==(const ReportLink&) const = default;
};

struct PeriodReport {
    PeriodSpec period;
    std::vector<ReportCluster> clusters;  // sorted by id
    std::vector<ReportLink> links;        // sorted by (a, b)
    CorpusStats stats;

    bool operator==(const PeriodReport&) const = default;
};

// Throws ConfigError on an empty cluster list.
PeriodReport make_report(const ClusterGraph& cg, const CorpusStats& stats, const PeriodSpec& period);
std::string write_report(const PeriodReport& report);
PeriodReport load_report(std::istream& in);

struct ComparisonEntry {
    std::string label;
    long long size1 = 0;  // size in the earlier period (0 for emergent)
    long long size2 = 0;  // size in the later period (0 for vanished)
    bool operator==(const ComparisonEntry&) const = default;
};

// Topic diff between two periods by exact normalized-label match.
struct ComparisonReport {
    std::string period1;
    std::string period2;
    std::vector<ComparisonEntry> persistent;  // both periods; sorted by size2 desc, label
    std::vector<ComparisonEntry> emergent;    // only period2; sorted by size2 desc, label
    std::vector<ComparisonEntry> vanished;    // only period1; sorted by size1 desc, label

    bool operator==(const ComparisonReport&) const = default;
};

// Throws ConfigError when both reports carry the same period label.
ComparisonReport compare_periods(const PeriodReport& r1, const PeriodReport& r2);
std::string write_comparison(const ComparisonReport& report);
ComparisonReport load_comparison(std::istream& in);

// Pajek map triple. .net lists quoted cluster labels as vertices (1-based,
// sorted-label order) and link counts as edge weights; .vec carries cluster
// sizes (node size = cluster size); .clu assigns each vertex its own class
// or, with by_component, the id of its connected component.
struct PajekFiles {
    std::string net;
    std::string clu;
    std::string vec;
};

PajekFiles write_pajek(const ClusterGraph& cg, bool clu_by_component = false);

std::string write_graphml(const ClusterGraph& cg);

}  // namespace termmap

#endif
