#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "termmap/mapout.hpp"
#include "termmap/util.hpp"

#include "pajek_oracle.hpp"

using namespace termmap;

namespace {

Term mk(const std::string& canonical) {
    std::vector<std::string> tokens = split(canonical, ' ');
    return make_term(std::move(tokens), static_cast<int>(split(canonical, ' ').size()) - 1);
}

Cluster cluster_of(int id, const std::string& label, const std::vector<std::string>& members) {
    Cluster c;
    c.id = id;
    c.label = label;
    for (const std::string& m : members) c.members.push_back(mk(m));
    std::sort(c.members.begin(), c.members.end());
    return c;
}

ClusterGraph demo_graph() {
    ClusterGraph cg;
    cg.clusters = {
        cluster_of(1, "classification", {"classification", "library classification", "chinese classification"}),
        cluster_of(2, "knowledge organization",
                   {"knowledge organization", "knowledge organization system", "knowledge organization tool",
                    "knowledge organization number", "knowledge management"}),
        cluster_of(3, "thesaurus construction", {"thesaurus construction", "thesaurus use"}),
    };
    cg.links[{1, 2}] = 2;
    cg.links[{2, 3}] = 1;
    return cg;
}

CorpusStats demo_stats() {
    CorpusStats stats;
    stats.record_count = 10;
    stats.per_source_counts = {{"KNOWLEDGE ORGANIZATION", 7}, {"JOURNAL OF DOCUMENTATION", 3}};
    stats.per_year_counts = {{1990, 4}, {1991, 6}};
    return stats;
}

// Enough of an XML well-formedness check for the GraphML writer: tag
// balance, attribute quoting, no stray '<' or '&' in text.
void check_well_formed_xml(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    REQUIRE(xml.rfind("<?xml", 0) == 0);
    i = xml.find("?>");
    REQUIRE(i != std::string::npos);
    i += 2;
    while (i < xml.size()) {
        char c = xml[i];
        if (c == '<') {
            std::size_t close = xml.find('>', i);
            REQUIRE(close != std::string::npos);
            std::string tag = xml.substr(i + 1, close - i - 1);
            REQUIRE(!tag.empty());
            if (tag[0] == '/') {
                REQUIRE(!stack.empty());
                CHECK(stack.back() == tag.substr(1));
                stack.pop_back();
            } else if (tag.back() != '/') {
                std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
                stack.push_back(name);
            }
            i = close + 1;
        } else if (c == '&') {
            bool entity = false;
            for (const char* e : {"&amp;", "&lt;", "&gt;", "&quot;", "&apos;"}) {
                if (xml.compare(i, std::string(e).size(), e) == 0) entity = true;
            }
            CHECK(entity);
            i += 1;
        } else {
            ++i;
        }
    }
    CHECK(stack.empty());
}

}  // namespace

TEST_CASE("pajek serializes vertices, sizes and one weighted link") {
    ClusterGraph cg;
    cg.clusters = {cluster_of(1, "alpha", {"alpha", "alpha beta", "alpha gamma"}),
                   cluster_of(2, "beta", {"beta", "beta one", "beta two", "beta three", "beta four"})};
    cg.links[{1, 2}] = 2;
    PajekFiles files = write_pajek(cg);
    CHECK(files.net ==
          "*Vertices 2\n"
          "1 \"alpha\"\n"
          "2 \"beta\"\n"
          "*Edges\n"
          "1 2 2\n");
    CHECK(files.vec == "*Vertices 2\n3\n5\n");
    CHECK(files.clu == "*Vertices 2\n1\n2\n");
}

TEST_CASE("pajek quotes multiword labels and doubles interior quotes") {
    ClusterGraph cg;
    cg.clusters = {cluster_of(1, "knowledge organization number", {"knowledge organization number"}),
                   cluster_of(2, "weird \"label\"", {"weird"})};
    PajekFiles files = write_pajek(cg);
    CHECK(files.net.find("\"knowledge organization number\"") != std::string::npos);
    CHECK(files.net.find("\"weird \"\"label\"\"\"") != std::string::npos);

    pajek_oracle::ParsedPajek parsed = pajek_oracle::parse_pajek(files);
    CHECK(parsed.vertices[0].first == "knowledge organization number");
    CHECK(parsed.vertices[1].first == "weird \"label\"");
}

TEST_CASE("pajek parse-back reconstructs the cluster graph projection") {
    ClusterGraph cg = demo_graph();
    pajek_oracle::ParsedPajek parsed = pajek_oracle::parse_pajek(write_pajek(cg));
    pajek_oracle::ParsedPajek expect = pajek_oracle::projection(cg);
    CHECK(parsed.vertices == expect.vertices);
    CHECK(parsed.edges == expect.edges);

    // node-size contract: .vec values equal cluster cardinalities
    std::multiset<long long> vec_sizes;
    for (const auto& [_, size] : parsed.vertices) vec_sizes.insert(size);
    std::multiset<long long> cluster_sizes;
    for (const Cluster& c : cg.clusters) cluster_sizes.insert(c.size());
    CHECK(vec_sizes == cluster_sizes);
}

TEST_CASE("pajek refuses an empty graph") {
    ClusterGraph cg;
    CHECK_THROWS_AS(write_pajek(cg), ConfigError);
}

TEST_CASE("pajek component partition groups linked vertices") {
    ClusterGraph cg = demo_graph();  // links 1-2, 2-3: one component
    PajekFiles files = write_pajek(cg, true);
    pajek_oracle::ParsedPajek parsed = pajek_oracle::parse_pajek(files);
    CHECK(parsed.classes == std::vector<int>{1, 1, 1});

    cg.links.clear();
    cg.links[{1, 2}] = 1;  // cluster 3 now isolated
    pajek_oracle::ParsedPajek parsed2 = pajek_oracle::parse_pajek(write_pajek(cg, true));
    // vertex order is label-sorted: classification(1), knowledge organization(2), thesaurus construction(3)
    CHECK(parsed2.classes == std::vector<int>{1, 1, 2});
}

TEST_CASE("pajek output is deterministic") {
    ClusterGraph cg = demo_graph();
    PajekFiles a = write_pajek(cg);
    PajekFiles b = write_pajek(cg);
    CHECK(a.net == b.net);
    CHECK(a.clu == b.clu);
    CHECK(a.vec == b.vec);
}

TEST_CASE("graphml has one node per cluster and zero edges for an empty link set") {
    ClusterGraph cg = demo_graph();
    cg.links.clear();
    std::string xml = write_graphml(cg);
    check_well_formed_xml(xml);
    std::size_t nodes = 0, edges = 0, pos = 0;
    while ((pos = xml.find("<node ", pos)) != std::string::npos) {
        ++nodes;
        pos += 5;
    }
    pos = 0;
    while ((pos = xml.find("<edge ", pos)) != std::string::npos) {
        ++edges;
        pos += 5;
    }
    CHECK(nodes == cg.clusters.size());
    CHECK(edges == 0);
}

TEST_CASE("graphml escapes labels and carries weights") {
    ClusterGraph cg;
    cg.clusters = {cluster_of(1, "a<b & \"c\"", {"alpha"}), cluster_of(2, "beta", {"beta"})};
    cg.links[{1, 2}] = 7;
    std::string xml = write_graphml(cg);
    check_well_formed_xml(xml);
    CHECK(xml.find("a&lt;b &amp; &quot;c&quot;") != std::string::npos);
    CHECK(xml.find("<data key=\"d2\">7</data>") != std::string::npos);
}

TEST_CASE("report serialize-then-parse is the identity") {
    PeriodReport report = make_report(demo_graph(), demo_stats(), {"p1", 1988, 1997});
    std::string text = write_report(report);
    std::istringstream in(text);
    PeriodReport back = load_report(in);
    CHECK(back == report);
    // deterministic bytes
    CHECK(write_report(back) == text);
}

TEST_CASE("report cluster sizes sum to the clustered term count") {
    PeriodReport report = make_report(demo_graph(), demo_stats(), {"p1", 1988, 1997});
    long long total = 0;
    std::set<std::string> distinct;
    for (const ReportCluster& c : report.clusters) {
        total += c.size();
        distinct.insert(c.members.begin(), c.members.end());
    }
    CHECK(total == static_cast<long long>(distinct.size()));
}

TEST_CASE("report refuses an empty cluster list") {
    ClusterGraph empty;
    CHECK_THROWS_AS(make_report(empty, demo_stats(), {"p1", 1988, 1997}), ConfigError);
}

TEST_CASE("compare_periods classifies persistent, emergent and vanished labels") {
    ClusterGraph g1;
    g1.clusters = {cluster_of(1, "classification", {"classification", "library classification"}),
                   cluster_of(2, "indexing", {"indexing", "subject indexing"})};
    ClusterGraph g2;
    g2.clusters = {cluster_of(1, "classification", {"classification", "library classification",
                                                    "universal classification"}),
                   cluster_of(2, "metadata", {"metadata", "metadata quality"})};
    PeriodReport r1 = make_report(g1, demo_stats(), {"p1", 1988, 1997});
    PeriodReport r2 = make_report(g2, demo_stats(), {"p2", 1998, 2008});

    ComparisonReport cmp = compare_periods(r1, r2);
    REQUIRE(cmp.persistent.size() == 1);
    CHECK(cmp.persistent[0].label == "classification");
    CHECK(cmp.persistent[0].size1 == 2);
    CHECK(cmp.persistent[0].size2 == 3);
    REQUIRE(cmp.emergent.size() == 1);
    CHECK(cmp.emergent[0].label == "metadata");
    REQUIRE(cmp.vanished.size() == 1);
    CHECK(cmp.vanished[0].label == "indexing");

    // the three sets are pairwise disjoint
    std::set<std::string> all;
    std::size_t n = 0;
    for (const auto& v : {cmp.persistent, cmp.emergent, cmp.vanished}) {
        for (const ComparisonEntry& e : v) {
            all.insert(e.label);
            ++n;
        }
    }
    CHECK(all.size() == n);
}

TEST_CASE("compare_periods on identical reports with different labels") {
    PeriodReport r1 = make_report(demo_graph(), demo_stats(), {"p1", 1988, 1997});
    PeriodReport r2 = r1;
    r2.period.label = "p2";
    ComparisonReport cmp = compare_periods(r1, r2);
    CHECK(cmp.emergent.empty());
    CHECK(cmp.vanished.empty());
    CHECK(cmp.persistent.size() == r1.clusters.size());
    for (const ComparisonEntry& e : cmp.persistent) CHECK(e.size1 == e.size2);
}

TEST_CASE("compare_periods rejects identical period labels") {
    PeriodReport r = make_report(demo_graph(), demo_stats(), {"p1", 1988, 1997});
    CHECK_THROWS_AS(compare_periods(r, r), ConfigError);
}

TEST_CASE("compare_periods is anti-symmetric") {
    ClusterGraph g1;
    g1.clusters = {cluster_of(1, "classification", {"classification"}),
                   cluster_of(2, "indexing", {"indexing", "subject indexing"})};
    ClusterGraph g2;
    g2.clusters = {cluster_of(1, "classification", {"classification", "library classification"}),
                   cluster_of(2, "web", {"web", "web document"})};
    PeriodReport r1 = make_report(g1, demo_stats(), {"p1", 1988, 1997});
    PeriodReport r2 = make_report(g2, demo_stats(), {"p2", 1998, 2008});

    ComparisonReport fwd = compare_periods(r1, r2);
    ComparisonReport rev = compare_periods(r2, r1);

    auto labels = [](const std::vector<ComparisonEntry>& v) {
        std::set<std::string> out;
        for (const ComparisonEntry& e : v) out.insert(e.label);
        return out;
    };
    CHECK(labels(fwd.emergent) == labels(rev.vanished));
    CHECK(labels(fwd.vanished) == labels(rev.emergent));
    REQUIRE(fwd.persistent.size() == rev.persistent.size());
    std::map<std::string, std::pair<long long, long long>> fwd_deltas, rev_deltas;
    for (const ComparisonEntry& e : fwd.persistent) fwd_deltas[e.label] = {e.size1, e.size2};
    for (const ComparisonEntry& e : rev.persistent) rev_deltas[e.label] = {e.size2, e.size1};
    CHECK(fwd_deltas == rev_deltas);
}

TEST_CASE("comparison JSON round-trips") {
    ClusterGraph g2 = demo_graph();
    PeriodReport r1 = make_report(demo_graph(), demo_stats(), {"p1", 1988, 1997});
    PeriodReport r2 = make_report(g2, demo_stats(), {"p2", 1998, 2008});
    ComparisonReport cmp = compare_periods(r1, r2);
    std::string text = write_comparison(cmp);
    std::istringstream in(text);
    ComparisonReport back = load_comparison(in);
    CHECK(back == cmp);
}

TEST_CASE("report output sorts each comparison set by size descending") {
    ClusterGraph g1;
    g1.clusters = {cluster_of(1, "alpha", {"alpha"}),
                   cluster_of(2, "beta", {"beta", "beta one", "beta two"})};
    ClusterGraph g2;
    g2.clusters = {cluster_of(1, "gamma", {"gamma", "gamma one"}),
                   cluster_of(2, "delta", {"delta", "delta one", "delta two"})};
    PeriodReport r1 = make_report(g1, demo_stats(), {"p1", 1988, 1997});
    PeriodReport r2 = make_report(g2, demo_stats(), {"p2", 1998, 2008});
    ComparisonReport cmp = compare_periods(r1, r2);
    REQUIRE(cmp.emergent.size() == 2);
    CHECK(cmp.emergent[0].label == "delta");  // size 3 before size 2
    REQUIRE(cmp.vanished.size() == 2);
    CHECK(cmp.vanished[0].label == "beta");
}
