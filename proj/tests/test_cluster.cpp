#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "termmap/cluster.hpp"
#include "termmap/util.hpp"

using namespace termmap;

namespace {

Term mk(const std::string& canonical) {
    std::vector<std::string> tokens = split(canonical, ' ');
    int head = static_cast<int>(tokens.size()) - 1;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "of") {
            head = static_cast<int>(i) - 1;
            break;
        }
    }
    return make_term(std::move(tokens), head);
}

TermIndex index_of(const std::vector<std::string>& canonicals, int docs_each = 1) {
    TermIndex index;
    int doc = 0;
    for (const std::string& c : canonicals) {
        for (int i = 0; i < docs_each; ++i) index.add_occurrence(mk(c), "d" + std::to_string(doc++));
    }
    return index;
}

SynLex synlex_of(const std::string& text) {
    std::istringstream in(text);
    return SynLex::load(in);
}

TermGraph graph_of(const TermIndex& index, const std::string& synsets = "") {
    RelationConfig cfg;
    return build_graph(index, synlex_of(synsets), cfg);
}

// Union-find oracle over the tight-filtered edge list.
std::set<std::set<std::string>> dsu_components(const TermGraph& g, const RelationWeights& w) {
    std::map<std::string, std::string> parent;
    for (const Term& t : g.index.terms()) parent[t.canonical] = t.canonical;
    std::function<std::string(std::string)> find = [&](std::string x) {
        while (parent[x] != x) x = parent[x];
        return x;
    };
    for (const VariantRelation& e : g.edges) {
        if (!w.is_tight(e.kind)) continue;
        std::string ra = find(e.a.canonical), rb = find(e.b.canonical);
        if (ra != rb) parent[rb] = ra;
    }
    std::map<std::string, std::set<std::string>> grouped;
    for (const auto& [canonical, _] : parent) grouped[find(canonical)].insert(canonical);
    std::set<std::set<std::string>> out;
    for (auto& [_, members] : grouped) out.insert(members);
    return out;
}

std::set<std::set<std::string>> as_sets(const std::vector<std::vector<Term>>& components) {
    std::set<std::set<std::string>> out;
    for (const auto& comp : components) {
        std::set<std::string> names;
        for (const Term& t : comp) names.insert(t.canonical);
        out.insert(names);
    }
    return out;
}

std::set<std::set<std::string>> cluster_sets(const std::vector<Cluster>& clusters) {
    std::set<std::set<std::string>> out;
    for (const Cluster& c : clusters) {
        std::set<std::string> names;
        for (const Term& t : c.members) names.insert(t.canonical);
        out.insert(names);
    }
    return out;
}

TermGraph random_graph(std::mt19937& rng, int max_terms) {
    static const std::vector<std::string> words = {
        "knowledge", "organization", "classification", "scheme", "system", "tool",
        "universal", "generic", "data", "base", "web", "information", "retrieval",
        "search", "index", "term", "subject", "analysis", "vocabulary", "control",
    };
    std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
    std::uniform_int_distribution<int> len_pick(1, 4);
    std::uniform_int_distribution<int> count_pick(5, max_terms);
    TermIndex index;
    int n = count_pick(rng);
    for (int i = 0; i < n; ++i) {
        int len = len_pick(rng);
        std::vector<std::string> tokens;
        for (int k = 0; k < len; ++k) tokens.push_back(words[word_pick(rng)]);
        index.add_occurrence(make_term(std::move(tokens), len - 1), "d" + std::to_string(i % 7));
    }
    return graph_of(index, "scheme,system\nretrieval,search\n");
}

}  // namespace

TEST_CASE("tight_components joins the worked pair through modifier expansion") {
    TermGraph g = graph_of(index_of({"classification scheme", "universal classification scheme"}));
    RelationWeights w = RelationWeights::defaults();
    auto components = tight_components(g, w);
    REQUIRE(components.size() == 1);
    CHECK(components[0].size() == 2);
}

TEST_CASE("tight_components with no tight edges yields singletons") {
    // head expansion is not tight by default
    TermGraph g = graph_of(index_of({"knowledge organization", "knowledge organization system"}));
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges.begin()->kind == RelationKind::HeadExpansion);
    auto components = tight_components(g, RelationWeights::defaults());
    CHECK(components.size() == 2);
}

TEST_CASE("tight_components equals union-find over the filtered edges") {
    std::mt19937 rng(23);
    RelationWeights w = RelationWeights::defaults();
    for (int trial = 0; trial < 25; ++trial) {
        TermGraph g = random_graph(rng, 80);
        CHECK(as_sets(tight_components(g, w)) == dsu_components(g, w));
    }
}

TEST_CASE("merge_components joins two components over one substitution edge") {
    TermGraph g = graph_of(index_of({"information system", "information retrieval"}));
    REQUIRE(g.edges.size() == 1);
    REQUIRE(g.edges.begin()->kind == RelationKind::HeadSubstitution);
    RelationWeights w = RelationWeights::defaults();
    w.merge_threshold_micro = 0;
    MergeTrace trace;
    auto clusters = merge_components(tight_components(g, w), g, w, &trace);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].members.size() == 2);
    REQUIRE(!trace.cluster_counts.empty());
    CHECK(trace.cluster_counts[0] == 1);  // merged in the first iteration
}

TEST_CASE("merge_components is the identity above every attainable similarity") {
    TermGraph g = graph_of(index_of({"information system", "information retrieval"}));
    RelationWeights w = RelationWeights::defaults();
    w.merge_threshold_micro = 100 * kWeightScale;
    auto components = tight_components(g, w);
    auto clusters = merge_components(components, g, w);
    CHECK(clusters.size() == components.size());
    CHECK(cluster_sets(clusters) == as_sets(components));
}

TEST_CASE("merge_components follows the hand-simulated nomination trace") {
    // Five singleton components. Cross weights (defaults: expansion 2,
    // substitution 1, normalized by |A|*|B| = 1):
    //   KO--KOS 2, KO--KOT 2, KOS--KOT 1, IS--IR 1.
    // Every cluster nominates its best neighbour; KO's tie between KOS and
    // KOT falls toward the smaller label "knowledge organization system".
    // Nominations chain {KO,KOS,KOT} and {IS,IR}; iteration 2 finds no
    // cross edges and stops. Labels by weighted degree / lexicographic order.
    TermIndex index = index_of({"knowledge organization", "knowledge organization system",
                                "knowledge organization tool", "information system",
                                "information retrieval"});
    TermGraph g = graph_of(index);
    RelationWeights w = RelationWeights::defaults();

    MergeTrace trace;
    auto clusters = merge_components(tight_components(g, w), g, w, &trace);

    REQUIRE(clusters.size() == 2);
    CHECK(trace.cluster_counts == std::vector<std::size_t>{2});
    CHECK(clusters[0].id == 1);
    CHECK(clusters[0].label == "information retrieval");
    CHECK(cluster_sets({clusters[0]}) ==
          std::set<std::set<std::string>>{{"information retrieval", "information system"}});
    CHECK(clusters[1].id == 2);
    CHECK(clusters[1].label == "knowledge organization");
    CHECK(cluster_sets({clusters[1]}) ==
          std::set<std::set<std::string>>{{"knowledge organization", "knowledge organization system",
                                           "knowledge organization tool"}});
}

TEST_CASE("label_cluster: a singleton labels itself") {
    TermIndex index = index_of({"knowledge organization"});
    TermGraph g = graph_of(index);
    RelationWeights w = RelationWeights::defaults();
    CHECK(label_cluster({mk("knowledge organization")}, g, w).canonical == "knowledge organization");
}

TEST_CASE("label_cluster picks the member with the highest weighted degree") {
    TermIndex index = index_of({"knowledge organization", "knowledge organization system",
                                "knowledge organization tool"});
    TermGraph g = graph_of(index);
    // degree oracle: KO 2+2=4, KOS 2+1=3, KOT 2+1=3 (expansion 2, substitution 1)
    RelationWeights w = RelationWeights::defaults();
    Term label = label_cluster(index.terms(), g, w);
    CHECK(label.canonical == "knowledge organization");
}

TEST_CASE("label_cluster breaks degree ties by document frequency") {
    TermIndex index;
    for (int i = 0; i < 40; ++i) index.add_occurrence(mk("classification"), "c" + std::to_string(i));
    for (int i = 0; i < 12; ++i) index.add_occurrence(mk("classification scheme"), "s" + std::to_string(i));
    TermGraph g = graph_of(index);
    REQUIRE(g.edges.size() == 1);  // one expansion edge, so the degrees tie
    RelationWeights w = RelationWeights::defaults();
    Term label = label_cluster(index.terms(), g, w);
    CHECK(label.canonical == "classification");
}

TEST_CASE("label_cluster falls back to fewer tokens, then lexicographic order") {
    TermIndex index = index_of({"subject analysis", "subject heading"});
    TermGraph g = graph_of(index);
    RelationWeights w = RelationWeights::defaults();
    // equal degree, equal doc freq, equal length -> lexicographically smallest
    CHECK(label_cluster(index.terms(), g, w).canonical == "subject analysis");
}

TEST_CASE("build_cluster_graph: one cluster means no links") {
    TermIndex index = index_of({"information system", "information retrieval"});
    TermGraph g = graph_of(index);
    Cluster all;
    all.id = 1;
    all.members = index.terms();
    all.label = "information retrieval";
    ClusterGraph cg = build_cluster_graph({all}, g);
    CHECK(cg.links.empty());
}

TEST_CASE("build_cluster_graph counts crossing edges per pair") {
    // three substitution edges cross the two clusters
    TermIndex index = index_of({"information system", "information retrieval",
                                "knowledge system", "knowledge retrieval"});
    TermGraph g = graph_of(index);
    Cluster c1{1, {mk("information retrieval"), mk("information system")}, "information retrieval"};
    Cluster c2{2, {mk("knowledge retrieval"), mk("knowledge system")}, "knowledge retrieval"};
    ClusterGraph cg = build_cluster_graph({c1, c2}, g);

    long long crossing = 0;
    for (const VariantRelation& e : g.edges) {
        bool a1 = e.a.canonical.starts_with("information");
        bool b1 = e.b.canonical.starts_with("information");
        if (a1 != b1) ++crossing;
    }
    REQUIRE(crossing == 2);
    REQUIRE(cg.links.size() == 1);
    CHECK(cg.links.at({1, 2}) == crossing);
}

TEST_CASE("intra plus inter cluster edges conserve the total") {
    std::mt19937 rng(31);
    RelationWeights w = RelationWeights::defaults();
    for (int trial = 0; trial < 20; ++trial) {
        TermGraph g = random_graph(rng, 100);
        auto clusters = merge_components(tight_components(g, w), g, w);
        ClusterGraph cg = build_cluster_graph(clusters, g);

        long long inter = 0;
        for (const auto& [_, count] : cg.links) inter += count;
        std::map<std::string, int> cluster_of;
        for (const Cluster& c : cg.clusters) {
            for (const Term& t : c.members) cluster_of[t.canonical] = c.id;
        }
        long long intra = 0;
        for (const VariantRelation& e : g.edges) {
            if (cluster_of.at(e.a.canonical) == cluster_of.at(e.b.canonical)) ++intra;
        }
        CHECK(intra + inter == static_cast<long long>(g.edges.size()));
    }
}

TEST_CASE("select_for_display is the identity when everything fits") {
    TermIndex index = index_of({"information system", "information retrieval",
                                "knowledge system", "knowledge retrieval"});
    TermGraph g = graph_of(index);
    RelationWeights w = RelationWeights::defaults();
    auto clusters = merge_components(tight_components(g, w), g, w);
    ClusterGraph cg = build_cluster_graph(clusters, g);
    ClusterGraph kept = select_for_display(cg, static_cast<int>(cg.clusters.size()) + 5, 1);
    CHECK(kept == cg);
}

TEST_CASE("select_for_display drops singletons and keeps the top k") {
    auto cluster_of_size = [](int id, const std::string& stem, int size) {
        Cluster c;
        c.id = id;
        c.label = stem;
        for (int i = 0; i < size; ++i) c.members.push_back(mk(stem + " m" + std::to_string(i)));
        std::sort(c.members.begin(), c.members.end());
        return c;
    };
    ClusterGraph cg;
    cg.clusters = {cluster_of_size(1, "alpha", 9), cluster_of_size(2, "beta", 5),
                   cluster_of_size(3, "gamma", 5), cluster_of_size(4, "delta", 1)};
    cg.links[{1, 2}] = 2;
    cg.links[{3, 4}] = 1;

    ClusterGraph kept = select_for_display(cg, 3, 2);
    REQUIRE(kept.clusters.size() == 3);
    CHECK(kept.clusters[0].id == 1);
    CHECK(kept.clusters[1].id == 2);
    CHECK(kept.clusters[2].id == 3);
    CHECK(kept.links.size() == 1);  // the 3-4 link lost its endpoint
    CHECK(kept.links.count({1, 2}) == 1);

    CHECK(select_for_display(cg, 0, 1).clusters.empty());
}

TEST_CASE("select_for_display equals brute-force sort and truncate") {
    std::mt19937 rng(37);
    RelationWeights w = RelationWeights::defaults();
    for (int trial = 0; trial < 15; ++trial) {
        TermGraph g = random_graph(rng, 80);
        auto clusters = merge_components(tight_components(g, w), g, w);
        ClusterGraph cg = build_cluster_graph(clusters, g);
        std::uniform_int_distribution<int> k_pick(1, 8);
        std::uniform_int_distribution<int> min_pick(0, 3);
        int k = k_pick(rng), min_size = min_pick(rng);

        std::map<int, long long> degree;
        for (const auto& [pair, count] : cg.links) {
            degree[pair.first] += count;
            degree[pair.second] += count;
        }
        std::vector<Cluster> sorted;
        for (const Cluster& c : cg.clusters) {
            if (c.size() >= min_size) sorted.push_back(c);
        }
        std::stable_sort(sorted.begin(), sorted.end(), [&](const Cluster& a, const Cluster& b) {
            if (a.size() != b.size()) return a.size() > b.size();
            long long da = degree.count(a.id) ? degree[a.id] : 0;
            long long db = degree.count(b.id) ? degree[b.id] : 0;
            if (da != db) return da > db;
            return a.label < b.label;
        });
        if (static_cast<int>(sorted.size()) > k) sorted.resize(static_cast<std::size_t>(k));
        std::set<int> expect_ids;
        for (const Cluster& c : sorted) expect_ids.insert(c.id);

        ClusterGraph kept = select_for_display(cg, k, min_size);
        std::set<int> got_ids;
        for (const Cluster& c : kept.clusters) got_ids.insert(c.id);
        CHECK(got_ids == expect_ids);
        for (const auto& [pair, count] : kept.links) {
            CHECK(cg.links.at(pair) == count);
            CHECK(expect_ids.count(pair.first));
            CHECK(expect_ids.count(pair.second));
        }
    }
}

TEST_CASE("clustering invariants hold on random graphs") {
    std::mt19937 rng(41);
    RelationWeights w = RelationWeights::defaults();
    for (int trial = 0; trial < 25; ++trial) {
        TermGraph g = random_graph(rng, 120);
        auto components = tight_components(g, w);

        // the tight phase already partitions the term set
        std::set<std::string> seen;
        std::size_t total = 0;
        for (const auto& comp : components) {
            for (const Term& t : comp) seen.insert(t.canonical);
            total += comp.size();
        }
        CHECK(total == g.index.size());
        CHECK(seen.size() == g.index.size());

        MergeTrace trace;
        auto clusters = merge_components(components, g, w, &trace);

        // partition property at every iteration
        for (const auto& partition : trace.partitions) {
            std::set<std::string> p_seen;
            std::size_t p_total = 0;
            for (const auto& part : partition) {
                for (const Term& t : part) p_seen.insert(t.canonical);
                p_total += part.size();
            }
            CHECK(p_total == g.index.size());
            CHECK(p_seen.size() == g.index.size());
        }

        // monotonic cluster counts
        std::size_t prev = components.size();
        for (std::size_t count : trace.cluster_counts) {
            CHECK(count <= prev);
            prev = count;
        }
        CHECK(clusters.size() == (trace.cluster_counts.empty() ? components.size()
                                                               : trace.cluster_counts.back()));

        // determinism: same inputs, same output, including ids and labels
        auto again = merge_components(components, g, w);
        CHECK(again == clusters);

        // component order must not matter
        auto shuffled = components;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(merge_components(shuffled, g, w) == clusters);
    }
}

TEST_CASE("raising the merge threshold never lowers the cluster count") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        TermGraph g = random_graph(rng, 100);
        RelationWeights w = RelationWeights::defaults();
        std::size_t prev_count = 0;
        for (std::int64_t threshold : {0LL, 20000LL, 50000LL, 200000LL, 1000000LL, 5000000LL}) {
            w.merge_threshold_micro = threshold;
            auto clusters = merge_components(tight_components(g, w), g, w);
            if (threshold > 0) CHECK(clusters.size() >= prev_count);
            prev_count = clusters.size();
        }
    }
}

TEST_CASE("cluster ids follow sorted label order") {
    std::mt19937 rng(47);
    RelationWeights w = RelationWeights::defaults();
    TermGraph g = random_graph(rng, 60);
    auto clusters = merge_components(tight_components(g, w), g, w);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        CHECK(clusters[i].id == static_cast<int>(i) + 1);
        if (i > 0) CHECK(clusters[i - 1].label < clusters[i].label);
        // the label is the canonical of a member
        CHECK(std::any_of(clusters[i].members.begin(), clusters[i].members.end(),
                          [&](const Term& t) { return t.canonical == clusters[i].label; }));
    }
}

TEST_CASE("cluster dump round-trips and rejects bad versions") {
    TermIndex index = index_of({"information system", "information retrieval", "knowledge system"});
    TermGraph g = graph_of(index);
    RelationWeights w = RelationWeights::defaults();
    auto clusters = merge_components(tight_components(g, w), g, w);
    std::string dump = dump_clusters(clusters);
    std::istringstream in(dump);
    auto back = parse_clusters_dump(in, index);
    CHECK(back == clusters);

    std::istringstream bad("# termmap clusters v7\n");
    CHECK_THROWS_AS(parse_clusters_dump(bad, index), ConfigError);
}

TEST_CASE("relation weights validate their invariants") {
    RelationWeights w = RelationWeights::defaults();
    CHECK_NOTHROW(w.validate());
    RelationWeights no_tight = w;
    no_tight.tight_kinds.clear();
    CHECK_THROWS_AS(no_tight.validate(), ConfigError);
    RelationWeights negative = w;
    negative.set_weight(RelationKind::Spelling, -1);
    CHECK_THROWS_AS(negative.validate(), ConfigError);
    RelationWeights zero_iter = w;
    zero_iter.max_iterations = 0;
    CHECK_THROWS_AS(zero_iter.validate(), ConfigError);
}
