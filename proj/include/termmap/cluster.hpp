#ifndef TERMMAP_CLUSTER_HPP
#define TERMMAP_CLUSTER_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "termmap/variants.hpp"

namespace termmap {

// Clustering parameters. Weights and the merge threshold are kept in exact
// micro units (1e-6) so similarity comparisons are integer arithmetic and
// never depend on summation order or thread count.
inline constexpr std::int64_t kWeightScale = 1'000'000;

struct RelationWeights {
    std::set<RelationKind> tight_kinds;
    std::array<std::int64_t, kRelationKindCount> weight_micro{};
    std::int64_t merge_threshold_micro = 0;
    int max_iterations = 1;

    static RelationWeights defaults();

    std::int64_t weight_of(RelationKind kind) const {
        return weight_micro[static_cast<std::size_t>(kind)];
    }
    void set_weight(RelationKind kind, std::int64_t micro) {
        weight_micro[static_cast<std::size_t>(kind)] = micro;
    }
    bool is_tight(RelationKind kind) const { return tight_kinds.count(kind) > 0; }
    void validate() const;
};

struct Cluster {
    int id = 0;
    std::vector<Term> members;  // sorted by term order
    std::string label;          // canonical of one member

    long long size() const { return static_cast<long long>(members.size()); }
    bool operator==(const Cluster&) const = default;
};

using ClusterLinks = std::map<std::pair<int, int>, long long>;  // id pair (a<b) -> crossing edges

struct ClusterGraph {
    std::vector<Cluster> clusters;  // sorted by id
    ClusterLinks links;

    bool operator==(const ClusterGraph&) const = default;
};

// Phase 1: connected components of the subgraph restricted to tight edge
// kinds. Isolated terms become singletons; the result partitions the index.
std::vector<std::vector<Term>> tight_components(const TermGraph& g, const RelationWeights& w);

// Per-iteration snapshots for the property tests.
struct MergeTrace {
    std::vector<std::size_t> cluster_counts;               // count after each iteration
    std::vector<std::vector<std::vector<Term>>> partitions;  // partition after each iteration
};

// Phase 2: iterative preferential merging. Each cluster nominates its single
// best neighbour by cross-edge weight normalized by |A|*|B|; nominations
// above the threshold are merged as connected components of the nomination
// graph. Deterministic: ties fall toward the smallest nominee label, final
// ids follow sorted label order.
std::vector<Cluster> merge_components(const std::vector<std::vector<Term>>& components,
                                      const TermGraph& g, const RelationWeights& w,
                                      MergeTrace* trace = nullptr);

// Highest weighted within-cluster degree wins; ties fall to corpus document
// frequency, then fewer tokens, then canonical order.
Term label_cluster(const std::vector<Term>& members, const TermGraph& g, const RelationWeights& w);

ClusterGraph build_cluster_graph(const std::vector<Cluster>& clusters, const TermGraph& g);

// Keeps clusters of at least min_size, then the top k by (size, link
// degree), plus the links between survivors. k = 0 gives an empty graph.
ClusterGraph select_for_display(const ClusterGraph& cg, int k, int min_size);

// Dump: "# termmap clusters v1" header, then id<TAB>label<TAB>size<TAB>
// member;member;... sorted by id.
std::string dump_clusters(const std::vector<Cluster>& clusters);
std::vector<Cluster> parse_clusters_dump(std::istream& in, const TermIndex& index);

}  // namespace termmap

#endif
