#include "termmap/cluster.hpp"

#include <algorithm>
#include <numeric>

#include "termmap/util.hpp"

namespace termmap {

RelationWeights RelationWeights::defaults() {
    RelationWeights w;
    w.tight_kinds = {RelationKind::Spelling, RelationKind::Synonymy, RelationKind::ModifierExpansion};
    w.set_weight(RelationKind::Spelling, 2 * kWeightScale);
    w.set_weight(RelationKind::Synonymy, 2 * kWeightScale);
    w.set_weight(RelationKind::ModifierExpansion, 2 * kWeightScale);
    w.set_weight(RelationKind::HeadExpansion, 2 * kWeightScale);
    w.set_weight(RelationKind::HeadSubstitution, 1 * kWeightScale);
    w.set_weight(RelationKind::ModifierSubstitution, 1 * kWeightScale);
    w.merge_threshold_micro = kWeightScale / 20;  // 0.05
    w.max_iterations = 4;
    return w;
}

void RelationWeights::validate() const {
    if (tight_kinds.empty()) throw ConfigError("tight_kinds must not be empty");
    for (std::int64_t v : weight_micro) {
        if (v < 0) throw ConfigError("relation weights must be non-negative");
    }
    if (merge_threshold_micro < 0) throw ConfigError("merge_threshold must be non-negative");
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
}

namespace {

// Internal working view: terms as dense indices into index order.
struct GraphView {
    std::vector<Term> terms;
    std::map<std::string, std::uint32_t> canonical_to_idx;
    struct Edge {
        std::uint32_t u, v;
        RelationKind kind;
    };
    std::vector<Edge> edges;

    static GraphView build(const TermGraph& g) {
        GraphView view;
        view.terms = g.index.terms();
        for (std::uint32_t i = 0; i < view.terms.size(); ++i) {
            view.canonical_to_idx[view.terms[i].canonical] = i;
        }
        view.edges.reserve(g.edges.size());
        for (const VariantRelation& rel : g.edges) {
            Edge e;
            e.u = view.canonical_to_idx.at(rel.a.canonical);
            e.v = view.canonical_to_idx.at(rel.b.canonical);
            e.kind = rel.kind;
            view.edges.push_back(e);
        }
        return view;
    }
};

struct DisjointSets {
    std::vector<std::uint32_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);  // smaller root wins, keeps grouping deterministic
        parent[b] = a;
    }
};

// Exact rational comparisons for cross-cluster similarities. num is a summed
// edge weight in micro units, den is |A|*|B|.
bool similarity_above_threshold(std::int64_t num, std::int64_t den, std::int64_t threshold_micro) {
    // (num/scale)/den > threshold_micro/scale
    return static_cast<__int128>(num) > static_cast<__int128>(threshold_micro) * den;
}

int compare_similarity(std::int64_t num1, std::int64_t den1, std::int64_t num2, std::int64_t den2) {
    __int128 lhs = static_cast<__int128>(num1) * den2;
    __int128 rhs = static_cast<__int128>(num2) * den1;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

// Pick the label index for a set of member indices: max weighted in-cluster
// degree, then doc frequency, then fewest tokens, then canonical order.
std::uint32_t label_index(const std::vector<std::uint32_t>& members, const GraphView& view,
                          const std::map<std::uint32_t, std::int64_t>& degree, const TermIndex& index) {
    std::uint32_t best = members.front();
    auto better = [&](std::uint32_t cand, std::uint32_t cur) {
        std::int64_t dc = degree.count(cand) ? degree.at(cand) : 0;
        std::int64_t du = degree.count(cur) ? degree.at(cur) : 0;
        if (dc != du) return dc > du;
        long long fc = index.doc_freq_of(view.terms[cand]);
        long long fu = index.doc_freq_of(view.terms[cur]);
        if (fc != fu) return fc > fu;
        int lc = view.terms[cand].length();
        int lu = view.terms[cur].length();
        if (lc != lu) return lc < lu;
        return view.terms[cand].canonical < view.terms[cur].canonical;
    };
    for (std::uint32_t m : members) {
        if (m != best && better(m, best)) best = m;
    }
    return best;
}

std::vector<std::vector<std::uint32_t>> components_to_indices(
    const std::vector<std::vector<Term>>& components, const GraphView& view) {
    std::vector<std::vector<std::uint32_t>> out;
    out.reserve(components.size());
    std::size_t total = 0;
    for (const auto& comp : components) {
        std::vector<std::uint32_t> idx;
        idx.reserve(comp.size());
        for (const Term& t : comp) {
            auto it = view.canonical_to_idx.find(t.canonical);
            if (it == view.canonical_to_idx.end()) {
                throw std::invalid_argument("component member not in term index: " + t.canonical);
            }
            idx.push_back(it->second);
        }
        std::sort(idx.begin(), idx.end());
        total += idx.size();
        out.push_back(std::move(idx));
    }
    if (total != view.terms.size()) {
        throw std::invalid_argument("components do not partition the term set");
    }
    // deterministic cluster order: by smallest member
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

std::vector<Term> indices_to_terms(const std::vector<std::uint32_t>& members, const GraphView& view) {
    std::vector<Term> out;
    out.reserve(members.size());
    for (std::uint32_t m : members) out.push_back(view.terms[m]);
    std::sort(out.begin(), out.end());
    return out;
}

// One preferential-merge pass. Returns false when no cluster nominated.
bool merge_iteration(std::vector<std::vector<std::uint32_t>>& clusters, const GraphView& view,
                     const RelationWeights& w, const TermIndex& index) {
    const std::size_t n = clusters.size();
    if (n < 2) return false;

    std::vector<std::uint32_t> cluster_of(view.terms.size(), 0);
    for (std::uint32_t c = 0; c < n; ++c) {
        for (std::uint32_t m : clusters[c]) cluster_of[m] = c;
    }

    // weighted in-cluster degrees feed labels; labels feed tie-breaking
    std::map<std::uint32_t, std::int64_t> degree;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> cross;
    for (const GraphView::Edge& e : view.edges) {
        std::uint32_t cu = cluster_of[e.u];
        std::uint32_t cv = cluster_of[e.v];
        std::int64_t weight = w.weight_of(e.kind);
        if (cu == cv) {
            degree[e.u] += weight;
            degree[e.v] += weight;
        } else {
            cross[{std::min(cu, cv), std::max(cu, cv)}] += weight;
        }
    }
    if (cross.empty()) return false;

    std::vector<std::string> labels(n);
    for (std::uint32_t c = 0; c < n; ++c) {
        labels[c] = view.terms[label_index(clusters[c], view, degree, index)].canonical;
    }

    // For every cluster, the best neighbour above the threshold.
    struct Nominee {
        bool valid = false;
        std::uint32_t target = 0;
        std::int64_t num = 0;
        std::int64_t den = 1;
    };
    std::vector<Nominee> nominee(n);
    auto consider = [&](std::uint32_t from, std::uint32_t to, std::int64_t num) {
        std::int64_t den =
            static_cast<std::int64_t>(clusters[from].size()) * static_cast<std::int64_t>(clusters[to].size());
        if (!similarity_above_threshold(num, den, w.merge_threshold_micro)) return;
        Nominee& cur = nominee[from];
        if (!cur.valid) {
            nominee[from] = {true, to, num, den};
            return;
        }
        int cmp = compare_similarity(num, den, cur.num, cur.den);
        if (cmp > 0 || (cmp == 0 && labels[to] < labels[cur.target])) {
            nominee[from] = {true, to, num, den};
        }
    };
    for (const auto& [pair, num] : cross) {
        consider(pair.first, pair.second, num);
        consider(pair.second, pair.first, num);
    }

    DisjointSets sets(n);
    bool any = false;
    for (std::uint32_t c = 0; c < n; ++c) {
        if (nominee[c].valid) {
            sets.unite(c, nominee[c].target);
            any = true;
        }
    }
    if (!any) return false;

    std::map<std::uint32_t, std::vector<std::uint32_t>> grouped;
    for (std::uint32_t c = 0; c < n; ++c) grouped[sets.find(c)].push_back(c);

    std::vector<std::vector<std::uint32_t>> merged;
    merged.reserve(grouped.size());
    for (auto& [_, group] : grouped) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t c : group) {
            members.insert(members.end(), clusters[c].begin(), clusters[c].end());
        }
        std::sort(members.begin(), members.end());
        merged.push_back(std::move(members));
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    clusters = std::move(merged);
    return true;
}

}  // namespace

std::vector<std::vector<Term>> tight_components(const TermGraph& g, const RelationWeights& w) {
    GraphView view = GraphView::build(g);
    DisjointSets sets(view.terms.size());
    for (const GraphView::Edge& e : view.edges) {
        if (w.is_tight(e.kind)) sets.unite(e.u, e.v);
    }
    std::map<std::uint32_t, std::vector<std::uint32_t>> grouped;
    for (std::uint32_t i = 0; i < view.terms.size(); ++i) grouped[sets.find(i)].push_back(i);

    std::vector<std::vector<Term>> out;
    out.reserve(grouped.size());
    for (const auto& [_, members] : grouped) out.push_back(indices_to_terms(members, view));
    return out;
}

std::vector<Cluster> merge_components(const std::vector<std::vector<Term>>& components,
                                      const TermGraph& g, const RelationWeights& w,
                                      MergeTrace* trace) {
    w.validate();
    GraphView view = GraphView::build(g);
    std::vector<std::vector<std::uint32_t>> clusters = components_to_indices(components, view);

    auto snapshot = [&]() {
        if (!trace) return;
        trace->cluster_counts.push_back(clusters.size());
        std::vector<std::vector<Term>> part;
        part.reserve(clusters.size());
        for (const auto& c : clusters) part.push_back(indices_to_terms(c, view));
        trace->partitions.push_back(std::move(part));
    };

    for (int iter = 0; iter < w.max_iterations; ++iter) {
        if (!merge_iteration(clusters, view, w, g.index)) break;
        snapshot();
    }

    // final labels and ids in sorted-label order
    std::map<std::uint32_t, std::int64_t> degree;
    std::vector<std::uint32_t> cluster_of(view.terms.size(), 0);
    for (std::uint32_t c = 0; c < clusters.size(); ++c) {
        for (std::uint32_t m : clusters[c]) cluster_of[m] = c;
    }
    for (const GraphView::Edge& e : view.edges) {
        if (cluster_of[e.u] == cluster_of[e.v]) {
            degree[e.u] += w.weight_of(e.kind);
            degree[e.v] += w.weight_of(e.kind);
        }
    }

    std::vector<Cluster> out;
    out.reserve(clusters.size());
    for (const auto& members : clusters) {
        Cluster c;
        c.members = indices_to_terms(members, view);
        c.label = view.terms[label_index(members, view, degree, g.index)].canonical;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const Cluster& a, const Cluster& b) { return a.label < b.label; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i) + 1;
    return out;
}

Term label_cluster(const std::vector<Term>& members, const TermGraph& g, const RelationWeights& w) {
    if (members.empty()) throw std::invalid_argument("label_cluster: empty member set");
    GraphView view = GraphView::build(g);
    std::set<std::uint32_t> member_set;
    std::vector<std::uint32_t> idx;
    for (const Term& t : members) {
        auto it = view.canonical_to_idx.find(t.canonical);
        if (it == view.canonical_to_idx.end()) {
            throw std::invalid_argument("label_cluster: member not in graph: " + t.canonical);
        }
        member_set.insert(it->second);
        idx.push_back(it->second);
    }
    std::sort(idx.begin(), idx.end());
    std::map<std::uint32_t, std::int64_t> degree;
    for (const GraphView::Edge& e : view.edges) {
        if (member_set.count(e.u) && member_set.count(e.v)) {
            degree[e.u] += w.weight_of(e.kind);
            degree[e.v] += w.weight_of(e.kind);
        }
    }
    return view.terms[label_index(idx, view, degree, g.index)];
}

ClusterGraph build_cluster_graph(const std::vector<Cluster>& clusters, const TermGraph& g) {
    ClusterGraph cg;
    cg.clusters = clusters;
    std::sort(cg.clusters.begin(), cg.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.id < b.id; });

    std::map<std::string, int> cluster_of;
    for (const Cluster& c : cg.clusters) {
        for (const Term& t : c.members) cluster_of[t.canonical] = c.id;
    }
    for (const VariantRelation& rel : g.edges) {
        auto ia = cluster_of.find(rel.a.canonical);
        auto ib = cluster_of.find(rel.b.canonical);
        if (ia == cluster_of.end() || ib == cluster_of.end()) {
            throw std::invalid_argument("clusters do not cover edge endpoint");
        }
        if (ia->second == ib->second) continue;
        int lo = std::min(ia->second, ib->second);
        int hi = std::max(ia->second, ib->second);
        ++cg.links[{lo, hi}];
    }
    return cg;
}

ClusterGraph select_for_display(const ClusterGraph& cg, int k, int min_size) {
    ClusterGraph out;
    if (k <= 0) return out;

    std::map<int, long long> link_degree;
    for (const auto& [pair, count] : cg.links) {
        link_degree[pair.first] += count;
        link_degree[pair.second] += count;
    }

    std::vector<const Cluster*> retained;
    for (const Cluster& c : cg.clusters) {
        if (c.size() >= min_size) retained.push_back(&c);
    }
    std::sort(retained.begin(), retained.end(), [&](const Cluster* a, const Cluster* b) {
        if (a->size() != b->size()) return a->size() > b->size();
        long long da = link_degree.count(a->id) ? link_degree.at(a->id) : 0;
        long long db = link_degree.count(b->id) ? link_degree.at(b->id) : 0;
        if (da != db) return da > db;
        return a->label < b->label;
    });
    if (static_cast<int>(retained.size()) > k) retained.resize(static_cast<std::size_t>(k));

    std::set<int> kept_ids;
    for (const Cluster* c : retained) kept_ids.insert(c->id);
    for (const Cluster& c : cg.clusters) {
        if (kept_ids.count(c.id)) out.clusters.push_back(c);
    }
    for (const auto& [pair, count] : cg.links) {
        if (kept_ids.count(pair.first) && kept_ids.count(pair.second)) out.links[pair] = count;
    }
    return out;
}

std::string dump_clusters(const std::vector<Cluster>& clusters) {
    std::string out = "# termmap clusters v1\n";
    for (const Cluster& c : clusters) {
        out += std::to_string(c.id);
        out += '\t';
        out += c.label;
        out += '\t';
        out += std::to_string(c.size());
        out += '\t';
        bool first = true;
        for (const Term& t : c.members) {
            if (!first) out += ';';
            out += escape_field(t.canonical);
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::vector<Cluster> parse_clusters_dump(std::istream& in, const TermIndex& index) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "# termmap clusters v1") {
        throw ConfigError("cluster dump version mismatch: expected '# termmap clusters v1', found '" +
                          trim(line) + "'");
    }
    std::vector<Cluster> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() != 4) throw ParseError("cluster dump line needs 4 tab-separated fields", line_no);
        Cluster c;
        long long size = 0;
        try {
            c.id = std::stoi(cols[0]);
            size = std::stoll(cols[2]);
        } catch (const std::exception&) {
            throw ParseError("cluster dump line has a non-numeric id or size", line_no);
        }
        c.label = cols[1];
        for (const std::string& m : split(cols[3], ';')) {
            if (m.empty()) continue;
            const TermIndex::Entry* e = index.find_canonical(unescape_field(m));
            if (!e) throw ParseError("cluster member not present in term index", line_no);
            c.members.push_back(e->term);
        }
        std::sort(c.members.begin(), c.members.end());
        if (size != c.size()) throw ParseError("cluster size does not match member count", line_no);
        bool label_is_member = std::any_of(c.members.begin(), c.members.end(),
                                           [&](const Term& t) { return t.canonical == c.label; });
        if (!label_is_member) throw ParseError("cluster label is not one of its members", line_no);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace termmap
