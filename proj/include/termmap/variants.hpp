#ifndef TERMMAP_VARIANTS_HPP
#define TERMMAP_VARIANTS_HPP

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "termmap/termex.hpp"

namespace termmap {

// The five variation families, with lexical inclusion split by whether the
// head is preserved (modifier insertion) or demoted (head expansion).
// Expansion kinds are directed general -> specific; the rest are symmetric.
enum class RelationKind {
    Spelling,
    Synonymy,
    ModifierExpansion,
    HeadExpansion,
    ModifierSubstitution,
    HeadSubstitution,
};
inline constexpr int kRelationKindCount = 6;

const char* relation_kind_name(RelationKind kind);
bool relation_kind_from_name(const std::string& name, RelationKind& kind);
bool relation_kind_directed(RelationKind kind);

// Typed edge. Directed kinds store (general a, specific b); symmetric kinds
// store endpoints with a < b so each unordered pair has one canonical edge.
struct VariantRelation {
    Term a;
    Term b;
    RelationKind kind = RelationKind::Spelling;

    bool operator==(const VariantRelation& o) const { return a == o.a && b == o.b && kind == o.kind; }
    auto operator<=>(const VariantRelation& o) const {
        if (auto c = a <=> o.a; c != 0) return c;
        if (auto c = b <=> o.b; c != 0) return c;
        return static_cast<int>(kind) <=> static_cast<int>(o.kind);
    }
};

VariantRelation make_relation(Term a, Term b, RelationKind kind);

// Flat synonym-set lexicon (one synset per line, comma-separated words).
// Stands in for a WordNet export; a word may sit in several synsets.
class SynLex {
public:
    static SynLex load(std::istream& in, std::vector<std::string>* warnings = nullptr);
    static SynLex load_file(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

    void add_synset(const std::vector<std::string>& words);
    bool share_synset(const std::string& a, const std::string& b) const;
    const std::vector<int>* synsets_of(const std::string& word) const;
    const std::vector<std::vector<std::string>>& synsets() const { return synsets_; }
    std::size_t size() const { return synsets_.size(); }
    bool empty() const { return synsets_.empty(); }

    // Canonical text form: words sorted within each set, sets sorted, one per
    // line. load(dump(x)) == x.
    std::string dump() const;

private:
    std::vector<std::vector<std::string>> synsets_;
    std::map<std::string, std::vector<int>> membership_;
};

// ---- detectors -------------------------------------------------------------
// All detectors assume normalized distinct terms. They are pure and, except
// for inclusion (directional by definition), symmetric in their arguments.

// a strictly shorter and a subsequence of b: ModifierExpansion when the head
// word is preserved, HeadExpansion when a's head reappears as a modifier
// under a new head.
std::optional<RelationKind> detect_inclusion(const Term& a, const Term& b);

struct SubstitutionHit {
    RelationKind kind = RelationKind::ModifierSubstitution;
    int position = 0;
    bool synonymy_backed = false;
};

// Same length (>= 2 tokens), exactly one differing position; never fires on
// the "of" slot of an of-phrase. HeadSubstitution when the differing
// position is the head in both terms.
std::optional<SubstitutionHit> detect_substitution(const Term& a, const Term& b, const SynLex& syn);

// Canonicals equal after removing spaces (compound fusion) or after
// British/American suffix folding on matching tokens.
std::optional<RelationKind> detect_spelling(const Term& a, const Term& b);

// Single-word terms sharing a synset, or a synonymy-backed substitution.
std::optional<RelationKind> detect_synonymy(const Term& a, const Term& b, const SynLex& syn);

std::string fold_spelling_token(const std::string& token);

struct RelationConfig {
    std::array<bool, kRelationKindCount> enabled{true, true, true, true, true, true};

    bool is_enabled(RelationKind kind) const { return enabled[static_cast<std::size_t>(kind)]; }
    void set_enabled(RelationKind kind, bool on) { enabled[static_cast<std::size_t>(kind)] = on; }
    bool any_enabled() const;
};

// Full cascade for one unordered pair: spelling first (short-circuits),
// inclusion on unequal lengths, substitution/synonymy on equal lengths.
// Disabling Synonymy stops lexicon consultation, so backed substitutions
// fall back to their plain kind. At most one edge per pair.
std::optional<VariantRelation> detect_relation(const Term& a, const Term& b, const SynLex& syn,
                                               const RelationConfig& cfg);

struct TermGraph {
    TermIndex index;
    std::set<VariantRelation> edges;

    bool operator==(const TermGraph&) const = default;
};

// Runs the detector cascade over candidate pairs. Candidates come from
// inverted indexes (shared word, spaceless canonical, folded canonical,
// shared synset for single-word terms); the pruning is lossless, which the
// test suite proves against the exhaustive pairwise sweep.
TermGraph build_graph(const TermIndex& index, const SynLex& syn, const RelationConfig& cfg,
                      int threads = 1);

// Edge-list dump: "# termmap graph v1" header, then a<TAB>kind<TAB>b sorted
// by endpoints and kind.
std::string dump_graph(const TermGraph& g);
// Re-attaches endpoints through the index; unknown endpoints are an error.
TermGraph parse_graph_dump(std::istream& in, const TermIndex& index);

}  // namespace termmap

#endif
