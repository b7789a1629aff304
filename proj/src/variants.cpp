#include "termmap/variants.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <mutex>

#include "termmap/util.hpp"

namespace termmap {

const char* relation_kind_name(RelationKind kind) {
    switch (kind) {
        case RelationKind::Spelling: return "spelling";
        case RelationKind::Synonymy: return "synonymy";
        case RelationKind::ModifierExpansion: return "modifier_expansion";
        case RelationKind::HeadExpansion: return "head_expansion";
        case RelationKind::ModifierSubstitution: return "modifier_substitution";
        case RelationKind::HeadSubstitution: return "head_substitution";
    }
    return "spelling";
}

bool relation_kind_from_name(const std::string& name, RelationKind& kind) {
    for (int i = 0; i < kRelationKindCount; ++i) {
        RelationKind k = static_cast<RelationKind>(i);
        if (name == relation_kind_name(k)) {
            kind = k;
            return true;
        }
    }
    return false;
}

bool relation_kind_directed(RelationKind kind) {
    return kind == RelationKind::ModifierExpansion || kind == RelationKind::HeadExpansion;
}

VariantRelation make_relation(Term a, Term b, RelationKind kind) {
    VariantRelation rel;
    if (!relation_kind_directed(kind) && b < a) std::swap(a, b);
    rel.a = std::move(a);
    rel.b = std::move(b);
    rel.kind = kind;
    return rel;
}

// ---- SynLex -----------------------------------------------------------------

SynLex SynLex::load(std::istream& in, std::vector<std::string>* warnings) {
    SynLex lex;
    std::string line;
    std::size_t line_no = 0;
    std::set<std::vector<std::string>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::set<std::string> words;
        for (const std::string& part : split(s, ',')) {
            std::string w = to_lower_ascii(trim(part));
            if (!w.empty()) words.insert(w);
        }
        if (words.empty()) {
            if (warnings) warnings->push_back("synset line " + std::to_string(line_no) + " is empty, skipped");
            continue;
        }
        std::vector<std::string> sorted(words.begin(), words.end());
        if (!seen.insert(sorted).second) continue;  // duplicate synset
        lex.add_synset(sorted);
    }
    return lex;
}

SynLex SynLex::load_file(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing synset file: " + path.string());
    return load(in, warnings);
}

void SynLex::add_synset(const std::vector<std::string>& words) {
    int id = static_cast<int>(synsets_.size());
    std::vector<std::string> sorted(words);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const std::string& w : sorted) membership_[w].push_back(id);
    synsets_.push_back(std::move(sorted));
}

bool SynLex::share_synset(const std::string& a, const std::string& b) const {
    if (a == b) return false;
    const std::vector<int>* sa = synsets_of(a);
    const std::vector<int>* sb = synsets_of(b);
    if (!sa || !sb) return false;
    for (int ia : *sa) {
        for (int ib : *sb) {
            if (ia == ib) return true;
        }
    }
    return false;
}

const std::vector<int>* SynLex::synsets_of(const std::string& word) const {
    auto it = membership_.find(word);
    return it == membership_.end() ? nullptr : &it->second;
}

std::string SynLex::dump() const {
    std::vector<std::string> lines;
    lines.reserve(synsets_.size());
    for (const auto& set : synsets_) lines.push_back(join(set, ","));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const std::string& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

// ---- detectors -------------------------------------------------------------

namespace {

bool is_subsequence(const std::vector<std::string>& small, const std::vector<std::string>& big) {
    std::size_t si = 0;
    for (std::size_t bi = 0; bi < big.size() && si < small.size(); ++bi) {
        if (small[si] == big[bi]) ++si;
    }
    return si == small.size();
}

std::string spaceless(const Term& t) {
    std::string out;
    for (const std::string& tok : t.tokens) out += tok;
    return out;
}

std::string folded(const Term& t) {
    std::vector<std::string> toks;
    toks.reserve(t.tokens.size());
    for (const std::string& tok : t.tokens) toks.push_back(fold_spelling_token(tok));
    return join(toks, " ");
}

}  // namespace

std::string fold_spelling_token(const std::string& token) {
    const std::size_t n = token.size();
    if (n > 7 && ends_with(token, "isation")) return token.substr(0, n - 7) + "ization";
    if (n > 5 && ends_with(token, "logue")) return token.substr(0, n - 5) + "log";
    if (n > 4 && ends_with(token, "our")) return token.substr(0, n - 3) + "or";
    return token;
}

std::optional<RelationKind> detect_inclusion(const Term& a, const Term& b) {
    if (a.length() >= b.length()) return std::nullopt;
    if (a == b) return std::nullopt;
    if (!is_subsequence(a.tokens, b.tokens)) return std::nullopt;
    if (a.head_word() == b.head_word()) return RelationKind::ModifierExpansion;
    for (int i = 0; i < b.length(); ++i) {
        if (i == b.head_index) continue;
        if (b.tokens[static_cast<std::size_t>(i)] == a.head_word()) return RelationKind::HeadExpansion;
    }
    return std::nullopt;
}

std::optional<SubstitutionHit> detect_substitution(const Term& a, const Term& b, const SynLex& syn) {
    if (a.length() != b.length() || a.length() < 2) return std::nullopt;
    int diff = -1;
    for (int i = 0; i < a.length(); ++i) {
        if (a.tokens[static_cast<std::size_t>(i)] != b.tokens[static_cast<std::size_t>(i)]) {
            if (diff >= 0) return std::nullopt;  // more than one change
            diff = i;
        }
    }
    if (diff < 0) return std::nullopt;
    const std::string& wa = a.tokens[static_cast<std::size_t>(diff)];
    const std::string& wb = b.tokens[static_cast<std::size_t>(diff)];
    if (wa == "of" || wb == "of") return std::nullopt;
    SubstitutionHit hit;
    hit.position = diff;
    hit.kind = (diff == a.head_index && diff == b.head_index) ? RelationKind::HeadSubstitution
                                                              : RelationKind::ModifierSubstitution;
    hit.synonymy_backed = syn.share_synset(wa, wb);
    return hit;
}

std::optional<RelationKind> detect_spelling(const Term& a, const Term& b) {
    if (a == b) return std::nullopt;
    if (spaceless(a) == spaceless(b)) return RelationKind::Spelling;
    if (folded(a) == folded(b)) return RelationKind::Spelling;
    return std::nullopt;
}

std::optional<RelationKind> detect_synonymy(const Term& a, const Term& b, const SynLex& syn) {
    if (a == b) return std::nullopt;
    if (a.length() == 1 && b.length() == 1) {
        if (syn.share_synset(a.tokens[0], b.tokens[0])) return RelationKind::Synonymy;
        return std::nullopt;
    }
    auto sub = detect_substitution(a, b, syn);
    if (sub && sub->synonymy_backed) return RelationKind::Synonymy;
    return std::nullopt;
}

bool RelationConfig::any_enabled() const {
    for (bool b : enabled) {
        if (b) return true;
    }
    return false;
}

std::optional<VariantRelation> detect_relation(const Term& a, const Term& b, const SynLex& syn,
                                               const RelationConfig& cfg) {
    static const SynLex kEmptySynLex;
    if (a == b) return std::nullopt;
    const SynLex& lex = cfg.is_enabled(RelationKind::Synonymy) ? syn : kEmptySynLex;

    if (cfg.is_enabled(RelationKind::Spelling) && detect_spelling(a, b)) {
        return make_relation(a, b, RelationKind::Spelling);
    }
    if (a.length() != b.length()) {
        const Term& shorter = a.length() < b.length() ? a : b;
        const Term& longer = a.length() < b.length() ? b : a;
        if (auto kind = detect_inclusion(shorter, longer)) {
            if (cfg.is_enabled(*kind)) return make_relation(shorter, longer, *kind);
        }
        return std::nullopt;
    }
    if (a.length() == 1) {
        if (cfg.is_enabled(RelationKind::Synonymy) && detect_synonymy(a, b, lex)) {
            return make_relation(a, b, RelationKind::Synonymy);
        }
        return std::nullopt;
    }
    if (auto sub = detect_substitution(a, b, lex)) {
        if (sub->synonymy_backed) {
            // stronger evidence than a plain substitution
            return make_relation(a, b, RelationKind::Synonymy);
        }
        if (cfg.is_enabled(sub->kind)) return make_relation(a, b, sub->kind);
    }
    return std::nullopt;
}

// ---- graph construction -----------------------------------------------------

namespace {

// Lossless candidate pruning: two terms can only be related when they share
// a token word, collide on the spaceless or folded canonical, or are
// single-word terms sharing a synset.
std::vector<std::pair<std::uint32_t, std::uint32_t>> candidate_pairs(const std::vector<Term>& terms,
                                                                     const SynLex& syn,
                                                                     const RelationConfig& cfg) {
    std::map<std::string, std::vector<std::uint32_t>> by_word;
    std::map<std::string, std::vector<std::uint32_t>> by_spaceless;
    std::map<std::string, std::vector<std::uint32_t>> by_folded;
    std::map<int, std::vector<std::uint32_t>> by_synset;

    const bool use_syn = cfg.is_enabled(RelationKind::Synonymy) && !syn.empty();
    for (std::uint32_t i = 0; i < terms.size(); ++i) {
        const Term& t = terms[i];
        std::set<std::string> uniq(t.tokens.begin(), t.tokens.end());
        for (const std::string& w : uniq) by_word[w].push_back(i);
        by_spaceless[spaceless(t)].push_back(i);
        by_folded[folded(t)].push_back(i);
        if (use_syn && t.length() == 1) {
            if (const std::vector<int>* ids = syn.synsets_of(t.tokens[0])) {
                for (int id : *ids) by_synset[id].push_back(i);
            }
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    auto harvest = [&pairs](const std::vector<std::uint32_t>& bucket) {
        for (std::size_t x = 0; x < bucket.size(); ++x) {
            for (std::size_t y = x + 1; y < bucket.size(); ++y) {
                pairs.emplace_back(bucket[x], bucket[y]);
            }
        }
    };
    for (const auto& [_, bucket] : by_word) harvest(bucket);
    for (const auto& [_, bucket] : by_spaceless) harvest(bucket);
    for (const auto& [_, bucket] : by_folded) harvest(bucket);
    for (const auto& [_, bucket] : by_synset) harvest(bucket);

    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

}  // namespace

TermGraph build_graph(const TermIndex& index, const SynLex& syn, const RelationConfig& cfg,
                      int threads) {
    TermGraph g;
    g.index = index;
    if (!cfg.any_enabled()) return g;

    const std::vector<Term> terms = index.terms();
    if (terms.size() < 2) return g;

    const auto pairs = candidate_pairs(terms, syn, cfg);

    std::vector<std::vector<VariantRelation>> partial(
        static_cast<std::size_t>(std::max(threads, 1)) + 1);
    parallel_chunks(pairs.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::vector<VariantRelation>& local = partial[chunk];
        for (std::size_t p = begin; p < end; ++p) {
            const Term& a = terms[pairs[p].first];
            const Term& b = terms[pairs[p].second];
            if (auto rel = detect_relation(a, b, syn, cfg)) local.push_back(std::move(*rel));
        }
    });
    for (const auto& chunk : partial) g.edges.insert(chunk.begin(), chunk.end());
    return g;
}

std::string dump_graph(const TermGraph& g) {
    std::string out = "# termmap graph v1\n";
    for (const VariantRelation& e : g.edges) {
        out += e.a.canonical;
        out += '\t';
        out += relation_kind_name(e.kind);
        out += '\t';
        out += e.b.canonical;
        out += '\n';
    }
    return out;
}

TermGraph parse_graph_dump(std::istream& in, const TermIndex& index) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "# termmap graph v1") {
        throw ConfigError("graph dump version mismatch: expected '# termmap graph v1', found '" +
                          trim(line) + "'");
    }
    TermGraph g;
    g.index = index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() != 3) throw ParseError("graph dump line needs 3 tab-separated fields", line_no);
        RelationKind kind;
        if (!relation_kind_from_name(cols[1], kind)) {
            throw ParseError("unknown relation kind '" + cols[1] + "'", line_no);
        }
        const TermIndex::Entry* ea = index.find_canonical(cols[0]);
        const TermIndex::Entry* eb = index.find_canonical(cols[2]);
        if (!ea || !eb) throw ParseError("edge endpoint not present in term index", line_no);
        VariantRelation rel;
        rel.a = ea->term;
        rel.b = eb->term;
        rel.kind = kind;
        g.edges.insert(std::move(rel));
    }
    return g;
}

}  // namespace termmap
