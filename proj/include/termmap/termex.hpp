#ifndef TERMMAP_TERMEX_HPP
#define TERMMAP_TERMEX_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace termmap {

enum class PosTag { Noun, Adj, Verb, Prep, Det, Other };

const char* pos_tag_name(PosTag tag);
bool pos_tag_from_name(const std::string& name, PosTag& tag);

// A sentence as raw surface tokens plus byte offsets; tagging adds PosTag.
struct RawToken {
    std::string surface;
    std::size_t start_offset = 0;
};
using RawSentence = std::vector<RawToken>;

struct Token {
    std::string surface;
    std::size_t start_offset = 0;
    PosTag tag = PosTag::Other;
};

// Normalized multiword term. tokens are lowercase, singularized, hyphen-split;
// head_index points at the syntactic head (rightmost noun of a compound, or
// the noun governing an "of" phrase). canonical is tokens joined by single
// spaces and is the term's identity.
struct Term {
    std::vector<std::string> tokens;
    int head_index = 0;
    std::string canonical;

    const std::string& head_word() const { return tokens[static_cast<std::size_t>(head_index)]; }
    int length() const { return static_cast<int>(tokens.size()); }

    bool operator==(const Term& other) const {
        return canonical == other.canonical && head_index == other.head_index;
    }
    // Total order on (canonical, head_index); used everywhere determinism matters.
    auto operator<=>(const Term& other) const {
        if (auto c = canonical <=> other.canonical; c != 0) return c;
        return head_index <=> other.head_index;
    }
};

Term make_term(std::vector<std::string> tokens, int head_index);

struct TermOccurrence {
    Term term;
    int sentence = 0;
    int token_begin = 0;  // index of the first matched token within the sentence
};

// Tagger data: word -> tag, lowercase words, '#' comments.
class PosLexicon {
public:
    static PosLexicon load(std::istream& in);
    static PosLexicon load_file(const std::filesystem::path& path);

    void add(const std::string& word, PosTag tag) { entries_[word] = tag; }
    bool lookup(const std::string& word, PosTag& tag) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, PosTag> entries_;
};

// Irregular plural -> singular pairs consulted before the rule chain.
class PluralExceptions {
public:
    static PluralExceptions load(std::istream& in);
    static PluralExceptions load_file(const std::filesystem::path& path);

    void add(const std::string& plural, const std::string& singular) { entries_[plural] = singular; }
    bool lookup(const std::string& word, std::string& singular) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::string> entries_;
};

struct TermexConfig {
    int max_term_length = 6;   // tokens, including "of"
    long long min_doc_freq = 2;
    bool emit_subterms = true;  // nested head-suffix subterms of each maximal match
};

// Sentence split on ./?/!/; followed by whitespace; tokens are maximal runs
// of word characters, with interior hyphens kept ("gay-lesbian" is one raw
// token). Offsets are byte positions into `text`.
std::vector<RawSentence> tokenize(const std::string& text);

// Lexicon lookup first, then suffix heuristics, then noun as default.
std::vector<Token> pos_tag(const RawSentence& sentence, const PosLexicon& lexicon);
PosTag tag_word(const std::string& lower_word, const PosLexicon& lexicon);

// Lowercase + hyphen-split + singularization of every token; the head is
// remapped through the split. Idempotent.
Term normalize_term(const std::vector<Token>& matched, int head_index, const PluralExceptions& plurals);
std::string singularize(const std::string& lower_word, const PluralExceptions& plurals);

// Matches (ADJ|NOUN)* NOUN and NOUN+ "of" (ADJ|NOUN)* NOUN, keeps maximal
// matches of length 2..max and (optionally) their nested subterms ending at
// the head. Single-word noun matches are emitted as candidates; whether they
// survive as first-class terms is decided corpus-wide in index_terms.
std::vector<TermOccurrence> extract_terms(const std::vector<std::vector<Token>>& tagged,
                                          const PluralExceptions& plurals,
                                          const TermexConfig& cfg);

struct TermStats {
    long long freq = 0;
    std::set<std::string> doc_ids;

    long long doc_freq() const { return static_cast<long long>(doc_ids.size()); }
    bool operator==(const TermStats&) const = default;
};

// Aggregated corpus statistics per term. Keyed by canonical text; if the
// same canonical was produced with different head positions, the smallest
// head index wins, which keeps merges order-independent.
class TermIndex {
public:
    struct Entry {
        Term term;
        TermStats stats;
        bool operator==(const Entry&) const = default;
    };
    using Map = std::map<std::string, Entry>;

    void add_occurrence(const Term& term, const std::string& doc_id);
    void merge(const TermIndex& other);

    const Map& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry* find_canonical(const std::string& canonical) const;
    bool contains(const Term& term) const;
    long long freq_of(const Term& term) const;
    long long doc_freq_of(const Term& term) const;
    std::vector<Term> terms() const;

    // Drops entries below the doc-frequency floor and applies the
    // single-word promotion rule (a single-word term survives only if its
    // word heads some surviving multiword term).
    TermIndex pruned(const TermexConfig& cfg) const;

    // Dump format: "# termmap terms v1" header, then
    // canonical<TAB>head_index<TAB>freq<TAB>doc_id;doc_id;... sorted by canonical.
    std::string dump() const;
    static TermIndex parse_dump(std::istream& in);

    bool operator==(const TermIndex&) const = default;

private:
    Map entries_;
};

// Aggregates per-record occurrences into a pruned TermIndex.
TermIndex index_terms(const std::vector<std::pair<std::string, std::vector<TermOccurrence>>>& by_record,
                      const TermexConfig& cfg);

}  // namespace termmap

#endif
