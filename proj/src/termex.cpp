#include "termmap/termex.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "termmap/util.hpp"

namespace termmap {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool has_alpha(const std::string& s) {
    for (unsigned char c : s) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return true;
    }
    return false;
}

bool is_sentence_break(const std::string& text, std::size_t i) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!' && c != ';') return false;
    return i + 1 >= text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
}

}  // namespace

const char* pos_tag_name(PosTag tag) {
    switch (tag) {
        case PosTag::Noun: return "NOUN";
        case PosTag::Adj: return "ADJ";
        case PosTag::Verb: return "VERB";
        case PosTag::Prep: return "PREP";
        case PosTag::Det: return "DET";
        case PosTag::Other: return "OTHER";
    }
    return "OTHER";
}

bool pos_tag_from_name(const std::string& name, PosTag& tag) {
    if (name == "NOUN") tag = PosTag::Noun;
    else if (name == "ADJ") tag = PosTag::Adj;
    else if (name == "VERB") tag = PosTag::Verb;
    else if (name == "PREP") tag = PosTag::Prep;
    else if (name == "DET") tag = PosTag::Det;
    else if (name == "OTHER") tag = PosTag::Other;
    else return false;
    return true;
}

std::vector<RawSentence> tokenize(const std::string& text) {
    std::vector<RawSentence> sentences;
    RawSentence current;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            std::size_t start = i;
            std::size_t j = i;
            while (j < n) {
                if (is_word_byte(static_cast<unsigned char>(text[j]))) {
                    ++j;
                } else if (text[j] == '-' && j + 1 < n && j > start &&
                           is_word_byte(static_cast<unsigned char>(text[j + 1]))) {
                    ++j;  // interior hyphen stays inside the token
                } else {
                    break;
                }
            }
            current.push_back(RawToken{text.substr(start, j - start), start});
            i = j;
            continue;
        }
        if (is_sentence_break(text, i)) {
            if (!current.empty()) {
                sentences.push_back(std::move(current));
                current.clear();
            }
        }
        ++i;
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

PosLexicon PosLexicon::load(std::istream& in) {
    PosLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t tab = s.find('\t');
        if (tab == std::string::npos) throw ParseError("lexicon line without tab separator", line_no);
        std::string word = to_lower_ascii(trim(s.substr(0, tab)));
        std::string tag_name = trim(s.substr(tab + 1));
        PosTag tag;
        if (word.empty() || !pos_tag_from_name(tag_name, tag)) {
            throw ParseError("bad lexicon entry '" + s + "'", line_no);
        }
        lex.add(word, tag);
    }
    return lex;
}

PosLexicon PosLexicon::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing POS lexicon file: " + path.string());
    return load(in);
}

bool PosLexicon::lookup(const std::string& word, PosTag& tag) const {
    auto it = entries_.find(word);
    if (it == entries_.end()) return false;
    tag = it->second;
    return true;
}

PluralExceptions PluralExceptions::load(std::istream& in) {
    PluralExceptions ex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t tab = s.find('\t');
        if (tab == std::string::npos) throw ParseError("plural-exceptions line without tab separator", line_no);
        std::string plural = to_lower_ascii(trim(s.substr(0, tab)));
        std::string singular = to_lower_ascii(trim(s.substr(tab + 1)));
        if (plural.empty() || singular.empty()) {
            throw ParseError("bad plural-exceptions entry '" + s + "'", line_no);
        }
        ex.add(plural, singular);
    }
    return ex;
}

PluralExceptions PluralExceptions::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing plural-exceptions file: " + path.string());
    return load(in);
}

bool PluralExceptions::lookup(const std::string& word, std::string& singular) const {
    auto it = entries_.find(word);
    if (it == entries_.end()) return false;
    singular = it->second;
    return true;
}

PosTag tag_word(const std::string& lower_word, const PosLexicon& lexicon) {
    PosTag tag;
    if (lexicon.lookup(lower_word, tag)) return tag;
    if (!has_alpha(lower_word)) return PosTag::Other;

    struct SuffixRule {
        const char* suffix;
        PosTag tag;
    };
    static const std::array<SuffixRule, 15> rules = {{
        {"al", PosTag::Adj},
        {"ic", PosTag::Adj},
        {"ive", PosTag::Adj},
        {"ous", PosTag::Adj},
        {"tion", PosTag::Noun},
        {"ment", PosTag::Noun},
        {"ness", PosTag::Noun},
        {"ity", PosTag::Noun},
        {"ism", PosTag::Noun},
        {"er", PosTag::Noun},
        {"or", PosTag::Noun},
        {"y", PosTag::Noun},
        {"ize", PosTag::Verb},
        {"ise", PosTag::Verb},
        {"ate", PosTag::Verb},
    }};
    for (const SuffixRule& rule : rules) {
        std::string_view suffix(rule.suffix);
        if (lower_word.size() > suffix.size() + 1 && ends_with(lower_word, suffix)) {
            return rule.tag;
        }
    }
    return PosTag::Noun;
}

std::vector<Token> pos_tag(const RawSentence& sentence, const PosLexicon& lexicon) {
    std::vector<Token> out;
    out.reserve(sentence.size());
    for (const RawToken& raw : sentence) {
        Token tok;
        tok.surface = raw.surface;
        tok.start_offset = raw.start_offset;
        tok.tag = tag_word(to_lower_ascii(raw.surface), lexicon);
        out.push_back(std::move(tok));
    }
    return out;
}

std::string singularize(const std::string& lower_word, const PluralExceptions& plurals) {
    std::string singular;
    if (plurals.lookup(lower_word, singular)) return singular;
    const std::size_t n = lower_word.size();
    if (n > 3 && ends_with(lower_word, "ies")) {
        return lower_word.substr(0, n - 3) + "y";
    }
    static const char* kEsSuffixes[] = {"ses", "xes", "zes", "ches", "shes"};
    for (const char* suf : kEsSuffixes) {
        std::string_view s(suf);
        if (n > s.size() && ends_with(lower_word, s)) {
            return lower_word.substr(0, n - 2);
        }
    }
    if (n > 3 && lower_word.back() == 's' && !ends_with(lower_word, "ss") &&
        !ends_with(lower_word, "us") && !ends_with(lower_word, "is")) {
        return lower_word.substr(0, n - 1);
    }
    return lower_word;
}

Term make_term(std::vector<std::string> tokens, int head_index) {
    Term term;
    term.canonical = join(tokens, " ");
    term.tokens = std::move(tokens);
    term.head_index = head_index;
    return term;
}

Term normalize_term(const std::vector<Token>& matched, int head_index, const PluralExceptions& plurals) {
    std::vector<std::string> out_tokens;
    int out_head = 0;
    for (std::size_t i = 0; i < matched.size(); ++i) {
        std::string lower = to_lower_ascii(matched[i].surface);
        for (const std::string& part : split(lower, '-')) {
            if (part.empty()) continue;
            out_tokens.push_back(singularize(part, plurals));
            // the head token maps to its last hyphen fragment
            if (static_cast<int>(i) == head_index) out_head = static_cast<int>(out_tokens.size()) - 1;
        }
    }
    return make_term(std::move(out_tokens), out_head);
}

namespace {

struct Match {
    int begin = 0;  // inclusive token span within the sentence
    int end = 0;
    int head = 0;
};

bool is_np_word(PosTag tag) { return tag == PosTag::Noun || tag == PosTag::Adj; }

// Maximal matches of both noun-phrase patterns within one tagged sentence.
std::vector<Match> match_patterns(const std::vector<Token>& sent) {
    std::vector<Match> matches;
    const int n = static_cast<int>(sent.size());

    // (ADJ|NOUN)* NOUN: maximal ADJ/NOUN run, trimmed to its last noun.
    int i = 0;
    while (i < n) {
        if (!is_np_word(sent[static_cast<std::size_t>(i)].tag)) {
            ++i;
            continue;
        }
        int j = i;
        while (j < n && is_np_word(sent[static_cast<std::size_t>(j)].tag)) ++j;
        int last_noun = -1;
        for (int k = j - 1; k >= i; --k) {
            if (sent[static_cast<std::size_t>(k)].tag == PosTag::Noun) {
                last_noun = k;
                break;
            }
        }
        if (last_noun >= 0) matches.push_back(Match{i, last_noun, last_noun});
        i = j;
    }

    // NOUN+ "of" (ADJ|NOUN)* NOUN: head is the noun just before "of".
    for (int p = 1; p + 1 < n; ++p) {
        const Token& tok = sent[static_cast<std::size_t>(p)];
        if (tok.tag != PosTag::Prep || to_lower_ascii(tok.surface) != "of") continue;
        if (sent[static_cast<std::size_t>(p - 1)].tag != PosTag::Noun) continue;
        int left = p - 1;
        while (left > 0 && sent[static_cast<std::size_t>(left - 1)].tag == PosTag::Noun) --left;
        if (!is_np_word(sent[static_cast<std::size_t>(p + 1)].tag)) continue;
        int right = p + 1;
        while (right + 1 < n && is_np_word(sent[static_cast<std::size_t>(right + 1)].tag)) ++right;
        int last_noun = -1;
        for (int k = right; k > p; --k) {
            if (sent[static_cast<std::size_t>(k)].tag == PosTag::Noun) {
                last_noun = k;
                break;
            }
        }
        if (last_noun < 0) continue;
        matches.push_back(Match{left, last_noun, p - 1});
    }

    return matches;
}

}  // namespace

std::vector<TermOccurrence> extract_terms(const std::vector<std::vector<Token>>& tagged,
                                          const PluralExceptions& plurals,
                                          const TermexConfig& cfg) {
    std::vector<TermOccurrence> out;
    for (std::size_t si = 0; si < tagged.size(); ++si) {
        const std::vector<Token>& sent = tagged[si];
        for (const Match& m : match_patterns(sent)) {
            const int length = m.end - m.begin + 1;
            auto emit = [&](int begin, int end, int head) {
                std::vector<Token> span(sent.begin() + begin, sent.begin() + end + 1);
                TermOccurrence occ;
                occ.term = normalize_term(span, head - begin, plurals);
                // hyphen splitting can grow the token list past the cap
                if (occ.term.tokens.empty() || occ.term.length() > cfg.max_term_length) return;
                occ.sentence = static_cast<int>(si);
                occ.token_begin = begin;
                out.push_back(std::move(occ));
            };

            if (length == 1) {
                emit(m.begin, m.end, m.head);  // single-word candidate
                continue;
            }
            if (length > cfg.max_term_length) continue;
            emit(m.begin, m.end, m.head);
            if (cfg.emit_subterms) {
                // nested subterms ending at the head, length >= 2
                for (int s = m.begin; s < m.head; ++s) {
                    if (s == m.begin && m.head == m.end) continue;  // the match itself
                    emit(s, m.head, m.head);
                }
            }
        }
    }
    return out;
}

void TermIndex::add_occurrence(const Term& term, const std::string& doc_id) {
    auto it = entries_.find(term.canonical);
    if (it == entries_.end()) {
        Entry entry;
        entry.term = term;
        entry.stats.freq = 1;
        entry.stats.doc_ids.insert(doc_id);
        entries_.emplace(term.canonical, std::move(entry));
        return;
    }
    Entry& entry = it->second;
    entry.term.head_index = std::min(entry.term.head_index, term.head_index);
    entry.stats.freq += 1;
    entry.stats.doc_ids.insert(doc_id);
}

void TermIndex::merge(const TermIndex& other) {
    for (const auto& [canonical, entry] : other.entries_) {
        auto it = entries_.find(canonical);
        if (it == entries_.end()) {
            entries_.emplace(canonical, entry);
            continue;
        }
        Entry& mine = it->second;
        mine.term.head_index = std::min(mine.term.head_index, entry.term.head_index);
        mine.stats.freq += entry.stats.freq;
        mine.stats.doc_ids.insert(entry.stats.doc_ids.begin(), entry.stats.doc_ids.end());
    }
}

const TermIndex::Entry* TermIndex::find_canonical(const std::string& canonical) const {
    auto it = entries_.find(canonical);
    return it == entries_.end() ? nullptr : &it->second;
}

bool TermIndex::contains(const Term& term) const {
    const Entry* e = find_canonical(term.canonical);
    return e && e->term == term;
}

long long TermIndex::freq_of(const Term& term) const {
    const Entry* e = find_canonical(term.canonical);
    return e ? e->stats.freq : 0;
}

long long TermIndex::doc_freq_of(const Term& term) const {
    const Entry* e = find_canonical(term.canonical);
    return e ? e->stats.doc_freq() : 0;
}

std::vector<Term> TermIndex::terms() const {
    std::vector<Term> out;
    out.reserve(entries_.size());
    for (const auto& [_, entry] : entries_) out.push_back(entry.term);
    return out;
}

TermIndex TermIndex::pruned(const TermexConfig& cfg) const {
    TermIndex out;
    std::set<std::string> surviving_heads;
    for (const auto& [canonical, entry] : entries_) {
        if (entry.term.length() < 2) continue;
        if (entry.stats.doc_freq() < cfg.min_doc_freq) continue;
        out.entries_.emplace(canonical, entry);
        surviving_heads.insert(entry.term.head_word());
    }
    for (const auto& [canonical, entry] : entries_) {
        if (entry.term.length() != 1) continue;
        if (entry.stats.doc_freq() < cfg.min_doc_freq) continue;
        if (!surviving_heads.count(entry.term.tokens[0])) continue;
        out.entries_.emplace(canonical, entry);
    }
    return out;
}

std::string TermIndex::dump() const {
    std::string out = "# termmap terms v1\n";
    for (const auto& [canonical, entry] : entries_) {
        out += canonical;
        out += '\t';
        out += std::to_string(entry.term.head_index);
        out += '\t';
        out += std::to_string(entry.stats.freq);
        out += '\t';
        bool first = true;
        for (const std::string& id : entry.stats.doc_ids) {
            if (!first) out += ';';
            out += escape_field(id);
            first = false;
        }
        out += '\n';
    }
    return out;
}

TermIndex TermIndex::parse_dump(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "# termmap terms v1") {
        throw ConfigError("term dump version mismatch: expected '# termmap terms v1', found '" +
                          trim(line) + "'");
    }
    TermIndex index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() != 4) throw ParseError("term dump line needs 4 tab-separated fields", line_no);
        Entry entry;
        std::vector<std::string> tokens = split(cols[0], ' ');
        int head = 0;
        try {
            entry.stats.freq = std::stoll(cols[2]);
            head = std::stoi(cols[1]);
        } catch (const std::exception&) {
            throw ParseError("term dump line has non-numeric head or frequency", line_no);
        }
        if (head < 0 || head >= static_cast<int>(tokens.size())) {
            throw ParseError("head index out of range", line_no);
        }
        entry.term = make_term(std::move(tokens), head);
        for (const std::string& id : split(cols[3], ';')) {
            if (!id.empty()) entry.stats.doc_ids.insert(unescape_field(id));
        }
        if (!index.entries_.emplace(entry.term.canonical, std::move(entry)).second) {
            throw ParseError("duplicate term in dump", line_no);
        }
    }
    return index;
}

TermIndex index_terms(const std::vector<std::pair<std::string, std::vector<TermOccurrence>>>& by_record,
                      const TermexConfig& cfg) {
    TermIndex raw;
    for (const auto& [doc_id, occurrences] : by_record) {
        for (const TermOccurrence& occ : occurrences) {
            raw.add_occurrence(occ.term, doc_id);
        }
    }
    return raw.pruned(cfg);
}

}  // namespace termmap
