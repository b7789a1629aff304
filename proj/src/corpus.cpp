#include "termmap/corpus.hpp"

#include <set>

#include "termmap/util.hpp"

#include <json.hpp>

namespace termmap {

namespace {

constexpr int kMinYear = 1800;
constexpr int kMaxYear = 2100;

// Strips trailing spaces, tabs and CR so CRLF exports and ragged lines
// parse the same as clean ones.
std::string rstrip(const std::string& line) {
    std::size_t e = line.size();
    while (e > 0 && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
    return line.substr(0, e);
}

bool parse_year(const std::string& text, int& year) {
    std::string t = trim(text);
    if (t.empty() || t.size() > 5) return false;
    long v = 0;
    for (char c : t) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    year = static_cast<int>(v);
    return true;
}

// Shared validation for both parsers: drop (and count) records that cannot
// feed the analysis, warn about the reason, and enforce id uniqueness.
class RecordSink {
public:
    explicit RecordSink(ParseResult& out) : out_(out) {}

    void accept(Record rec, const std::string& where, bool year_ok) {
        rec.title = trim(rec.title);
        if (rec.title.empty()) {
            skip(where + ": missing title");
            return;
        }
        if (!year_ok) {
            skip(where + ": unparseable year");
            return;
        }
        if (rec.year < kMinYear || rec.year > kMaxYear) {
            skip(where + ": year " + std::to_string(rec.year) + " out of range");
            return;
        }
        if (!seen_ids_.insert(rec.id).second) {
            skip(where + ": duplicate id '" + rec.id + "'");
            return;
        }
        out_.records.push_back(std::move(rec));
    }

    void skip(const std::string& reason) {
        ++out_.skipped;
        out_.warnings.push_back(reason);
    }

private:
    ParseResult& out_;
    std::set<std::string> seen_ids_;
};

}  // namespace

std::string Record::analysis_text() const {
    if (abstract.empty()) return title;
    std::string text = title;
    char last = text.empty() ? '\0' : text.back();
    if (last == '.' || last == '?' || last == '!' || last == ';') {
        text += ' ';
    } else {
        text += ". ";
    }
    text += abstract;
    return text;
}

ParseResult parse_isi(std::istream& in) {
    ParseResult result;
    RecordSink sink(result);

    std::map<std::string, std::string> fields;
    std::string current_tag;
    std::size_t line_no = 0;
    std::size_t block_index = 0;
    bool pending = false;

    auto flush_record = [&]() {
        ++block_index;
        if (fields.empty()) return;
        Record rec;
        rec.title = fields.count("TI") ? fields["TI"] : "";
        rec.abstract = fields.count("AB") ? fields["AB"] : "";
        rec.source = fields.count("SO") ? trim(fields["SO"]) : "";
        rec.id = fields.count("UT") ? trim(fields["UT"]) : "r" + std::to_string(block_index);
        std::string where = "record " + rec.id;
        if (!fields.count("PY")) {
            sink.skip(where + ": missing PY");
        } else {
            bool year_ok = parse_year(fields["PY"], rec.year);
            sink.accept(std::move(rec), where, year_ok);
        }
        fields.clear();
        current_tag.clear();
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = rstrip(raw);
        if (line.empty()) {
            current_tag.clear();  // blank line ends any running field
            continue;
        }
        if (starts_with(line, "   ")) {
            if (!current_tag.empty()) {
                std::string cont = trim(line);
                if (!cont.empty()) {
                    std::string& value = fields[current_tag];
                    if (!value.empty()) value += ' ';
                    value += cont;
                }
            }
            continue;
        }
        if (line.size() >= 2 && line[0] >= 'A' && line[0] <= 'Z' && line[1] >= 'A' && line[1] <= 'Z' &&
            (line.size() == 2 || line[2] == ' ')) {
            std::string tag = line.substr(0, 2);
            std::string value = line.size() > 3 ? line.substr(3) : "";
            if (tag == "ER") {
                flush_record();
                pending = false;
                continue;
            }
            if (tag == "EF") {
                break;
            }
            if (tag == "TI" || tag == "AB" || tag == "PY" || tag == "SO" || tag == "UT") {
                current_tag = tag;
                std::string& slot = fields[tag];
                if (!slot.empty() && !value.empty()) slot += ' ';
                slot += value;
                pending = true;
            } else {
                current_tag.clear();  // unknown tags (FN, VR, AU, ...) are ignored
            }
            continue;
        }
        // Free-standing text without a tag context is tolerated only inside a field.
        if (!current_tag.empty()) {
            std::string& value = fields[current_tag];
            if (!value.empty()) value += ' ';
            value += trim(line);
        }
    }

    if (pending && !fields.empty()) {
        throw ParseError("unterminated record: fields pending without ER", line_no);
    }
    return result;
}

ParseResult parse_jsonl(std::istream& in) {
    ParseResult result;
    RecordSink sink(result);

    std::string raw;
    std::size_t line_no = 0;
    std::size_t entry_index = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        ++entry_index;

        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw ParseError("not a well-formed JSON object", line_no);
        }

        Record rec;
        rec.id = obj.contains("id") && obj["id"].is_string() ? obj["id"].get<std::string>()
                                                             : "r" + std::to_string(entry_index);
        if (obj.contains("title") && obj["title"].is_string()) rec.title = obj["title"].get<std::string>();
        if (obj.contains("abstract") && obj["abstract"].is_string()) rec.abstract = obj["abstract"].get<std::string>();
        if (obj.contains("source") && obj["source"].is_string()) rec.source = obj["source"].get<std::string>();

        bool year_ok = false;
        if (obj.contains("year")) {
            const auto& y = obj["year"];
            if (y.is_number_integer()) {
                rec.year = y.get<int>();
                year_ok = true;
            } else if (y.is_string()) {
                year_ok = parse_year(y.get<std::string>(), rec.year);
            }
        } else {
            sink.skip("line " + std::to_string(line_no) + ": missing year");
            continue;
        }
        sink.accept(std::move(rec), "line " + std::to_string(line_no), year_ok);
    }
    return result;
}

std::string serialize_jsonl(const std::vector<Record>& records) {
    std::string out;
    for (const Record& rec : records) {
        nlohmann::json obj;
        obj["id"] = rec.id;
        obj["title"] = rec.title;
        obj["abstract"] = rec.abstract;
        obj["year"] = rec.year;
        obj["source"] = rec.source;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void validate_periods(const std::vector<PeriodSpec>& periods) {
    if (periods.empty()) throw ConfigError("no periods configured");
    std::set<std::string> labels;
    for (const PeriodSpec& p : periods) {
        if (trim(p.label).empty()) throw ConfigError("period with empty label");
        if (p.label == kUnassignedPeriod)
            throw ConfigError("period label '" + std::string(kUnassignedPeriod) + "' is reserved");
        if (!labels.insert(p.label).second)
            throw ConfigError("duplicate period label '" + p.label + "'");
        if (p.start_year > p.end_year)
            throw ConfigError("period '" + p.label + "': start_year > end_year");
    }
    for (std::size_t i = 0; i < periods.size(); ++i) {
        for (std::size_t j = i + 1; j < periods.size(); ++j) {
            const PeriodSpec& a = periods[i];
            const PeriodSpec& b = periods[j];
            if (a.start_year <= b.end_year && b.start_year <= a.end_year) {
                throw ConfigError("periods '" + a.label + "' and '" + b.label + "' overlap");
            }
        }
    }
}

std::map<std::string, std::vector<Record>> split_periods(const std::vector<Record>& records,
                                                         const std::vector<PeriodSpec>& periods) {
    validate_periods(periods);
    std::map<std::string, std::vector<Record>> buckets;
    for (const PeriodSpec& p : periods) buckets[p.label];
    buckets[kUnassignedPeriod];
    for (const Record& rec : records) {
        const PeriodSpec* hit = nullptr;
        for (const PeriodSpec& p : periods) {
            if (p.contains(rec.year)) {
                hit = &p;
                break;
            }
        }
        buckets[hit ? hit->label : kUnassignedPeriod].push_back(rec);
    }
    return buckets;
}

CorpusStats corpus_stats(const std::vector<Record>& records) {
    CorpusStats stats;
    stats.record_count = static_cast<long long>(records.size());
    for (const Record& rec : records) {
        ++stats.per_source_counts[rec.source];
        ++stats.per_year_counts[rec.year];
    }
    return stats;
}

}  // namespace termmap
