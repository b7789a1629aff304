#ifndef TERMMAP_CORPUS_HPP
#define TERMMAP_CORPUS_HPP

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace termmap {

// One bibliographic record. Titles and abstracts are the analysis text;
// year and source drive period splitting and corpus statistics.
struct Record {
    std::string id;
    std::string title;
    std::string abstract;
    int year = 0;
    std::string source;

    bool operator==(const Record&) const = default;

    // Title and abstract joined with a sentence boundary, title first.
    std::string analysis_text() const;
};

struct PeriodSpec {
    std::string label;
    int start_year = 0;
    int end_year = 0;

    bool contains(int year) const { return year >= start_year && year <= end_year; }
    bool operator==(const PeriodSpec&) const = default;
};

// Bucket label for records whose year falls outside every configured period.
inline constexpr const char* kUnassignedPeriod = "unassigned";

struct CorpusStats {
    long long record_count = 0;
    std::map<std::string, long long> per_source_counts;
    std::map<int, long long> per_year_counts;

    bool operator==(const CorpusStats&) const = default;
};

// Parse output: records in input order plus a tally of rejected entries.
struct ParseResult {
    std::vector<Record> records;
    long long skipped = 0;
    std::vector<std::string> warnings;
};

// Reads a WoS/ISI tagged-field export: two-letter tags at column 0, value
// from column 4 (1-based), continuation lines start with three spaces,
// records end with ER, optional EF file terminator. Records missing a title
// or a parseable year in [1800,2100] are skipped and counted. Throws
// ParseError when fields are pending at end of stream without an ER.
ParseResult parse_isi(std::istream& in);

// Reads one JSON object per line (keys: id, title, abstract, year, source;
// abstract optional). Blank lines are ignored. Skip rules match parse_isi.
// Throws ParseError on a line that is not a well-formed object.
ParseResult parse_jsonl(std::istream& in);

// Inverse of parse_jsonl for valid records: parse_jsonl(serialize_jsonl(r)) == r.
std::string serialize_jsonl(const std::vector<Record>& records);

void validate_periods(const std::vector<PeriodSpec>& periods);

// Assigns each record to the period containing its year; out-of-range
// records land under kUnassignedPeriod. Input order is preserved inside
// each bucket. Throws ConfigError on overlapping periods.
std::map<std::string, std::vector<Record>> split_periods(const std::vector<Record>& records,
                                                         const std::vector<PeriodSpec>& periods);

CorpusStats corpus_stats(const std::vector<Record>& records);

}  // namespace termmap

#endif
