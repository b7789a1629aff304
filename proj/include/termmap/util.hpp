#ifndef TERMMAP_UTIL_HPP
#define TERMMAP_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace termmap {

// Bad or missing configuration (files, parameter ranges, period overlaps).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input stream. Carries the 1-based line number where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- string helpers ----------------------------------------------------

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Percent-escapes '%', ';', tab and newline so values can live in
// semicolon-joined dump fields. unescape_field is its inverse.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

// ---- checksums ----------------------------------------------------------

// FNV-1a 64-bit. Used for config hashes and artifact checksums in the run
// manifest; not a cryptographic hash.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

// ---- files ----------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a half-written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// ---- parallelism ----------------------------------------------------------

// Runs fn(chunk_index, begin, end) over [0,n) split into `threads` contiguous
// chunks. Callers merge per-chunk results themselves; merges must be
// order-independent so output never depends on the thread count.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace termmap

#endif
