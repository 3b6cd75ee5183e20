#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stormgrid {

/// Delimiter-separated table with a header row. Fields may be double-quoted
/// (so a polyline like "21.9,112.1;22.0,112.3" survives a comma delimiter).
/// Blank lines and lines starting with '#' are skipped. The delimiter is a
/// tab if the header contains one, otherwise a comma.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // source line of each row, for messages
    std::string source;                     // file name or "<text>"

    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
};

Table parse_table(std::string_view text, std::string source = "<text>");
Table read_table(const std::filesystem::path& path);

/// `key = value` lines, '#' comments. Keys are case-sensitive.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text, const std::string& source = "<text>");
KeyValues read_key_values(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Decimal number with '.' radix; also accepts a simple fraction "a/b".
double parse_number(std::string_view text, std::string_view context);
int parse_int(std::string_view text, std::string_view context);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);

/// Shortest round-trippable decimal form of `value`, stable across runs.
std::string format_number(double value);
/// Fixed significant digits (for human-facing tables).
std::string format_sig(double value, int digits);

/// Hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

}  // namespace stormgrid
