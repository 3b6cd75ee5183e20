#include "stormgrid/text_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stormgrid/error.hpp"

namespace stormgrid {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == delimiter) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::vector<std::string> split_record(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

bool skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::size_t Table::column(std::string_view name) const {
    if (auto c = find_column(name)) return *c;
    throw Error(ErrorKind::ParseError, source + ": missing column '" + std::string(name) + "'");
}

Table parse_table(std::string_view text, std::string source) {
    Table table;
    table.source = std::move(source);
    char delimiter = ',';
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        pos = nl + 1;
        if (skippable(line)) {
            if (nl == text.size()) break;
            continue;
        }
        if (!have_header) {
            delimiter = line.find('\t') != std::string_view::npos ? '\t' : ',';
            table.header = split_record(line, delimiter);
            have_header = true;
        } else {
            auto fields = split_record(line, delimiter);
            if (fields.size() < table.header.size()) {
                throw Error(ErrorKind::ParseError, table.source + ":" + std::to_string(line_no) + ": expected " +
                                                       std::to_string(table.header.size()) + " fields, got " +
                                                       std::to_string(fields.size()));
            }
            table.rows.push_back(std::move(fields));
            table.line_numbers.push_back(line_no);
        }
        if (nl == text.size()) break;
    }
    if (!have_header) throw Error(ErrorKind::ParseError, table.source + ": no header row");
    return table;
}

Table read_table(const std::filesystem::path& path) { return parse_table(read_file(path), path.string()); }

KeyValues parse_key_values(std::string_view text, const std::string& source) {
    KeyValues kv;
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line_no) + ": expected key = value");
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        kv[trim(std::string_view(line).substr(0, eq))] = value;
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    return parse_key_values(read_file(path), path.string());
}

double parse_number(std::string_view text, std::string_view context) {
    const auto t = trim(text);
    auto fail = [&] {
        return Error(ErrorKind::ParseError, std::string(context) + ": not a number: '" + t + "'");
    };
    if (t.empty()) throw fail();
    if (auto slash = t.find('/'); slash != std::string::npos) {
        const double num = parse_number(std::string_view(t).substr(0, slash), context);
        const double den = parse_number(std::string_view(t).substr(slash + 1), context);
        if (den == 0.0) throw fail();
        return num / den;
    }
    double value = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) throw fail();
    return value;
}

int parse_int(std::string_view text, std::string_view context) {
    const auto t = trim(text);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw Error(ErrorKind::ParseError, std::string(context) + ": not an integer: '" + t + "'");
    return value;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

std::string format_sig(double value, int digits) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
    return buf.data();
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::NumericFailure, "sha256 digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

}  // namespace stormgrid
