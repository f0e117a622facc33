#include "investval/csv.hpp"
#include "investval/errors.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cfenv>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace investval::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    std::size_t line_no = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    while (i < n) {
        Row row;
        row.line_no = line_no;
        std::string field;
        bool done_line = false;
        while (!done_line) {
            field.clear();
            if (i < n && text[i] == '"') {
                ++i; // opening quote
                bool closed = false;
                while (i < n) {
                    char c = text[i];
                    if (c == '"') {
                        if (i + 1 < n && text[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                        } else {
                            ++i;
                            closed = true;
                            break;
                        }
                    } else if (c == '\n' || c == '\r') {
                        throw MalformedRow(
                            fmt::format("line {}: newline inside quoted field", line_no),
                            line_no, fmt::format("field {}", row.fields.size() + 1));
                    } else {
                        field.push_back(c);
                        ++i;
                    }
                }
                if (!closed) {
                    throw MalformedRow(fmt::format("line {}: unterminated quoted field", line_no),
                                       line_no, fmt::format("field {}", row.fields.size() + 1));
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    field.push_back(text[i]);
                    ++i;
                }
            }
            row.fields.push_back(field);
            if (i >= n) {
                done_line = true;
            } else if (text[i] == ',') {
                ++i;
            } else { // newline
                if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
                ++i;
                ++line_no;
                done_line = true;
            }
        }
        // Skip rows that are entirely empty (trailing newline, blank lines).
        if (!(row.fields.size() == 1 && row.fields[0].empty())) {
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<Row> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string escape(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string> &fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

double parse_double(std::string_view field, std::size_t line_no, const std::string &column) {
    double value = 0.0;
    const char *first = field.data();
    const char *last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw MalformedRow(
            fmt::format("line {}: column '{}': '{}' is not a finite number", line_no, column,
                        std::string(field)),
            line_no, column);
    }
    return value;
}

long long parse_int(std::string_view field, std::size_t line_no, const std::string &column) {
    long long value = 0;
    const char *first = field.data();
    const char *last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw MalformedRow(fmt::format("line {}: column '{}': '{}' is not an integer", line_no,
                                       column, std::string(field)),
                           line_no, column);
    }
    return value;
}

std::string format_fixed2(double v) {
    if (!std::isfinite(v)) {
        throw RangeViolation("cannot format a non-finite value");
    }
    // nearbyint under the default rounding mode resolves ties to even.
    const double cents_d = std::nearbyint(v * 100.0);
    const auto cents = static_cast<std::int64_t>(cents_d);
    const bool neg = cents < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(cents + 1)) + 1
                                  : static_cast<std::uint64_t>(cents);
    return fmt::format("{}{}.{:02}", neg ? "-" : "", mag / 100, mag % 100);
}

std::string format_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace investval::csv
