#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace investval::csv {

struct Row {
    std::size_t line_no = 0; // 1-based line in the source file
    std::vector<std::string> fields;
};

// RFC-4180-style parsing: quoted fields, doubled quotes, no multi-line fields.
std::vector<Row> parse(std::string_view text);

// Reads and parses a whole file. Throws IoError if unreadable.
std::vector<Row> read_file(const std::filesystem::path &path);

// Quotes a field when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

// Comma-joins escaped fields; no trailing newline.
std::string join_row(const std::vector<std::string> &fields);

// Locale-independent numeric parsing of a whole field.
double parse_double(std::string_view field, std::size_t line_no, const std::string &column);
long long parse_int(std::string_view field, std::size_t line_no, const std::string &column);

// Fixed two-decimal presentation, ties rounded to even. Used for every
// monetary/score cell in CSV reports; JSON reports keep full precision.
std::string format_fixed2(double v);

// Shortest round-trip representation (config echoes, dataset serialization).
std::string format_shortest(double v);

} // namespace investval::csv
