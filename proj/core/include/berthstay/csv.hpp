#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace berthstay::csv {

// RFC 4180 field splitting for a single physical line (embedded newlines are
// not supported). Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

std::string quote(std::string_view field);

void write_row(std::ostream& out, std::span<const std::string> fields);

struct Row {
    std::size_t line_number = 0;  // 1-based physical line
    std::string text;
};

// Reads the next non-empty line, stripping a trailing '\r' and a leading
// UTF-8 BOM on line 1.
std::optional<Row> next_row(std::istream& in, std::size_t& line_number);

std::string trim(std::string_view s);

// Shortest round-trip decimal representation.
std::string format_number(double value);

}  // namespace berthstay::csv
