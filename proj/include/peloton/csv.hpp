#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace peloton::csv {

// Minimal RFC 4180 field handling: commas separate fields, double quotes
// wrap fields containing commas, quotes or newlines. Records never span lines.

std::vector<std::string> split_line(std::string_view line, std::size_t line_number);

/// Quotes `field` only when needed.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Strips a trailing '\r' (CRLF files).
std::string_view chomp(std::string_view line);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-cell parse; throws FormatError citing `line_number` on failure.
double parse_double(std::string_view cell, std::string_view column, std::size_t line_number);
long long parse_integer(std::string_view cell, std::string_view column, std::size_t line_number);

}  // namespace peloton::csv
