#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace periorbital::csv {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
// Embedded newlines inside quotes are not supported.
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote, or whitespace edge.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

// Reads the next non-empty line; returns false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& fields);

double parse_double(std::string_view s);

}  // namespace periorbital::csv
