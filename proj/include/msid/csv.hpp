#pragma once

// Minimal RFC 4180 style CSV reading and writing.

#include <string>
#include <string_view>
#include <vector>

namespace msid::csv {

// Quotes the field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

// Splits text into records of fields. Blank lines are skipped. Throws
// msid::ParseError on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string format_fixed6(double value);

} // namespace msid::csv
