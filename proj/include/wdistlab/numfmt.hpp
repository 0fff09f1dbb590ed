#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wdistlab {

/// 17 significant digits, so parse_double(format_double(x)) == x bit for bit.
/// Infinities render as "inf"/"-inf", NaN as "nan".
std::string format_double(double x);

/// Strict full-string parse; throws std::invalid_argument on malformed input.
double parse_double(std::string_view text);

/// Splits one CSV record (RFC 4180 quoting).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace wdistlab
