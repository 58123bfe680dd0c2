#pragma once

// Small parsing helpers shared by the serializers. Not installed.

#include <string>
#include <string_view>
#include <vector>

namespace backflow::detail {

double parse_double(std::string_view text);

/// "1,2.5,-3" -> {1, 2.5, -3}
std::vector<double> parse_number_list(std::string_view text);

/// Parses a numeric CSV whose first line must equal the given header.
/// Accepts LF or CRLF line endings; blank lines are skipped.
std::vector<std::vector<double>> parse_csv(std::string_view csv,
                                           const std::vector<std::string>& header);

std::string trim(std::string_view s);

}  // namespace backflow::detail
