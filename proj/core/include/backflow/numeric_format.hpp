#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>

namespace backflow {

/// Shortest decimal string that parses back to exactly `value`.
/// Non-finite values are written as "nan", "inf" and "-inf".
std::string format_double(double value);

/// Writes `contents` with LF line endings exactly as given (binary mode).
void write_text_file(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace backflow
