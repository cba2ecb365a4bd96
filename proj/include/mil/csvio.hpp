#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mil {

/// Shortest decimal string that round-trips the exact double value.
/// Locale-independent ('.' decimal point), used for every numeric value the
/// toolkit writes so output files are byte-stable across runs.
std::string format_double(double v);

/// Strict locale-independent parse of a full field; nullopt when the field is
/// not a complete finite or non-finite double literal.
std::optional<double> parse_double(std::string_view field);

std::optional<long long> parse_int(std::string_view field);

/// Splits on the separator without unquoting (the formats here never quote).
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Writes content to path in binary mode (LF endings preserved verbatim).
/// Throws std::runtime_error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mil
