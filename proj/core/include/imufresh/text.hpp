#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imufresh {

/// Shortest decimal string that parses back to exactly `value`.
/// NaN renders as `nan`, infinities as `inf` / `-inf`.
std::string format_double(double value);

/// Strict full-token parse; rejects trailing garbage and empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Splits on `sep` without quote processing. Feature names and kinds never
/// contain commas, so the artifact CSVs do not need quoting.
std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view text);

/// Reads a whole text file; throws Error(IoError) when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Splits file contents into lines, accepting LF or CRLF, with or without a
/// trailing newline.
std::vector<std::string_view> split_lines(std::string_view contents);

}  // namespace imufresh
