#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace btsampler {

// Shortest decimal form that parses back to the identical double.
std::string format_real(double value);

// Strict parsers: the whole field must be consumed. `what` names the field in
// the DataError message.
double parse_real(std::string_view field, std::string_view what);
std::uint64_t parse_count(std::string_view field, std::string_view what);

std::vector<std::string_view> split(std::string_view text, char sep);

bool is_valid_utf8(std::string_view bytes) noexcept;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Splits file content into lines on LF. A single trailing LF terminates the
// last line rather than starting an empty one.
struct Lines {
  std::vector<std::string_view> lines;
  bool trailing_newline = false;
};
Lines split_lines(std::string_view content);

}  // namespace btsampler
