#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the parsers and serializers.
namespace skein::text {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Splits on any run of the given delimiter characters; empty fields are dropped.
std::vector<std::string_view> split_any(std::string_view s, std::string_view delims);
/// Splits on each occurrence of `delim`; empty fields are kept.
std::vector<std::string_view> split_exact(std::string_view s, char delim);

std::string_view trim(std::string_view s);

/// Iterates lines, stripping a trailing '\r'. The callback gets (1-based line number, line).
template <typename F>
void for_each_line(std::string_view textv, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < textv.size()) {
    std::size_t end = textv.find('\n', pos);
    if (end == std::string_view::npos) end = textv.size();
    std::string_view line = textv.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(++line_no, line);
    pos = end + 1;
  }
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace skein::text
