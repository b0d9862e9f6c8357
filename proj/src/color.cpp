#include "skein/color.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "skein/error.hpp"
#include "skein/text.hpp"

// Generated by CMake from data/colormaps/*.csv.
#include "colormap_tables.inc"

namespace skein {

namespace {

std::uint8_t to_byte(double c) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(c + 0.5), 0.0, 255.0));
}

std::vector<Rgb> parse_table(std::string_view table) {
  std::vector<Rgb> out;
  text::for_each_line(table, [&](std::size_t line_no, std::string_view line) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') return;
    const auto f = text::split_any(line, ", \t");
    if (f.size() != 3) throw ParseError(line_no, "colormap row needs 3 channels");
    Rgb c;
    std::uint8_t* ch[3] = {&c.r, &c.g, &c.b};
    for (int k = 0; k < 3; ++k) {
      const auto v = text::parse_int(f[k]);
      if (!v || *v < 0 || *v > 255) throw ParseError(line_no, "channel out of range");
      *ch[k] = static_cast<std::uint8_t>(*v);
    }
    out.push_back(c);
  });
  return out;
}

const std::map<std::string, Colormap, std::less<>>& builtins() {
  static const auto maps = [] {
    std::map<std::string, Colormap, std::less<>> m;
    for (const auto& t : kColormapTables) m.emplace(t.id, Colormap(t.id, parse_table(t.csv)));
    return m;
  }();
  return maps;
}

double srgb_to_linear(std::uint8_t c) {
  const double v = c / 255.0;
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

}  // namespace

Colormap::Colormap(std::string id, std::vector<Rgb> stops) : id_(std::move(id)), stops_(std::move(stops)) {
  if (stops_.size() < 2) throw InvalidArgument("colormap '" + id_ + "' needs at least two stops");
}

Rgb Colormap::sample(double value) const {
  const double v = std::clamp(value, 0.0, 1.0);
  const double pos = v * static_cast<double>(stops_.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), stops_.size() - 2);
  const double f = pos - static_cast<double>(i);
  const Rgb& a = stops_[i];
  const Rgb& b = stops_[i + 1];
  return {to_byte(a.r + (b.r - a.r) * f), to_byte(a.g + (b.g - a.g) * f),
          to_byte(a.b + (b.b - a.b) * f)};
}

const Colormap& builtin_colormap(std::string_view id) {
  const auto& maps = builtins();
  auto it = maps.find(id);
  if (it == maps.end()) throw InvalidArgument("unknown colormap '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> builtin_colormap_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : builtins()) ids.push_back(id);
  return ids;
}

std::vector<Rgb> apply_colormap(std::span<const std::optional<double>> values, std::string_view colormap_id) {
  return apply_colormap(values, builtin_colormap(colormap_id));
}

std::vector<Rgb> apply_colormap(std::span<const std::optional<double>> values, const Colormap& map) {
  std::vector<Rgb> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v ? map.sample(*v) : kNeutralGray);
  return out;
}

double lightness(const Rgb& c) {
  const double y = 0.2126729 * srgb_to_linear(c.r) + 0.7151522 * srgb_to_linear(c.g) +
                   0.0721750 * srgb_to_linear(c.b);
  const double f = y > 0.008856 ? std::cbrt(y) : 7.787 * y + 16.0 / 116.0;
  return 116.0 * f - 16.0;
}

Rgb seeded_color(std::string_view seed_text, std::size_t i) {
  // FNV-1a of the text selects the stream; raw mt19937_64 output keeps it portable.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : seed_text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::mt19937_64 rng(h);
  rng.discard(2 * i);
  const double hue = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 6.0;
  const double sat = 0.55 + 0.35 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  constexpr double value = 0.9;

  const double c = value * sat;
  const double x = c * (1.0 - std::abs(std::fmod(hue, 2.0) - 1.0));
  const double m = value - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hue)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {to_byte((r + m) * 255.0), to_byte((g + m) * 255.0), to_byte((b + m) * 255.0)};
}

Rgb parse_hex_color(std::string_view s) {
  auto hex = [&](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw InvalidArgument("malformed color '" + std::string(s) + "'");
  };
  if (s.size() != 7 || s[0] != '#') throw InvalidArgument("malformed color '" + std::string(s) + "'");
  return {static_cast<std::uint8_t>(hex(s[1]) * 16 + hex(s[2])),
          static_cast<std::uint8_t>(hex(s[3]) * 16 + hex(s[4])),
          static_cast<std::uint8_t>(hex(s[5]) * 16 + hex(s[6]))};
}

std::string to_hex(const Rgb& c) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s = "#";
  for (std::uint8_t v : {c.r, c.g, c.b}) {
    s += digits[v >> 4];
    s += digits[v & 15];
  }
  return s;
}

}  // namespace skein
