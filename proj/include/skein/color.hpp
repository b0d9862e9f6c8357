#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skein {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Neutral gray used for bins without any annotation and for absent values.
inline constexpr Rgb kNeutralGray{160, 160, 160};

/// A piecewise-linear colormap over [0, 1] defined by evenly spaced control colors.
class Colormap {
 public:
  /// Throws InvalidArgument when fewer than two control colors are given.
  Colormap(std::string id, std::vector<Rgb> stops);

  const std::string& id() const { return id_; }
  std::span<const Rgb> stops() const { return stops_; }

  /// Linear interpolation between neighbouring stops, channels rounded half up.
  /// Values outside [0, 1] are clamped.
  Rgb sample(double value) const;

  /// Stop `i` modulo the stop count; used for categorical palettes.
  Rgb category(std::size_t i) const { return stops_[i % stops_.size()]; }

 private:
  std::string id_;
  std::vector<Rgb> stops_;
};

/// Built-in maps: "sequential", "diverging", "categorical". Throws InvalidArgument otherwise.
const Colormap& builtin_colormap(std::string_view id);
std::vector<std::string> builtin_colormap_ids();

/// Absent values map to kNeutralGray.
std::vector<Rgb> apply_colormap(std::span<const std::optional<double>> values, std::string_view colormap_id);
std::vector<Rgb> apply_colormap(std::span<const std::optional<double>> values, const Colormap& map);

/// CIE L* of an sRGB color.
double lightness(const Rgb& c);

/// Deterministic saturated color for index `i` of a sequence seeded by `seed_text`.
/// Same text and index always give the same color on every platform.
Rgb seeded_color(std::string_view seed_text, std::size_t i = 0);

/// "#rrggbb" (case-insensitive). Throws InvalidArgument when malformed.
Rgb parse_hex_color(std::string_view s);
std::string to_hex(const Rgb& c);

}  // namespace skein
