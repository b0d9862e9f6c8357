#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "skein/model.hpp"
#include "skein/selections.hpp"

namespace skein {

/// Positions after level-of-detail merging, with the original bins behind each entry.
struct MergedBins {
  int level = 0;
  std::vector<Vec3> positions;
  std::vector<BinRange> groups;  ///< indices into the source list (bins, or selected bins)
};

/// Averages consecutive groups of 2^level bins; groups never span parts and a trailing
/// partial group averages its actual members. Throws InvalidArgument when level < 0.
MergedBins merge_bins(const ChromatinModel& model, int level);

/// Same, over an explicit point list split into parts of the given sizes.
MergedBins merge_points(std::span<const Vec3> points, std::span<const std::size_t> part_sizes, int level);

struct DistanceTile {
  BinRange rows;  ///< merged-bin indices at `level`
  BinRange cols;
  int level = 0;
  std::vector<double> values;  ///< row-major

  std::size_t row_count() const { return rows.size(); }
  std::size_t col_count() const { return cols.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * col_count() + c]; }

  friend bool operator==(const DistanceTile&, const DistanceTile&) = default;
};

/// Euclidean distances between merged positions. Throws OutOfRange when a range does not
/// fit the merged list.
DistanceTile distance_tile(const MergedBins& merged, BinRange rows, BinRange cols);
DistanceTile distance_tile(const ChromatinModel& model, int level, BinRange rows, BinRange cols);
/// Every merged bin against every other.
DistanceTile distance_map(const ChromatinModel& model, int level);

struct SelectionDistanceMap {
  DistanceTile tile;
  std::vector<BinIndex> bins;  ///< dense index -> model bin
  MergedBins merged;           ///< groups index into `bins`
};

/// Distance map over the selected bins only, re-indexed densely and merged within parts.
/// Throws InvalidArgument for an empty selection.
SelectionDistanceMap distance_map_for_selection(const ChromatinModel& model, const BinSet& selection, int level);

inline constexpr std::size_t kTileSize = 256;

/// ceil(log2(visible_bins / tile_size)), never below zero.
int level_for(std::size_t visible_bins, std::size_t tile_size = kTileSize);

/// Thread-safe LRU cache of distance tiles keyed by (model hash, level, ranges).
class TileCache {
 public:
  explicit TileCache(std::size_t capacity = 64) : capacity_(capacity) {}

  std::shared_ptr<const DistanceTile> get(const ChromatinModel& model, int level, BinRange rows, BinRange cols);

  std::size_t size() const;
  std::uint64_t hits() const;
  std::uint64_t misses() const;

 private:
  using Key = std::tuple<std::uint64_t, int, BinIndex, BinIndex, BinIndex, BinIndex>;
  struct Entry {
    std::shared_ptr<const DistanceTile> tile;
    std::list<Key>::iterator position;
  };

  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::list<Key> recency_;  // front = most recent
  std::map<Key, Entry> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

struct SasaParams {
  double bin_radius = 1.0;
  double probe_radius = 0.4;
  int sample_count = 960;

  /// probe = 0.4 x bin radius.
  static SasaParams with_defaults(double bin_radius);
  /// Throws InvalidArgument when bin_radius <= 0, probe_radius < 0 or sample_count < 92.
  void validate() const;
};

/// Quasi-uniform points on the unit sphere (golden-angle spiral).
std::vector<Vec3> sphere_points(int count);

struct SasaResult {
  std::vector<BinIndex> bins;   ///< bins that were evaluated, ascending
  std::vector<double> values;   ///< accessible area per evaluated bin
};

/// Shrake-Rupley accessible area per bin. With a subset, only subset bins are evaluated
/// and only they occlude each other.
SasaResult compute_sasa(const ChromatinModel& model, const SasaParams& params,
                        const std::optional<BinSet>& subset = std::nullopt);

}  // namespace skein
