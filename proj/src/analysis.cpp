#include "skein/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skein/error.hpp"

namespace skein {

MergedBins merge_points(std::span<const Vec3> points, std::span<const std::size_t> part_sizes, int level) {
  if (level < 0) throw InvalidArgument("level must be non-negative");
  // 2^level saturates: beyond 62 every part is one group anyway.
  const std::size_t group = level >= 62 ? points.size() + 1 : std::size_t{1} << level;
  MergedBins out;
  out.level = level;
  std::size_t start = 0;
  for (const std::size_t size : part_sizes) {
    if (start + size > points.size()) throw InvalidArgument("part sizes exceed the point count");
    for (std::size_t g = 0; g < size; g += std::min(group, size - g)) {
      const std::size_t n = std::min(group, size - g);
      Vec3 sum;
      for (std::size_t k = 0; k < n; ++k) sum += points[start + g + k];
      out.positions.push_back(sum / static_cast<double>(n));
      out.groups.push_back({start + g, start + g + n - 1});
    }
    start += size;
  }
  if (start != points.size()) throw InvalidArgument("part sizes do not cover every point");
  return out;
}

MergedBins merge_bins(const ChromatinModel& model, int level) {
  std::vector<std::size_t> sizes;
  for (const auto& p : model.parts()) sizes.push_back(p.bins.size());
  return merge_points(model.bins(), sizes, level);
}

DistanceTile distance_tile(const MergedBins& merged, BinRange rows, BinRange cols) {
  const std::size_t n = merged.positions.size();
  if (rows.first > rows.last || cols.first > cols.last || rows.last >= n || cols.last >= n)
    throw OutOfRange("tile range outside the " + std::to_string(n) + " merged bins at level " +
                     std::to_string(merged.level));
  DistanceTile t;
  t.rows = rows;
  t.cols = cols;
  t.level = merged.level;
  t.values.reserve(rows.size() * cols.size());
  for (BinIndex i = rows.first; i <= rows.last; ++i)
    for (BinIndex j = cols.first; j <= cols.last; ++j)
      t.values.push_back(distance(merged.positions[i], merged.positions[j]));
  return t;
}

DistanceTile distance_tile(const ChromatinModel& model, int level, BinRange rows, BinRange cols) {
  return distance_tile(merge_bins(model, level), rows, cols);
}

DistanceTile distance_map(const ChromatinModel& model, int level) {
  const MergedBins merged = merge_bins(model, level);
  const BinRange all{0, merged.positions.size() - 1};
  return distance_tile(merged, all, all);
}

SelectionDistanceMap distance_map_for_selection(const ChromatinModel& model, const BinSet& selection, int level) {
  if (selection.size() != model.size()) throw InvalidArgument("selection length does not match the model");
  SelectionDistanceMap out;
  out.bins = selection.indices();
  if (out.bins.empty()) throw InvalidArgument("selection is empty");
  std::vector<Vec3> points;
  std::vector<std::size_t> sizes;
  points.reserve(out.bins.size());
  std::size_t current_part = model.parts().size();
  for (BinIndex b : out.bins) {
    points.push_back(model.bin(b));
    const std::size_t part = model.part_of(b);
    if (sizes.empty() || part != current_part) {
      sizes.push_back(0);
      current_part = part;
    }
    ++sizes.back();
  }
  out.merged = merge_points(points, sizes, level);
  const BinRange all{0, out.merged.positions.size() - 1};
  out.tile = distance_tile(out.merged, all, all);
  return out;
}

int level_for(std::size_t visible_bins, std::size_t tile_size) {
  if (tile_size == 0) throw InvalidArgument("tile size must be positive");
  int level = 0;
  // Smallest L with visible / 2^L <= tile_size, i.e. ceil(log2(visible / tile_size)).
  while (level < 63 && (std::size_t{1} << level) * tile_size < visible_bins) ++level;
  return level;
}

std::shared_ptr<const DistanceTile> TileCache::get(const ChromatinModel& model, int level, BinRange rows,
                                                   BinRange cols) {
  const Key key{model.content_hash(), level, rows.first, rows.last, cols.first, cols.last};
  std::lock_guard lock(mutex_);
  if (const auto it = entries_.find(key); it != entries_.end()) {
    ++hits_;
    recency_.splice(recency_.begin(), recency_, it->second.position);
    return it->second.tile;
  }
  ++misses_;
  // Computed under the lock so concurrent requests for one key compute it once.
  auto tile = std::make_shared<const DistanceTile>(distance_tile(model, level, rows, cols));
  if (capacity_ == 0) return tile;
  if (entries_.size() >= capacity_) {
    entries_.erase(recency_.back());
    recency_.pop_back();
  }
  recency_.push_front(key);
  entries_.emplace(key, Entry{tile, recency_.begin()});
  return tile;
}

std::size_t TileCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::uint64_t TileCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::uint64_t TileCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

SasaParams SasaParams::with_defaults(double bin_radius) { return {bin_radius, 0.4 * bin_radius, 960}; }

void SasaParams::validate() const {
  if (!(bin_radius > 0.0)) throw InvalidArgument("bin radius must be positive");
  if (!(probe_radius >= 0.0)) throw InvalidArgument("probe radius must be non-negative");
  if (sample_count < 92) throw InvalidArgument("SASA needs at least 92 sample points");
}

std::vector<Vec3> sphere_points(int count) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    out.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

SasaResult compute_sasa(const ChromatinModel& model, const SasaParams& params, const std::optional<BinSet>& subset) {
  params.validate();
  if (subset && subset->size() != model.size()) throw InvalidArgument("subset length does not match the model");
  SasaResult out;
  if (subset) out.bins = subset->indices();
  else {
    out.bins.resize(model.size());
    for (BinIndex b = 0; b < model.size(); ++b) out.bins[b] = b;
  }
  if (out.bins.empty()) return out;
  const double R = params.bin_radius + params.probe_radius;
  const double R2 = R * R;
  const std::vector<Vec3> points = sphere_points(params.sample_count);

  // Cell list with edge 2R: any overlapping sphere lies in one of the 27 surrounding cells.
  const double cell = 2.0 * R;
  Vec3 lo = model.bin(out.bins.front());
  for (BinIndex b : out.bins) lo = min(lo, model.bin(b));
  struct Cell {
    std::int64_t x, y, z;
    auto operator<=>(const Cell&) const = default;
  };
  auto cell_of = [&](const Vec3& p) {
    return Cell{static_cast<std::int64_t>(std::floor((p.x - lo.x) / cell)),
                static_cast<std::int64_t>(std::floor((p.y - lo.y) / cell)),
                static_cast<std::int64_t>(std::floor((p.z - lo.z) / cell))};
  };
  std::vector<std::pair<Cell, BinIndex>> sorted;
  sorted.reserve(out.bins.size());
  for (BinIndex b : out.bins) sorted.emplace_back(cell_of(model.bin(b)), b);
  std::sort(sorted.begin(), sorted.end());

  const double full = 4.0 * std::numbers::pi * R2;
  std::vector<BinIndex> near;
  out.values.reserve(out.bins.size());
  for (BinIndex b : out.bins) {
    const Vec3 c = model.bin(b);
    const Cell home = cell_of(c);
    near.clear();
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const Cell key{home.x + dx, home.y + dy, home.z + dz};
          auto it = std::lower_bound(sorted.begin(), sorted.end(), key,
                                     [](const auto& e, const Cell& k) { return e.first < k; });
          for (; it != sorted.end() && it->first == key; ++it) {
            if (it->second == b) continue;
            if (length_squared(model.bin(it->second) - c) < 4.0 * R2) near.push_back(it->second);
          }
        }
    std::size_t accessible = 0;
    for (const Vec3& u : points) {
      const Vec3 q = c + u * R;
      bool buried = false;
      for (BinIndex o : near)
        if (length_squared(q - model.bin(o)) < R2) {
          buried = true;
          break;
        }
      if (!buried) ++accessible;
    }
    out.values.push_back(full * static_cast<double>(accessible) / params.sample_count);
  }
  return out;
}

}  // namespace skein
