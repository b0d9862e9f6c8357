#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skein/raycast.hpp"

namespace skein {

/// Everything a Scene is built from.
struct SceneDescription {
  std::vector<ScenePrimitive> primitives;
  std::size_t bin_count = 0;
  /// Per-bin visibility; empty means every bin is visible.
  std::vector<bool> visible;
  std::vector<CuttingPlane> planes;
  /// Per-bin mask of the planes that clip the bin (bit i = planes[i]); empty means all planes.
  std::vector<std::uint64_t> plane_masks;
  /// Grid cell edge; <= 0 picks twice the largest primitive radius.
  double cell_size = 0.0;
};

/// Immutable set of primitives with visibility, cutting planes and a uniform grid for
/// ray queries. Safe for concurrent tracing.
class Scene {
 public:
  explicit Scene(SceneDescription description);

  /// Nearest visible, clipped hit.
  std::optional<Hit> trace(const Ray& ray, IntersectStats* stats = nullptr) const;
  /// Same result as trace(), testing every primitive.
  std::optional<Hit> trace_brute_force(const Ray& ray, IntersectStats* stats = nullptr) const;
  std::optional<BinIndex> pick(const Ray& ray) const;

  std::span<const ScenePrimitive> primitives() const { return desc_.primitives; }
  std::span<const CuttingPlane> planes() const { return desc_.planes; }
  std::size_t bin_count() const { return desc_.bin_count; }
  bool bin_visible(BinIndex b) const { return desc_.visible.empty() || desc_.visible[b]; }
  std::uint64_t plane_mask(BinIndex b) const { return desc_.plane_masks.empty() ? all_planes_ : desc_.plane_masks[b]; }
  const Aabb& bounds() const { return bounds_; }
  std::array<int, 3> grid_dims() const { return dims_; }
  double cell_size() const { return cell_; }

 private:
  std::optional<Hit> test(const Ray& ray, std::uint32_t prim, IntersectStats* stats) const;

  SceneDescription desc_;
  std::uint64_t all_planes_ = 0;
  std::vector<Aabb> prim_bounds_;
  Aabb bounds_;
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::uint32_t> cell_start_;  // CSR offsets, size cells + 1
  std::vector<std::uint32_t> cell_items_;
  std::uint64_t id_ = 0;
};

}  // namespace skein
