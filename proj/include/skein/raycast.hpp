#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skein/geometry.hpp"

namespace skein {

struct Ray {
  Vec3 origin;
  Vec3 direction;  ///< unit length

  Vec3 at(double t) const { return origin + direction * t; }
  /// Ray from `from` towards `to`.
  static Ray toward(const Vec3& from, const Vec3& to) { return {from, normalized(to - from)}; }
};

enum class HitKind : std::uint8_t { surface, cap };

struct Hit {
  double t = 0.0;
  Vec3 position;
  Vec3 normal;  ///< unit; faces the ray origin for caps, outward for surfaces
  BinIndex bin_id = 0;
  HitKind kind = HitKind::surface;
};

enum class KeepSide : std::uint8_t { positive, negative };
enum class Axis : std::uint8_t { x, y, z };

/// Plane {x : normal . x = offset}; geometry on the `keep` side survives.
struct CuttingPlane {
  Vec3 normal{1, 0, 0};
  double offset = 0.0;
  KeepSide keep = KeepSide::negative;
  std::optional<Axis> axis;
  std::vector<SelectionId> exempt_selections;

  static CuttingPlane along_axis(Axis axis, double offset, KeepSide keep);
  /// Positive on the kept side.
  double kept_distance(const Vec3& p) const {
    const double s = dot(normal, p) - offset;
    return keep == KeepSide::positive ? s : -s;
  }
};

Axis parse_axis(std::string_view s);
std::string_view to_string(Axis a);
KeepSide parse_keep_side(std::string_view s);
std::string_view to_string(KeepSide k);

/// Counters for the swept-sphere solver; safe to share across threads.
struct IntersectStats {
  std::atomic<std::uint64_t> quad_tests{0};
  std::atomic<std::uint64_t> nonconverged{0};
};

/// Nearest non-negative intersection; from inside, the exit point.
std::optional<Hit> intersect_sphere(const Ray& ray, const Sphere& sphere);
std::optional<Hit> intersect_rounded_cone(const Ray& ray, const RoundedCone& cone);
std::optional<Hit> intersect_quad_swept(const Ray& ray, const QuadSwept& swept, IntersectStats* stats = nullptr);

/// Dispatches on the primitive's shape and tags the hit with its bin.
std::optional<Hit> intersect(const Ray& ray, const ScenePrimitive& primitive, IntersectStats* stats = nullptr);

/// Interior test shared by the intersectors (strict).
bool contains(const Shape& shape, const Vec3& p);

/// Intersection with the solid restricted to the intersection of every plane's kept half
/// space. When the ray meets the solid first inside a removed region and then crosses
/// into the kept region while still inside, the result is a cap hit on that plane.
/// Exempt primitives ignore the planes.
std::optional<Hit> clip_hit(const Ray& ray, const ScenePrimitive& primitive, std::span<const CuttingPlane> planes,
                            bool exempt, IntersectStats* stats = nullptr);

/// As clip_hit, applying only planes whose bit is set in `plane_mask`.
std::optional<Hit> clip_hit_masked(const Ray& ray, const ScenePrimitive& primitive,
                                   std::span<const CuttingPlane> planes, std::uint64_t plane_mask,
                                   IntersectStats* stats = nullptr);

inline constexpr std::size_t kMaxCuttingPlanes = 64;

}  // namespace skein
