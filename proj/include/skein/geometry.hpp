#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "skein/model.hpp"
#include "skein/vec3.hpp"

namespace skein {

enum class Representation { spheres, straight_tube, smooth_tube };

Representation parse_representation(std::string_view s);
std::string_view to_string(Representation r);

struct Sphere {
  Vec3 center;
  double radius = 0.0;
};

/// Convex hull of two spheres. Equal radii give a capsule.
struct RoundedCone {
  Vec3 p0;
  double r0 = 0.0;
  Vec3 p1;
  double r1 = 0.0;
};

/// Quadratic Bezier control points.
struct QuadBezier {
  Vec3 b0, b1, b2;

  Vec3 at(double u) const {
    const double v = 1.0 - u;
    return b0 * (v * v) + b1 * (2.0 * u * v) + b2 * (u * u);
  }
  Vec3 tangent(double u) const { return (b1 - b0) * (2.0 * (1.0 - u)) + (b2 - b1) * (2.0 * u); }
};

/// Sphere of constant radius swept along a quadratic Bezier.
struct QuadSwept {
  QuadBezier curve;
  double radius = 0.0;
};

using Shape = std::variant<Sphere, RoundedCone, QuadSwept>;

struct ScenePrimitive {
  Shape shape;
  BinIndex bin_id = 0;
};

Aabb bounds(const Shape& shape);

struct RadiusBounds {
  double lower = 0.0;
  double default_radius = 0.0;
  double upper = 0.0;
};

/// Quartiles by Tukey's hinges (median of each half, the median included in both halves
/// when the count is odd).
struct Hinges {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};
Hinges tukey_hinges(std::span<const double> values);

/// Tube radius bounds from consecutive-bin spacings: half of the Tukey fence range
/// [max(Q1 - 1.5 IQR, 0.1 min), Q3 + 1.5 IQR], default half the midpoint of the hinges
/// capped at half the smallest spacing. Throws InvalidArgument on an empty list or a
/// non-positive spacing.
RadiusBounds estimate_tube_radius(std::span<const double> spacings);

/// One sphere per bin. Throws InvalidArgument when radius <= 0.
std::vector<ScenePrimitive> build_spheres(const ChromatinModel& model, double radius);

/// One rounded cone per consecutive bin pair within each part; a single-bin part
/// becomes a sphere. Throws InvalidArgument when radius <= 0.
std::vector<ScenePrimitive> build_straight_tube(const ChromatinModel& model, double radius);

struct SplineSegment {
  QuadBezier curve;
  std::size_t from_point = 0;  ///< index of the input point starting this span
  std::size_t to_point = 0;    ///< index of the input point ending this span
  std::size_t nearest_point = 0;  ///< from_point or to_point, whichever is nearer the curve midpoint
};

struct SplineApproximation {
  std::vector<SplineSegment> segments;
  std::size_t collapsed_points = 0;  ///< consecutive duplicates dropped before fitting
};

/// C1 chain of quadratic Beziers through every point: a uniform Catmull-Rom cubic per
/// span, each split into two quadratics. Two distinct points give one straight segment.
/// Throws InvalidArgument when fewer than two distinct points remain.
SplineApproximation approximate_spline(std::span<const Vec3> points);

/// One swept primitive per segment, attributed to the bin of the segment's nearest_point;
/// `point_bins` maps input point indices to bin ids. Throws InvalidArgument when radius <= 0.
std::vector<ScenePrimitive> build_smooth_tube(std::span<const SplineSegment> segments, double radius,
                                              std::span<const BinIndex> point_bins);

/// Smooth tube over every part of the model; single-bin parts become spheres.
std::vector<ScenePrimitive> build_smooth_tube(const ChromatinModel& model, double radius);

std::vector<ScenePrimitive> build_representation(const ChromatinModel& model, Representation kind,
                                                 double radius);

}  // namespace skein
