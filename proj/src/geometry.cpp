#include "skein/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "skein/error.hpp"

namespace skein {

namespace {

double median_sorted(std::span<const double> v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void require_positive_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius must be positive");
}

// Fraction of the smallest spacing below which the lower fence may not fall.
constexpr double kLowerFenceFloor = 0.1;

}  // namespace

Representation parse_representation(std::string_view s) {
  if (s == "spheres") return Representation::spheres;
  if (s == "straight_tube") return Representation::straight_tube;
  if (s == "smooth_tube") return Representation::smooth_tube;
  throw InvalidArgument("unknown representation '" + std::string(s) + "'");
}

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::spheres: return "spheres";
    case Representation::straight_tube: return "straight_tube";
    case Representation::smooth_tube: return "smooth_tube";
  }
  return "spheres";
}

Aabb bounds(const Shape& shape) {
  Aabb box;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          const Vec3 r{s.radius, s.radius, s.radius};
          box.expand(s.center - r);
          box.expand(s.center + r);
        } else if constexpr (std::is_same_v<T, RoundedCone>) {
          const Vec3 r0{s.r0, s.r0, s.r0};
          const Vec3 r1{s.r1, s.r1, s.r1};
          box.expand(s.p0 - r0);
          box.expand(s.p0 + r0);
          box.expand(s.p1 - r1);
          box.expand(s.p1 + r1);
        } else {
          // The control polygon's hull contains the curve.
          const Vec3 r{s.radius, s.radius, s.radius};
          for (const auto& p : {s.curve.b0, s.curve.b1, s.curve.b2}) {
            box.expand(p - r);
            box.expand(p + r);
          }
        }
      },
      shape);
  return box;
}

Hinges tukey_hinges(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("quartiles of an empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const std::size_t half = (n + 1) / 2;
  const std::span<const double> all(v);
  return {median_sorted(all.first(half)), median_sorted(all), median_sorted(all.last(half))};
}

RadiusBounds estimate_tube_radius(std::span<const double> spacings) {
  if (spacings.empty()) throw InvalidArgument("tube radius needs at least one spacing");
  double smallest = INFINITY;
  for (double s : spacings) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("spacings must be positive and finite");
    smallest = std::min(smallest, s);
  }
  const Hinges h = tukey_hinges(spacings);
  const double lower_fence = std::max(h.q1 - 1.5 * h.iqr(), kLowerFenceFloor * smallest);
  const double upper_fence = h.q3 + 1.5 * h.iqr();

  RadiusBounds out;
  out.upper = 0.5 * upper_fence;
  out.default_radius = std::min(0.5 * 0.5 * (h.q1 + h.q3), 0.5 * smallest);
  // The half-spacing cap can undercut the lower fence when low outliers exist.
  out.lower = std::min(0.5 * lower_fence, out.default_radius);
  return out;
}

std::vector<ScenePrimitive> build_spheres(const ChromatinModel& model, double radius) {
  require_positive_radius(radius);
  std::vector<ScenePrimitive> out;
  out.reserve(model.size());
  for (BinIndex i = 0; i < model.size(); ++i) out.push_back({Sphere{model.bin(i), radius}, i});
  return out;
}

std::vector<ScenePrimitive> build_straight_tube(const ChromatinModel& model, double radius) {
  require_positive_radius(radius);
  std::vector<ScenePrimitive> out;
  out.reserve(model.size());
  for (const auto& part : model.parts()) {
    if (part.bins.first == part.bins.last) {
      out.push_back({Sphere{model.bin(part.bins.first), radius}, part.bins.first});
      continue;
    }
    for (BinIndex i = part.bins.first; i < part.bins.last; ++i)
      out.push_back({RoundedCone{model.bin(i), radius, model.bin(i + 1), radius}, i});
  }
  return out;
}

SplineApproximation approximate_spline(std::span<const Vec3> points) {
  SplineApproximation out;
  std::vector<Vec3> pts;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!pts.empty() && points[i] == pts.back()) {
      ++out.collapsed_points;
      continue;
    }
    pts.push_back(points[i]);
    source.push_back(i);
  }
  if (pts.size() < 2) throw InvalidArgument("spline needs at least two distinct points");

  // Ties go to the earlier point.
  auto push = [&](const QuadBezier& q, std::size_t i) {
    const Vec3 mid = q.at(0.5);
    const bool to_nearer = length_squared(mid - pts[i + 1]) < length_squared(mid - pts[i]);
    out.segments.push_back({q, source[i], source[i + 1], to_nearer ? source[i + 1] : source[i]});
  };

  if (pts.size() == 2) {
    push({pts[0], 0.5 * (pts[0] + pts[1]), pts[1]}, 0);
    return out;
  }

  const std::size_t n = pts.size();
  out.segments.reserve(2 * (n - 1));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // Uniform Catmull-Rom span as a cubic Bezier; end tangents use reflected neighbours.
    const Vec3 prev = i > 0 ? pts[i - 1] : 2.0 * pts[0] - pts[1];
    const Vec3 next = i + 2 < n ? pts[i + 2] : 2.0 * pts[n - 1] - pts[n - 2];
    const Vec3 c0 = pts[i];
    const Vec3 c3 = pts[i + 1];
    const Vec3 c1 = c0 + (c3 - prev) / 6.0;
    const Vec3 c2 = c3 - (next - c0) / 6.0;

    // Split into two quadratics meeting at the midpoint of their inner controls.
    const Vec3 q1 = c0 + 0.75 * (c1 - c0);
    const Vec3 q3 = c3 + 0.75 * (c2 - c3);
    const Vec3 q2 = 0.5 * (q1 + q3);
    push({c0, q1, q2}, i);
    push({q2, q3, c3}, i);
  }
  return out;
}

std::vector<ScenePrimitive> build_smooth_tube(std::span<const SplineSegment> segments, double radius,
                                              std::span<const BinIndex> point_bins) {
  require_positive_radius(radius);
  std::vector<ScenePrimitive> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) {
    if (seg.nearest_point >= point_bins.size()) throw InvalidArgument("segment refers to an unknown point");
    out.push_back({QuadSwept{seg.curve, radius}, point_bins[seg.nearest_point]});
  }
  return out;
}

std::vector<ScenePrimitive> build_smooth_tube(const ChromatinModel& model, double radius) {
  require_positive_radius(radius);
  std::vector<ScenePrimitive> out;
  for (const auto& part : model.parts()) {
    const auto pts = model.bins().subspan(part.bins.first, part.bins.size());
    bool all_same = true;
    for (const auto& p : pts) all_same = all_same && p == pts.front();
    if (all_same) {
      out.push_back({Sphere{pts.front(), radius}, part.bins.first});
      continue;
    }
    std::vector<BinIndex> bins(pts.size());
    for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = part.bins.first + k;
    const auto spline = approximate_spline(pts);
    auto prims = build_smooth_tube(spline.segments, radius, bins);
    out.insert(out.end(), prims.begin(), prims.end());
  }
  return out;
}

std::vector<ScenePrimitive> build_representation(const ChromatinModel& model, Representation kind, double radius) {
  switch (kind) {
    case Representation::spheres: return build_spheres(model, radius);
    case Representation::straight_tube: return build_straight_tube(model, radius);
    case Representation::smooth_tube: return build_smooth_tube(model, radius);
  }
  return {};
}

}  // namespace skein
