#include "skein/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skein/error.hpp"
#include "skein/polynomial.hpp"

namespace skein {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Span {
  double t0 = kInf;
  double t1 = -kInf;
  bool empty() const { return !(t0 <= t1); }
  void merge(const Span& o) {
    if (o.empty()) return;
    t0 = std::min(t0, o.t0);
    t1 = std::max(t1, o.t1);
  }
};

struct Crossing {
  double t = 0.0;
  Vec3 normal;
};

Span sphere_span(const Ray& ray, const Vec3& center, double r) {
  const Vec3 oc = ray.origin - center;
  const double b = dot(oc, ray.direction);
  const Vec3 perp = oc - ray.direction * b;
  const double disc = r * r - length_squared(perp);
  if (disc < 0.0) return {};
  const double s = std::sqrt(disc);
  return {-b - s, -b + s};
}

// ---------------------------------------------------------------------------
// Rounded cone: union of the two end spheres and the tangent frustum between them.

struct ConeFrame {
  Vec3 p0, p1, axis;
  double r0 = 0, r1 = 0, length = 0;
  double sin_phi = 0, cos_phi = 1, tan_phi = 0;
  double z0 = 0, z1 = 0;  // slab of the frustum along the axis, measured from p0
  bool single_sphere = false;
  Vec3 big_center;
  double big_radius = 0;

  explicit ConeFrame(const RoundedCone& c) : p0(c.p0), p1(c.p1), r0(c.r0), r1(c.r1) {
    const Vec3 ba = p1 - p0;
    length = skein::length(ba);
    if (length <= std::abs(r0 - r1) * (1.0 + 1e-12) || length < 1e-300) {
      single_sphere = true;
      big_center = r0 >= r1 ? p0 : p1;
      big_radius = std::max(r0, r1);
      return;
    }
    axis = ba / length;
    sin_phi = (r0 - r1) / length;
    cos_phi = std::sqrt(std::max(0.0, 1.0 - sin_phi * sin_phi));
    tan_phi = sin_phi / cos_phi;
    z0 = r0 * sin_phi;
    z1 = length + r1 * sin_phi;
  }

  double rho(double z) const { return r0 * cos_phi - (z - z0) * tan_phi; }

  Vec3 normal_at(const Vec3& x) const {
    if (single_sphere) return normalized(x - big_center);
    const Vec3 rel = x - p0;
    const double z = dot(rel, axis);
    if (z <= z0) return normalized(rel);
    if (z >= z1) return normalized(x - p1);
    const Vec3 w = rel - axis * z;
    const double wl = skein::length(w);
    if (wl == 0.0) return axis;
    return w / wl * cos_phi + axis * sin_phi;
  }

  bool contains(const Vec3& x) const {
    if (single_sphere) return length_squared(x - big_center) < big_radius * big_radius;
    const Vec3 rel = x - p0;
    const double z = dot(rel, axis);
    if (z <= z0) return length_squared(rel) < r0 * r0;
    if (z >= z1) return length_squared(x - p1) < r1 * r1;
    const double rz = rho(z);
    return length_squared(rel - axis * z) < rz * rz;
  }

  Span frustum_span(const Ray& ray) const {
    const Vec3 rel = ray.origin - p0;
    const double zo = dot(rel, axis);
    const double zd = dot(ray.direction, axis);

    Span slab;
    if (std::abs(zd) < 1e-15) {
      if (zo < z0 || zo > z1) return {};
      slab = {-kInf, kInf};
    } else {
      double ta = (z0 - zo) / zd;
      double tb = (z1 - zo) / zd;
      if (ta > tb) std::swap(ta, tb);
      slab = {ta, tb};
    }

    // Radial condition |w(t)|^2 <= rho(z(t))^2, a quadratic A t^2 + B t + C <= 0.
    const Vec3 w0 = rel - axis * zo;
    const Vec3 wd = ray.direction - axis * zd;
    const double alpha = rho(zo);
    const double beta = -zd * tan_phi;
    const double qa = length_squared(wd) - beta * beta;
    const double qb = 2.0 * (dot(w0, wd) - alpha * beta);
    const double qc = length_squared(w0) - alpha * alpha;

    Span pieces[2];
    const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
    if (std::abs(qa) <= 1e-14 * scale) {
      if (std::abs(qb) <= 1e-300) {
        if (qc > 0.0) return {};
        pieces[0] = {-kInf, kInf};
      } else {
        const double root = -qc / qb;
        pieces[0] = qb > 0.0 ? Span{-kInf, root} : Span{root, kInf};
      }
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) {
        if (qa > 0.0) return {};
        pieces[0] = {-kInf, kInf};
      } else {
        const double s = std::sqrt(disc);
        const double q = -0.5 * (qb + std::copysign(s, qb));
        double ra = q / qa;
        double rb = q != 0.0 ? qc / q : ra;
        if (ra > rb) std::swap(ra, rb);
        if (qa > 0.0) {
          pieces[0] = {ra, rb};
        } else {
          pieces[0] = {-kInf, ra};
          pieces[1] = {rb, kInf};
        }
      }
    }

    // The frustum is convex, so the clipped pieces are one interval.
    Span out;
    for (const auto& p : pieces) {
      if (p.empty()) continue;
      const Span clipped{std::max(p.t0, slab.t0), std::min(p.t1, slab.t1)};
      out.merge(clipped);
    }
    return out;
  }

  Span span(const Ray& ray) const {
    if (single_sphere) return sphere_span(ray, big_center, big_radius);
    Span s = sphere_span(ray, p0, r0);
    s.merge(sphere_span(ray, p1, r1));
    s.merge(frustum_span(ray));
    return s;
  }
};

// ---------------------------------------------------------------------------
// Swept sphere along a quadratic Bezier. For a curve parameter u the sphere at C(u)
// covers the ray interval [z(u) - sqrt(-h(u)), z(u) + sqrt(-h(u))], where z is the
// curve's coordinate along the ray and h(u) = |perpendicular offset|^2 - r^2. The first
// surface crossing is an extremum of these endpoints over the feasible set h <= 0, so it
// is attained at u = 0, u = 1, a root of h, or a root of (h'/2)^2 + z'^2 h.

struct RayCurve {
  poly::Polynomial h;   // quartic
  double zc[3]{};       // z(u) coefficients
  std::array<double, 16> us{};
  std::size_t count = 0;

  double z(double u) const { return zc[0] + u * (zc[1] + u * zc[2]); }
};

bool bounding_sphere_missed(const Ray& ray, const QuadSwept& s, Vec3& center, double& bound) {
  const auto& q = s.curve;
  center = (q.b0 + q.b1 * 2.0 + q.b2) * 0.25;  // curve point at u = 1/2
  bound = std::max({distance(center, q.b0), distance(center, q.b1), distance(center, q.b2)}) + s.radius;
  const Vec3 oc = ray.origin - center;
  const double b = dot(oc, ray.direction);
  return length_squared(oc - ray.direction * b) > bound * bound;
}

void build_ray_curve(const Ray& ray, const QuadSwept& s, RayCurve& rc) {
  const auto& q = s.curve;
  const Vec3 c0 = q.b0 - ray.origin;
  const Vec3 c1 = (q.b1 - q.b0) * 2.0;
  const Vec3 c2 = q.b0 - q.b1 * 2.0 + q.b2;
  const Vec3& d = ray.direction;
  rc.zc[0] = dot(c0, d);
  rc.zc[1] = dot(c1, d);
  rc.zc[2] = dot(c2, d);
  const Vec3 p0 = c0 - d * rc.zc[0];
  const Vec3 p1 = c1 - d * rc.zc[1];
  const Vec3 p2 = c2 - d * rc.zc[2];
  const double r2 = s.radius * s.radius;
  rc.h.degree = 4;
  rc.h.c = {dot(p0, p0) - r2, 2.0 * dot(p0, p1), dot(p1, p1) + 2.0 * dot(p0, p2), 2.0 * dot(p1, p2), dot(p2, p2), 0, 0};
}

/// Fills rc.us with the candidate parameters; false when no sphere of the sweep meets the ray.
bool collect_candidates(RayCurve& rc) {
  rc.count = 0;
  const auto boundary = poly::real_roots(rc.h, 0.0, 1.0);
  const bool any_feasible = boundary.count > 0 || rc.h(0.0) <= 0.0 || rc.h(1.0) <= 0.0;
  if (!any_feasible) return false;

  rc.us[rc.count++] = 0.0;
  rc.us[rc.count++] = 1.0;
  for (double u : boundary) rc.us[rc.count++] = u;

  // (h'/2)^2 + z'^2 h
  const auto dh = rc.h.derivative();
  const double zp0 = rc.zc[1];
  const double zp1 = 2.0 * rc.zc[2];
  poly::Polynomial g;
  g.degree = 6;
  g.c.fill(0.0);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) g.c[i + j] += 0.25 * dh.c[i] * dh.c[j];
  const double zz[3] = {zp0 * zp0, 2.0 * zp0 * zp1, zp1 * zp1};
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 4; ++j) g.c[i + j] += zz[i] * rc.h.c[j];
  for (double u : poly::real_roots(g, 0.0, 1.0)) rc.us[rc.count++] = u;
  return true;
}

double curve_distance_squared(const QuadBezier& q, const Vec3& p) {
  // |C(u) - p|^2 is a quartic; its minimum over [0,1] is at an end or a derivative root.
  const Vec3 c0 = q.b0 - p;
  const Vec3 c1 = (q.b1 - q.b0) * 2.0;
  const Vec3 c2 = q.b0 - q.b1 * 2.0 + q.b2;
  poly::Polynomial f;
  f.degree = 4;
  f.c = {dot(c0, c0), 2.0 * dot(c0, c1), dot(c1, c1) + 2.0 * dot(c0, c2), 2.0 * dot(c1, c2), dot(c2, c2), 0, 0};
  double best = std::min(f(0.0), f(1.0));
  for (double u : poly::real_roots(f.derivative(), 0.0, 1.0)) best = std::min(best, f(u));
  return std::max(best, 0.0);
}

bool swept_contains(const QuadSwept& s, const Vec3& p) {
  const auto& q = s.curve;
  const Vec3 mid = (q.b0 + q.b1 * 2.0 + q.b2) * 0.25;
  const double bound = std::max({distance(mid, q.b0), distance(mid, q.b1), distance(mid, q.b2)}) + s.radius;
  if (length_squared(p - mid) >= bound * bound) return false;
  return curve_distance_squared(q, p) < s.radius * s.radius;
}

Vec3 swept_normal(const QuadSwept& s, double u, const Vec3& x) {
  const Vec3 n = x - s.curve.at(u);
  const double l = length(n);
  return l > 0.0 ? n / l : Vec3{0, 0, 1};
}

// ---------------------------------------------------------------------------
// Shape-generic crossing queries, all assuming the caller knows which side of the surface
// the ray is on at `lo`.

std::optional<Crossing> entry_after(const Ray& ray, const Shape& shape, double lo, IntersectStats* stats) {
  return std::visit(
      [&](const auto& s) -> std::optional<Crossing> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          const Span sp = sphere_span(ray, s.center, s.radius);
          if (sp.empty() || sp.t0 < lo) return std::nullopt;
          return Crossing{sp.t0, normalized(ray.at(sp.t0) - s.center)};
        } else if constexpr (std::is_same_v<T, RoundedCone>) {
          const ConeFrame f(s);
          const Span sp = f.span(ray);
          if (sp.empty() || sp.t0 < lo) return std::nullopt;
          return Crossing{sp.t0, f.normal_at(ray.at(sp.t0))};
        } else {
          if (stats) stats->quad_tests.fetch_add(1, std::memory_order_relaxed);
          Vec3 center;
          double bound = 0;
          if (bounding_sphere_missed(ray, s, center, bound)) return std::nullopt;
          RayCurve rc;
          build_ray_curve(ray, s, rc);
          if (!collect_candidates(rc)) return std::nullopt;
          double best_t = kInf;
          double best_u = 0.0;
          for (std::size_t i = 0; i < rc.count; ++i) {
            const double u = rc.us[i];
            const double hv = rc.h(u);
            if (hv > 1e-12 * s.radius * s.radius) continue;
            const double t = rc.z(u) - std::sqrt(std::max(0.0, -hv));
            if (std::isnan(t)) {
              if (stats) stats->nonconverged.fetch_add(1, std::memory_order_relaxed);
              continue;
            }
            if (t >= lo && t < best_t) {
              best_t = t;
              best_u = u;
            }
          }
          if (!std::isfinite(best_t)) return std::nullopt;
          const Vec3 x = ray.at(best_t);
          return Crossing{best_t, swept_normal(s, best_u, x)};
        }
      },
      shape);
}

std::optional<Crossing> exit_after(const Ray& ray, const Shape& shape, double lo, IntersectStats* stats) {
  return std::visit(
      [&](const auto& s) -> std::optional<Crossing> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          const Span sp = sphere_span(ray, s.center, s.radius);
          if (sp.empty() || sp.t1 < lo) return std::nullopt;
          return Crossing{sp.t1, normalized(ray.at(sp.t1) - s.center)};
        } else if constexpr (std::is_same_v<T, RoundedCone>) {
          const ConeFrame f(s);
          const Span sp = f.span(ray);
          if (sp.empty() || sp.t1 < lo) return std::nullopt;
          return Crossing{sp.t1, f.normal_at(ray.at(sp.t1))};
        } else {
          if (stats) stats->quad_tests.fetch_add(1, std::memory_order_relaxed);
          RayCurve rc;
          build_ray_curve(ray, s, rc);
          if (!collect_candidates(rc)) return std::nullopt;
          // The exit from the union is the first far endpoint not covered by another sphere.
          std::array<std::pair<double, double>, 16> exits{};
          std::size_t n = 0;
          for (std::size_t i = 0; i < rc.count; ++i) {
            const double u = rc.us[i];
            const double hv = rc.h(u);
            if (hv > 1e-12 * s.radius * s.radius) continue;
            const double t = rc.z(u) + std::sqrt(std::max(0.0, -hv));
            if (t >= lo) exits[n++] = {t, u};
          }
          std::sort(exits.begin(), exits.begin() + static_cast<std::ptrdiff_t>(n));
          const double r2 = s.radius * s.radius;
          for (std::size_t i = 0; i < n; ++i) {
            const Vec3 x = ray.at(exits[i].first);
            if (curve_distance_squared(s.curve, x) >= r2 * (1.0 - 1e-9))
              return Crossing{exits[i].first, swept_normal(s, exits[i].second, x)};
          }
          if (stats) stats->nonconverged.fetch_add(1, std::memory_order_relaxed);
          return std::nullopt;
        }
      },
      shape);
}

Hit make_hit(const Ray& ray, double t, const Vec3& normal, BinIndex bin, HitKind kind) {
  return {t, ray.at(t), normal, bin, kind};
}

std::optional<Hit> clip_impl(const Ray& ray, const Shape& shape, BinIndex bin, std::span<const CuttingPlane> planes,
                             std::uint64_t mask, IntersectStats* stats) {
  // Kept parameter interval [k0, k1] along the ray.
  double k0 = -kInf;
  double k1 = kInf;
  const CuttingPlane* plane0 = nullptr;
  const CuttingPlane* plane1 = nullptr;
  for (std::size_t i = 0; i < planes.size() && mask != 0; ++i) {
    if (!(mask >> i & 1u)) continue;
    const auto& pl = planes[i];
    const double f0 = pl.kept_distance(ray.origin);
    const double fd = pl.keep == KeepSide::positive ? dot(pl.normal, ray.direction) : -dot(pl.normal, ray.direction);
    if (fd == 0.0) {
      if (f0 < 0.0) return std::nullopt;
      continue;
    }
    const double t = -f0 / fd;
    if (fd > 0.0) {
      if (t > k0) {
        k0 = t;
        plane0 = &pl;
      }
    } else if (t < k1) {
      k1 = t;
      plane1 = &pl;
    }
  }
  const double lo = std::max(0.0, k0);
  if (lo > k1) return std::nullopt;

  auto facing = [&](const Vec3& n) { return dot(n, ray.direction) <= 0.0 ? n : -n; };

  if (contains(shape, ray.at(lo))) {
    if (plane0 && k0 >= 0.0) return make_hit(ray, k0, facing(plane0->normal), bin, HitKind::cap);
    const auto ex = exit_after(ray, shape, lo, stats);
    if (ex && ex->t <= k1) return make_hit(ray, ex->t, ex->normal, bin, HitKind::surface);
    if (plane1 && k1 >= lo) return make_hit(ray, k1, facing(plane1->normal), bin, HitKind::cap);
    return std::nullopt;
  }
  const auto en = entry_after(ray, shape, lo, stats);
  if (en && en->t <= k1) return make_hit(ray, en->t, en->normal, bin, HitKind::surface);
  return std::nullopt;
}

}  // namespace

CuttingPlane CuttingPlane::along_axis(Axis axis, double offset, KeepSide keep) {
  CuttingPlane p;
  p.normal = axis == Axis::x ? Vec3{1, 0, 0} : axis == Axis::y ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
  p.offset = offset;
  p.keep = keep;
  p.axis = axis;
  return p;
}

Axis parse_axis(std::string_view s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw InvalidArgument("unknown axis '" + std::string(s) + "'");
}

std::string_view to_string(Axis a) { return a == Axis::x ? "x" : a == Axis::y ? "y" : "z"; }

KeepSide parse_keep_side(std::string_view s) {
  if (s == "positive") return KeepSide::positive;
  if (s == "negative") return KeepSide::negative;
  throw InvalidArgument("unknown keep side '" + std::string(s) + "'");
}

std::string_view to_string(KeepSide k) { return k == KeepSide::positive ? "positive" : "negative"; }

bool contains(const Shape& shape, const Vec3& p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return length_squared(p - s.center) < s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, RoundedCone>) {
          return ConeFrame(s).contains(p);
        } else {
          return swept_contains(s, p);
        }
      },
      shape);
}

std::optional<Hit> intersect_sphere(const Ray& ray, const Sphere& sphere) {
  return clip_impl(ray, sphere, 0, {}, 0, nullptr);
}

std::optional<Hit> intersect_rounded_cone(const Ray& ray, const RoundedCone& cone) {
  return clip_impl(ray, cone, 0, {}, 0, nullptr);
}

std::optional<Hit> intersect_quad_swept(const Ray& ray, const QuadSwept& swept, IntersectStats* stats) {
  return clip_impl(ray, swept, 0, {}, 0, stats);
}

std::optional<Hit> intersect(const Ray& ray, const ScenePrimitive& primitive, IntersectStats* stats) {
  return clip_impl(ray, primitive.shape, primitive.bin_id, {}, 0, stats);
}

std::optional<Hit> clip_hit(const Ray& ray, const ScenePrimitive& primitive, std::span<const CuttingPlane> planes,
                            bool exempt, IntersectStats* stats) {
  if (planes.size() > kMaxCuttingPlanes) throw InvalidArgument("too many cutting planes");
  const std::uint64_t all = planes.size() == 64 ? ~0ULL : ((1ULL << planes.size()) - 1);
  return clip_impl(ray, primitive.shape, primitive.bin_id, planes, exempt ? 0 : all, stats);
}

std::optional<Hit> clip_hit_masked(const Ray& ray, const ScenePrimitive& primitive,
                                   std::span<const CuttingPlane> planes, std::uint64_t plane_mask,
                                   IntersectStats* stats) {
  return clip_impl(ray, primitive.shape, primitive.bin_id, planes, plane_mask, stats);
}

}  // namespace skein
