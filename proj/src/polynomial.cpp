#include "skein/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace skein::poly {

namespace {

constexpr double kNegligible = 1e-13;

/// Root of a polynomial known to change sign on [a, b] (fa, fb of opposite signs).
double refine(const Polynomial& p, double a, double b, double fa) {
  // Illinois regula falsi; falls back to bisection when a step stalls.
  double fb = p(b);
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    double x = (a * fb - b * fa) / (fb - fa);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double fx = p(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (b - a <= 1e-15 * std::max(1.0, std::abs(a))) break;
  }
  return 0.5 * (a + b);
}

void quadratic_roots(double c0, double c1, double c2, double lo, double hi, Roots& out) {
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (c1 + std::copysign(s, c1));
  double r0 = q / c2;
  double r1 = q != 0.0 ? c0 / q : r0;
  if (r0 > r1) std::swap(r0, r1);
  if (r0 >= lo && r0 <= hi) out.push(r0);
  if (r1 >= lo && r1 <= hi && r1 != r0) out.push(r1);
}

}  // namespace

Polynomial Polynomial::derivative() const {
  Polynomial d;
  d.degree = std::max(degree - 1, 0);
  for (int i = 1; i <= degree; ++i) d.c[i - 1] = c[i] * i;
  if (degree == 0) d.c[0] = 0.0;
  return d;
}

Polynomial Polynomial::trimmed() const {
  double scale = 0.0;
  for (int i = 0; i <= degree; ++i) scale = std::max(scale, std::abs(c[i]));
  Polynomial t = *this;
  while (t.degree > 0 && std::abs(t.c[t.degree]) <= kNegligible * scale) --t.degree;
  return t;
}

Roots real_roots(const Polynomial& input, double lo, double hi) {
  Roots out;
  const Polynomial p = input.trimmed();
  switch (p.degree) {
    case 0:
      return out;
    case 1: {
      const double r = -p.c[0] / p.c[1];
      if (r >= lo && r <= hi) out.push(r);
      return out;
    }
    case 2:
      quadratic_roots(p.c[0], p.c[1], p.c[2], lo, hi, out);
      return out;
    default:
      break;
  }

  const Roots crit = real_roots(p.derivative(), lo, hi);
  std::array<double, kMaxDegree + 1> knots{};
  std::size_t n = 0;
  knots[n++] = lo;
  for (double c : crit)
    if (c > lo && c < hi) knots[n++] = c;
  knots[n++] = hi;

  double scale = 0.0;
  for (int i = 0; i <= p.degree; ++i) scale = std::max(scale, std::abs(p.c[i]));
  const double touch = 1e-14 * scale;

  double fa = p(knots[0]);
  if (fa == 0.0) out.push(knots[0]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const double fb = p(b);
    if (fb == 0.0) {
      if (out.count == 0 || out.values[out.count - 1] != b) out.push(b);
    } else if (fa != 0.0 && (fa > 0) != (fb > 0)) {
      out.push(refine(p, a, b, fa));
    } else if (k + 2 < n && std::abs(fb) <= touch) {
      // Interior critical point grazing zero: a double root.
      out.push(b);
    }
    fa = fb;
  }
  return out;
}

}  // namespace skein::poly
