#pragma once

#include <array>
#include <cstddef>

namespace skein::poly {

inline constexpr std::size_t kMaxDegree = 6;

/// Dense polynomial with ascending coefficients c[0] + c[1] x + ... of degree <= kMaxDegree.
struct Polynomial {
  std::array<double, kMaxDegree + 1> c{};
  int degree = 0;

  double operator()(double x) const {
    double v = c[degree];
    for (int i = degree - 1; i >= 0; --i) v = v * x + c[i];
    return v;
  }
  Polynomial derivative() const;
  /// Drops leading coefficients that are negligible against the largest one.
  Polynomial trimmed() const;
};

/// Roots in ascending order.
struct Roots {
  std::array<double, kMaxDegree + 1> values{};
  std::size_t count = 0;

  void push(double v) { values[count++] = v; }
  const double* begin() const { return values.data(); }
  const double* end() const { return values.data() + count; }
};

/// Real roots inside [lo, hi], found by isolating monotone pieces between the roots of the
/// derivative and bisecting each sign change. Double roots are reported when the polynomial
/// touches zero at a critical point.
Roots real_roots(const Polynomial& p, double lo, double hi);

}  // namespace skein::poly
