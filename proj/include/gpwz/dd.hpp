#pragma once

#include <cmath>

namespace gpwz {

/// Double-double value: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
/// Only the handful of operations the BVP residual needs; error-free
/// transforms via two_sum / fma-based two_prod.
struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  constexpr dd(double h) : hi(h), lo(0.0) {}
  constexpr dd(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi + lo; }
};

namespace detail {
inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}
inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}
inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}
}  // namespace detail

inline dd operator+(dd a, dd b) {
  dd s = detail::two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}
inline dd operator-(dd a, dd b) { return a + dd{-b.hi, -b.lo}; }
inline dd operator+(dd a, double b) { return a + dd{b}; }
inline dd operator-(dd a, double b) { return a + dd{-b}; }
inline dd operator*(dd a, dd b) {
  dd p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}
inline dd operator*(dd a, double b) {
  dd p = detail::two_prod(a.hi, b);
  p.lo += a.lo * b;
  return detail::quick_two_sum(p.hi, p.lo);
}
inline dd operator*(double a, dd b) { return b * a; }

}  // namespace gpwz
