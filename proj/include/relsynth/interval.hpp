#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace relsynth {

/// Closed real interval [lo, hi] with outward-rounded arithmetic. Operations
/// that are exact in floating point stay exact (no spurious widening), which
/// keeps identity-like dynamics cell-exact after encoding.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }
  double width() const { return hi - lo; }
  double mid() const { return lo + 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool empty() const { return !(lo <= hi); }
  bool is_nan() const { return std::isnan(lo) || std::isnan(hi); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

namespace rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double down(double x) { return std::nextafter(x, -kInf); }
inline double up(double x) { return std::nextafter(x, kInf); }

// TwoSum: s + e == a + b exactly (round-to-nearest, no overflow).
inline double add_down(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double e = (a - (s - bb)) + (b - bb);
  return e < 0 ? down(s) : s;
}
inline double add_up(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double e = (a - (s - bb)) + (b - bb);
  return e > 0 ? up(s) : s;
}
inline double mul_down(double a, double b) {
  double p = a * b;
  return std::fma(a, b, -p) < 0 ? down(p) : p;
}
inline double mul_up(double a, double b) {
  double p = a * b;
  return std::fma(a, b, -p) > 0 ? up(p) : p;
}
// The remainder a - q*b is exact, so its sign tells which side a/b lies on.
inline double div_down(double a, double b) {
  double q = a / b;
  double r = std::fma(-q, b, a);
  bool below = b > 0 ? r < 0 : r > 0;
  return below ? down(q) : q;
}
inline double div_up(double a, double b) {
  double q = a / b;
  double r = std::fma(-q, b, a);
  bool above = b > 0 ? r > 0 : r < 0;
  return above ? up(q) : q;
}

}  // namespace rounding

inline Interval operator+(const Interval& a, const Interval& b) {
  return {rounding::add_down(a.lo, b.lo), rounding::add_up(a.hi, b.hi)};
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

inline Interval operator*(const Interval& a, const Interval& b) {
  using namespace rounding;
  double lo = std::min({mul_down(a.lo, b.lo), mul_down(a.lo, b.hi), mul_down(a.hi, b.lo),
                        mul_down(a.hi, b.hi)});
  double hi = std::max({mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo),
                        mul_up(a.hi, b.hi)});
  return {lo, hi};
}

/// Division by an interval that does not contain zero.
inline Interval operator/(const Interval& a, const Interval& b) {
  using namespace rounding;
  double lo = std::min({div_down(a.lo, b.lo), div_down(a.lo, b.hi), div_down(a.hi, b.lo),
                        div_down(a.hi, b.hi)});
  double hi = std::max({div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo),
                        div_up(a.hi, b.hi)});
  return {lo, hi};
}

namespace detail {

// True if some x0 + k*period (k integer) may lie in [lo, hi]. Errs towards
// true near the endpoints.
inline bool may_contain_periodic(double lo, double hi, double x0, double period) {
  double k = std::ceil((lo - x0) / period - 1e-12);
  double candidate = x0 + k * period;
  return candidate <= hi + 1e-12 * std::max(1.0, std::abs(hi));
}

// libm cos/sin are within one ulp; step two ulps outward and clamp.
inline double widen_down(double x) { return std::max(-1.0, rounding::down(rounding::down(x))); }
inline double widen_up(double x) { return std::min(1.0, rounding::up(rounding::up(x))); }

}  // namespace detail

/// Tight range of cos over [a.lo, a.hi]: endpoint values plus any interior
/// extremum at multiples of pi.
inline Interval cos(const Interval& a) {
  constexpr double pi = std::numbers::pi;
  if (a.lo == a.hi) {
    double c = std::cos(a.lo);
    if (a.lo == 0.0) return {1.0, 1.0};
    return {detail::widen_down(c), detail::widen_up(c)};
  }
  if (a.width() >= 2 * pi) return {-1.0, 1.0};
  double c0 = std::cos(a.lo), c1 = std::cos(a.hi);
  Interval r{detail::widen_down(std::min(c0, c1)), detail::widen_up(std::max(c0, c1))};
  if (detail::may_contain_periodic(a.lo, a.hi, 0.0, 2 * pi)) r.hi = 1.0;
  if (detail::may_contain_periodic(a.lo, a.hi, pi, 2 * pi)) r.lo = -1.0;
  return r;
}

/// Tight range of sin, extrema at pi/2 + k*pi.
inline Interval sin(const Interval& a) {
  constexpr double pi = std::numbers::pi;
  if (a.lo == a.hi) {
    if (a.lo == 0.0) return {0.0, 0.0};
    double s = std::sin(a.lo);
    return {detail::widen_down(s), detail::widen_up(s)};
  }
  if (a.width() >= 2 * pi) return {-1.0, 1.0};
  double s0 = std::sin(a.lo), s1 = std::sin(a.hi);
  Interval r{detail::widen_down(std::min(s0, s1)), detail::widen_up(std::max(s0, s1))};
  if (detail::may_contain_periodic(a.lo, a.hi, pi / 2, 2 * pi)) r.hi = 1.0;
  if (detail::may_contain_periodic(a.lo, a.hi, -pi / 2, 2 * pi)) r.lo = -1.0;
  return r;
}

}  // namespace relsynth
