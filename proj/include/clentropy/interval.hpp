#pragma once

// Outward-rounded interval arithmetic over binary64.
//
// Basic operations use error-free transformations (two-sum, fma residuals)
// to decide the direction of the rounding error, so an endpoint is nudged by
// one ulp only when the floating result is actually inexact. Transcendental
// functions use the platform libm and widen each endpoint by two ulps.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace clentropy {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude fma residuals may themselves be rounded.
inline constexpr double kTiny = 0x1p-960;

inline double next_up(double x) { return std::nextafter(x, kInf); }
inline double next_down(double x) { return std::nextafter(x, -kInf); }

inline double widen_up(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_up(x);
  return x;
}
inline double widen_down(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_down(x);
  return x;
}

// Rounded sum plus the sign of the rounding error (true - computed).
inline int sum_error_sign(double a, double b, double s) {
  if (!std::isfinite(s)) return 0;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return (err > 0) - (err < 0);
}

inline double add_down(double a, double b) {
  double s = a + b;
  if (std::isinf(s) && std::isfinite(a) && std::isfinite(b))
    return s > 0 ? std::numeric_limits<double>::max() : s;
  return sum_error_sign(a, b, s) < 0 ? next_down(s) : s;
}
inline double add_up(double a, double b) {
  double s = a + b;
  if (std::isinf(s) && std::isfinite(a) && std::isfinite(b))
    return s < 0 ? std::numeric_limits<double>::lowest() : s;
  return sum_error_sign(a, b, s) > 0 ? next_up(s) : s;
}

inline int mul_error_sign(double a, double b, double p) {
  double err = std::fma(a, b, -p);
  return (err > 0) - (err < 0);
}

inline double mul_down(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  double p = a * b;
  if (std::isinf(p)) return p > 0 ? std::numeric_limits<double>::max() : p;
  if (std::fabs(p) < kTiny) return next_down(p);
  return mul_error_sign(a, b, p) < 0 ? next_down(p) : p;
}
inline double mul_up(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  double p = a * b;
  if (std::isinf(p)) return p < 0 ? std::numeric_limits<double>::lowest() : p;
  if (std::fabs(p) < kTiny) return next_up(p);
  return mul_error_sign(a, b, p) > 0 ? next_up(p) : p;
}

// sign(a/b - q) via the exact remainder a - q*b.
inline int div_error_sign(double a, double b, double q) {
  double r = std::fma(-q, b, a);
  int sr = (r > 0) - (r < 0);
  return b > 0 ? sr : -sr;
}

inline double div_down(double a, double b) {
  if (a == 0) return 0.0;
  double q = a / b;
  if (std::isinf(q)) return q > 0 ? std::numeric_limits<double>::max() : q;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
  return div_error_sign(a, b, q) < 0 ? next_down(q) : q;
}
inline double div_up(double a, double b) {
  if (a == 0) return 0.0;
  double q = a / b;
  if (std::isinf(q)) return q < 0 ? std::numeric_limits<double>::lowest() : q;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  return div_error_sign(a, b, q) > 0 ? next_up(q) : q;
}

}  // namespace detail

/// Closed interval [lo, hi] of reals with lo <= hi.
class Interval {
 public:
  constexpr Interval() = default;
  explicit Interval(double x) : Interval(x, x) {}
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi)
      throw std::invalid_argument("invalid interval [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double mid() const { return lo_ + 0.5 * (hi_ - lo_); }
  /// Largest absolute value in the interval.
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  /// Smallest absolute value in the interval.
  double mig() const { return contains(0.0) ? 0.0 : std::min(std::fabs(lo_), std::fabs(hi_)); }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool overlaps(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
  bool is_point() const { return lo_ == hi_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& x) {
  auto old = os.precision(17);
  os << '[' << x.lo() << ", " << x.hi() << ']';
  os.precision(old);
  return os;
}

inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

inline Interval operator-(const Interval& a) { return {-a.hi(), -a.lo()}; }

inline Interval operator+(const Interval& a, const Interval& b) {
  return {detail::add_down(a.lo(), b.lo()), detail::add_up(a.hi(), b.hi())};
}

inline Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

inline Interval operator*(const Interval& a, const Interval& b) {
  using namespace detail;
  const double lo = std::min({mul_down(a.lo(), b.lo()), mul_down(a.lo(), b.hi()),
                              mul_down(a.hi(), b.lo()), mul_down(a.hi(), b.hi())});
  const double hi = std::max({mul_up(a.lo(), b.lo()), mul_up(a.lo(), b.hi()),
                              mul_up(a.hi(), b.lo()), mul_up(a.hi(), b.hi())});
  return {lo, hi};
}

inline Interval operator/(const Interval& a, const Interval& b) {
  using namespace detail;
  if (b.contains(0.0)) throw DomainError("interval division by an interval containing zero");
  const double lo = std::min({div_down(a.lo(), b.lo()), div_down(a.lo(), b.hi()),
                              div_down(a.hi(), b.lo()), div_down(a.hi(), b.hi())});
  const double hi = std::max({div_up(a.lo(), b.lo()), div_up(a.lo(), b.hi()),
                              div_up(a.hi(), b.lo()), div_up(a.hi(), b.hi())});
  return {lo, hi};
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }
inline Interval& operator/=(Interval& a, const Interval& b) { return a = a / b; }

inline Interval operator+(const Interval& a, double b) { return a + Interval(b); }
inline Interval operator-(const Interval& a, double b) { return a - Interval(b); }
inline Interval operator*(const Interval& a, double b) { return a * Interval(b); }
inline Interval operator/(const Interval& a, double b) { return a / Interval(b); }
inline Interval operator+(double a, const Interval& b) { return Interval(a) + b; }
inline Interval operator-(double a, const Interval& b) { return Interval(a) - b; }
inline Interval operator*(double a, const Interval& b) { return Interval(a) * b; }
inline Interval operator/(double a, const Interval& b) { return Interval(a) / b; }

/// Integer power by repeated squaring. Even powers of intervals straddling
/// zero are computed on the magnitude range so the lower bound stays >= 0.
inline Interval pow(const Interval& a, long k) {
  if (k < 0) {
    if (a.contains(0.0)) throw DomainError("negative power of an interval containing zero");
    return Interval(1.0) / pow(a, -k);
  }
  Interval base = a;
  if (k % 2 == 0 && a.contains(0.0)) base = Interval(0.0, a.mag());
  Interval result(1.0);
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k > 0) base *= base;
  }
  if (result.lo() < 0 && base.lo() >= 0) result = Interval(0.0, result.hi());
  return result;
}

inline Interval log(const Interval& a) {
  if (!(a.lo() > 0)) throw DomainError("log of an interval with nonpositive lower bound");
  double lo = a.lo() == 1.0 ? 0.0 : detail::widen_down(std::log(a.lo()), 2);
  double hi = a.hi() == 1.0 ? 0.0 : detail::widen_up(std::log(a.hi()), 2);
  return {lo, hi};
}

/// log(1 + x), accurate for small x.
inline Interval log1p(const Interval& a) {
  if (!(a.lo() > -1)) throw DomainError("log1p of an interval reaching -1");
  double lo = a.lo() == 0.0 ? 0.0 : detail::widen_down(std::log1p(a.lo()), 2);
  double hi = a.hi() == 0.0 ? 0.0 : detail::widen_up(std::log1p(a.hi()), 2);
  return {lo, hi};
}

inline Interval exp(const Interval& a) {
  double lo = a.lo() == 0.0 ? 1.0 : std::max(0.0, detail::widen_down(std::exp(a.lo()), 2));
  double hi = a.hi() == 0.0 ? 1.0 : detail::widen_up(std::exp(a.hi()), 2);
  return {lo, hi};
}

inline Interval sqrt(const Interval& a) {
  if (a.lo() < 0) throw DomainError("sqrt of an interval with negative lower bound");
  double lo = std::sqrt(a.lo());
  double hi = std::sqrt(a.hi());
  // sqrt is correctly rounded; verify direction exactly with fma.
  if (std::fma(lo, lo, -a.lo()) > 0) lo = detail::next_down(lo);
  if (std::fma(hi, hi, -a.hi()) < 0) hi = detail::next_up(hi);
  return {std::max(0.0, lo), hi};
}

/// Real power x^y = exp(y log x) for x > 0.
inline Interval pow(const Interval& x, const Interval& y) { return exp(y * log(x)); }

inline Interval abs(const Interval& a) { return {a.mig(), a.mag()}; }

// ---------------------------------------------------------------------------
// Enclosures of exact GMP quantities.

namespace detail {

// x * 2^e with outward handling of overflow and gradual underflow.
inline Interval scale2(const Interval& x, long e) {
  auto down = [e](double v) {
    if (v == 0) return 0.0;
    if (e > std::numeric_limits<int>::max() / 2) return v > 0 ? std::numeric_limits<double>::max() : -kInf;
    if (e < std::numeric_limits<int>::min() / 2) return v > 0 ? 0.0 : -std::numeric_limits<double>::denorm_min();
    double r = std::ldexp(v, static_cast<int>(e));
    if (std::isinf(r)) return r > 0 ? std::numeric_limits<double>::max() : r;
    if (std::fabs(r) < std::numeric_limits<double>::min()) return next_down(r);
    return r;
  };
  auto up = [e](double v) {
    if (v == 0) return 0.0;
    if (e > std::numeric_limits<int>::max() / 2) return v > 0 ? kInf : std::numeric_limits<double>::lowest();
    if (e < std::numeric_limits<int>::min() / 2) return v > 0 ? std::numeric_limits<double>::denorm_min() : 0.0;
    double r = std::ldexp(v, static_cast<int>(e));
    if (std::isinf(r)) return r < 0 ? std::numeric_limits<double>::lowest() : r;
    if (std::fabs(r) < std::numeric_limits<double>::min()) return next_up(r);
    return r;
  };
  double lo = down(x.lo());
  double hi = up(x.hi());
  if (x.lo() > 0) lo = std::max(lo, 0.0);
  return {lo, hi};
}

// |z| = m * 2^e with m enclosed in [0.5, 1].
inline Interval mantissa(const mpz_class& z, long& e) {
  double m = std::fabs(mpz_get_d_2exp(&e, z.get_mpz_t()));
  // mpz_get_d_2exp truncates toward zero; the exact value is below m + 2^-53.
  bool exact = mpz_sizeinbase(z.get_mpz_t(), 2) <= 53;
  return {m, exact ? m : std::min(1.0, m + 0x1p-53)};
}

}  // namespace detail

inline Interval enclose(const mpz_class& z) {
  if (z == 0) return Interval(0.0);
  long e = 0;
  Interval m = detail::mantissa(z, e);
  Interval r = detail::scale2(m, e);
  return sgn(z) < 0 ? -r : r;
}

inline Interval enclose(const mpq_class& q) {
  if (q == 0) return Interval(0.0);
  long en = 0, ed = 0;
  Interval num = detail::mantissa(q.get_num(), en);
  Interval den = detail::mantissa(q.get_den(), ed);
  Interval r = detail::scale2(num / den, en - ed);
  return sgn(q) < 0 ? -r : r;
}

/// Enclosure of 1/z for z != 0, valid far outside the double range of z.
inline Interval enclose_reciprocal(const mpz_class& z) {
  if (z == 0) throw DomainError("reciprocal of zero");
  long e = 0;
  Interval m = detail::mantissa(z, e);
  Interval r = detail::scale2(Interval(1.0) / m, -e);
  return sgn(z) < 0 ? -r : r;
}

/// Enclosure of log(z) for z > 0, valid far outside the double range of z.
inline Interval log_enclosure(const mpz_class& z) {
  if (sgn(z) <= 0) throw DomainError("log of a nonpositive integer");
  if (z == 1) return Interval(0.0);
  long e = 0;
  Interval m = detail::mantissa(z, e);
  static const Interval ln2 = log(Interval(2.0));
  return log(m) + Interval(static_cast<double>(e)) * ln2;
}

inline Interval log_enclosure(const mpq_class& q) {
  return log_enclosure(mpz_class(q.get_num())) - log_enclosure(mpz_class(q.get_den()));
}

/// Interval with its truncation bookkeeping. `value` always encloses the
/// exact quantity; `tail_bound` is the part of its width owed to the omitted
/// levels above `truncation_level`.
struct CertifiedValue {
  Interval value;
  int truncation_level = 0;
  double tail_bound = 0.0;
};

}  // namespace clentropy
