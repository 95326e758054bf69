#pragma once

// Cohen-Lenstra measures: normalizing constants, per-class masses, Hall
// sums, and certified tail bounds for sums over isomorphism classes.

#include <gmpxx.h>

#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clentropy/groups.hpp"
#include "clentropy/interval.hpp"
#include "clentropy/partitions.hpp"

namespace clentropy {

/// A certified computation could not meet its contract at the permitted
/// truncation depth.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (p, u) identifying nu^u_CL. Integral u >= 0 is the classical case; any
/// real u > -1 is accepted as the extended family.
struct CLParams {
  unsigned p = 2;
  double u = 0.0;

  CLParams() = default;
  CLParams(unsigned p_, double u_) : p(p_), u(u_) {
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
    if (!std::isfinite(u) || !(u > -1.0)) throw std::invalid_argument("unit-rank must be a real number > -1");
  }

  bool is_integral() const { return u >= 0 && u == std::floor(u) && u <= 1e6; }
  long integral_u() const {
    if (!is_integral()) throw std::logic_error("unit-rank is not a nonnegative integer");
    return static_cast<long>(u);
  }
};

inline Interval log_p(unsigned p) { return log(Interval(static_cast<double>(p))); }

/// p^{-x}. Exact rational enclosure for small nonnegative integers x,
/// exp(-x log p) otherwise.
inline Interval pow_p_neg(unsigned p, double x) {
  if (x >= 0 && x == std::floor(x) && x <= 4096)
    return enclose(mpq_class(1, ipow(p, static_cast<unsigned long>(x))));
  return exp(-(Interval(x) * log_p(p)));
}

inline Interval pow_p_neg(unsigned p, const Interval& x) {
  if (x.is_point()) return pow_p_neg(p, x.lo());
  return exp(-(x * log_p(p)));
}

namespace detail {

// Upper bound for sum_{i > J} p^{-u-i} / (1 - p^{-u-i}), which dominates
// -sum_{i > J} log(1 - p^{-u-i}) since -log(1-x) <= x/(1-x).
inline Interval omitted_factor_log_bound(const CLParams& cl, int J) {
  const Interval q = pow_p_neg(cl.p, cl.u + J);
  const Interval q_next = pow_p_neg(cl.p, cl.u + J + 1);
  return q / (Interval(static_cast<double>(cl.p) - 1) * (1.0 - q_next));
}

}  // namespace detail

/// F_u = prod_{i >= 1} (1 - p^{-u-i}) from the first J factors; the omitted
/// factors only lower the partial product, by at most exp(-tail).
inline Interval normalizing_constant(const CLParams& cl, int J) {
  if (J < 1) throw std::invalid_argument("normalizing_constant needs J >= 1");
  Interval prod(1.0);
  for (int i = 1; i <= J; ++i) prod *= 1.0 - pow_p_neg(cl.p, cl.u + i);
  const Interval shrink = exp(-detail::omitted_factor_log_bound(cl, J));
  return {(prod * shrink).lo(), std::min(prod.hi(), 1.0)};
}

/// log F_u summed in log space, accurate to a few ulps even when F_u is
/// within 1e-10 of 1.
inline Interval log_normalizing_constant(const CLParams& cl, int J) {
  if (J < 1) throw std::invalid_argument("log_normalizing_constant needs J >= 1");
  Interval sum(0.0);
  for (int i = 1; i <= J; ++i) sum += log1p(-pow_p_neg(cl.p, cl.u + i));
  const Interval tail = detail::omitted_factor_log_bound(cl, J);
  return {(sum - tail).lo(), std::min(sum.hi(), 0.0)};
}

/// Smallest J with p^{-u-J}/(p-1) < eps/4.
inline int auto_product_depth(const CLParams& cl, double eps) {
  for (int J = 1; J < 100000; ++J)
    if ((pow_p_neg(cl.p, cl.u + J) / static_cast<double>(cl.p - 1)).hi() < eps / 4) return J;
  throw Refusal("no product depth reaches the requested tolerance");
}

/// p^{-u n} = #A^{-u} at order p^n.
inline Interval order_power_neg(const CLParams& cl, int n) {
  if (cl.is_integral()) return pow_p_neg(cl.p, static_cast<double>(cl.integral_u() * n));
  return exp(-(Interval(cl.u) * Interval(static_cast<double>(n)) * log_p(cl.p)));
}

/// nu^u_CL(A) = F_u / (#A^u #Aut A).
inline Interval cl_measure(const CLParams& cl, const AbelianPGroup& a, int J) {
  if (a.p() != cl.p) throw std::invalid_argument("group prime does not match measure prime");
  const Interval f = normalizing_constant(cl, J);
  if (cl.is_integral()) {
    const mpz_class denom = ipow(cl.p, static_cast<unsigned long>(cl.integral_u() * a.exponent())) * aut_order(a);
    return f * enclose_reciprocal(denom);
  }
  return f * order_power_neg(cl, a.exponent()) * enclose_reciprocal(aut_order(a));
}

// ---------------------------------------------------------------------------
// Tail bounds over levels n > N.

/// Level-n majorant count(n) * scale * p^{-decay n} * (offset + slope n),
/// where count(n) counts the classes at level n (partitions of n, optionally
/// with at most `max_parts` parts).
struct LevelMajorant {
  Interval scale{1.0};
  Interval decay{1.0};
  Interval offset{1.0};
  Interval slope{0.0};
  int max_parts = 0;  ///< 0 means unrestricted
};

/// Upper bound on pi(n) is exp(c sqrt n) with c = pi sqrt(2/3) < 2.5651.
inline constexpr double kPartitionGrowth = 2.5651;
/// Levels summed term by term with exact class counts before the geometric
/// closure takes over.
inline constexpr int kTailWindow = 256;

/// Deepest level whose classes are enumerated one by one (pi(64) ~ 1.7e6).
inline constexpr int kMaxEnumeratedLevel = 64;

/// Certified upper bound on sum_{n > N} of the majorant. The first
/// kTailWindow levels use exact class counts; beyond that the terms are
/// dominated by exp(c sqrt n) * (...) and closed as a geometric series.
/// Throws Refusal when the closing ratio is not below 1.
inline double tail_upper_bound(unsigned p, int N, const LevelMajorant& m) {
  const int M = N + kTailWindow;
  const auto counts = m.max_parts > 0 ? partition_counts_at_most(M + 1, m.max_parts) : partition_counts(M + 1);
  const Interval lp = log_p(p);
  auto level = [&](int n) {
    const Interval nn(static_cast<double>(n));
    const Interval poly = m.offset + m.slope * nn;
    if (poly.hi() < 0) return Interval(0.0);
    return m.scale * exp(-(m.decay * nn * lp)) * Interval(0.0, poly.hi());
  };
  Interval sum(0.0);
  for (int n = N + 1; n <= M; ++n) sum += enclose(counts[static_cast<std::size_t>(n)]) * level(n);

  const int n0 = M + 1;
  const Interval poly0 = m.offset + m.slope * Interval(static_cast<double>(n0));
  if (!(poly0.lo() > 0)) throw Refusal("tail majorant is not positive at level " + std::to_string(n0));
  const Interval growth = exp(Interval(kPartitionGrowth) / (2.0 * sqrt(Interval(static_cast<double>(n0)))));
  const Interval ratio = growth * exp(-(m.decay * lp)) * (1.0 + m.slope / poly0);
  if (!(ratio.hi() < 1.0))
    throw Refusal("geometric tail closure fails: ratio bound " + std::to_string(ratio.hi()) + " >= 1 at level " +
                  std::to_string(n0));
  const Interval first = exp(Interval(kPartitionGrowth) * sqrt(Interval(static_cast<double>(n0)))) * level(n0);
  sum += first / (1.0 - Interval(ratio.hi()));
  return sum.hi();
}

// ---------------------------------------------------------------------------
// Per-level sums over isomorphism classes.

/// Sums over the classes of order p^n that do not depend on u.
struct LevelSums {
  int n = 0;
  std::size_t classes = 0;
  Interval inv_aut{0.0};          ///< sum 1/#Aut A
  Interval log_aut_over_aut{0.0};  ///< sum log(#Aut A)/#Aut A
};

inline LevelSums level_sums(unsigned p, int n) {
  LevelSums s;
  s.n = n;
  for_each_partition(n, [&](const std::vector<int>& parts) {
    const mpz_class aut = aut_order(AbelianPGroup(p, Partition(parts)));
    const Interval inv = enclose_reciprocal(aut);
    s.inv_aut += inv;
    s.log_aut_over_aut += log_enclosure(aut) * inv;
    ++s.classes;
  });
  return s;
}

/// Level sums for n = 0..N. Levels may be computed on several threads; each
/// level is reduced in canonical partition order, so the result does not
/// depend on the thread count.
class LevelTable {
 public:
  LevelTable(unsigned p, int N, unsigned threads = 1) : p_(p) {
    if (N < 0) throw std::invalid_argument("LevelTable needs N >= 0");
    levels_.resize(static_cast<std::size_t>(N) + 1);
    if (threads <= 1) {
      for (int n = 0; n <= N; ++n) levels_[static_cast<std::size_t>(n)] = level_sums(p, n);
      return;
    }
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < threads; ++t) {
      jobs.push_back(std::async(std::launch::async, [this, t, threads, N, p] {
        // Strided so the heavy top levels spread across workers.
        for (int n = N - static_cast<int>(t); n >= 0; n -= static_cast<int>(threads))
          levels_[static_cast<std::size_t>(n)] = level_sums(p, n);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  unsigned p() const { return p_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const LevelSums& operator[](int n) const { return levels_.at(static_cast<std::size_t>(n)); }

 private:
  unsigned p_;
  std::vector<LevelSums> levels_;
};

// ---------------------------------------------------------------------------
// Hall's formula and total mass.

struct HallSums {
  mpq_class by_aut;    ///< sum over #A <= p^N of 1/#Aut A
  mpq_class by_order;  ///< sum over #A <= p^N of 1/#A
};

inline HallSums hall_sum_partial(unsigned p, int N) {
  if (N < 0) throw std::invalid_argument("hall_sum_partial needs N >= 0");
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  HallSums s{0, 0};
  const auto counts = partition_counts(N);
  for (int n = 0; n <= N; ++n) {
    for_each_partition(n, [&](const std::vector<int>& parts) {
      s.by_aut += mpq_class(1, aut_order(AbelianPGroup(p, Partition(parts))));
    });
    s.by_order += mpq_class(counts[static_cast<std::size_t>(n)], ipow(p, static_cast<unsigned long>(n)));
  }
  s.by_aut.canonicalize();
  s.by_order.canonicalize();
  return s;
}

/// Upper bounds on the omitted parts of both Hall sums beyond level N:
/// sum 1/#Aut <= sum pi(n) p^{1-n} (automorphism lower bound), and
/// sum 1/#A = sum pi(n) p^{-n}.
inline std::pair<double, double> hall_tail_bounds(unsigned p, int N) {
  LevelMajorant by_aut;
  by_aut.scale = Interval(static_cast<double>(p));
  LevelMajorant by_order;
  return {tail_upper_bound(p, N, by_aut), tail_upper_bound(p, N, by_order)};
}

/// Majorant for the nu^u_CL mass at level n: pi(n) F_u p^{1-(u+1)n}.
inline LevelMajorant mass_majorant(const CLParams& cl, const Interval& f) {
  LevelMajorant m;
  m.scale = Interval(f.hi()) * static_cast<double>(cl.p);
  m.decay = Interval(cl.u) + 1.0;
  return m;
}

/// Total nu^u_CL mass of the classes with #A <= p^N. The returned value
/// also covers the omitted mass, so it must contain 1.
inline CertifiedValue total_mass(const CLParams& cl, int N, int J) {
  if (N < 1) throw std::invalid_argument("total_mass needs N >= 1");
  const Interval f = normalizing_constant(cl, J);
  const LevelTable table(cl.p, N);
  Interval partial(0.0);
  for (int n = 0; n <= N; ++n) partial += order_power_neg(cl, n) * table[n].inv_aut;
  partial *= f;
  const double tail = tail_upper_bound(cl.p, N, mass_majorant(cl, f));
  return {Interval(partial.lo(), detail::add_up(partial.hi(), tail)), N, tail};
}

struct Depth {
  int N = 1;
  int J = 1;
};

/// J from auto_product_depth, N minimal with mass tail < eps/2.
inline Depth auto_depth(const CLParams& cl, double eps, int max_n = kMaxEnumeratedLevel) {
  Depth d;
  d.J = auto_product_depth(cl, eps);
  const Interval f = normalizing_constant(cl, d.J);
  for (int N = 1; N <= max_n; ++N) {
    try {
      if (tail_upper_bound(cl.p, N, mass_majorant(cl, f)) < eps / 2) {
        d.N = N;
        return d;
      }
    } catch (const Refusal&) {
    }
  }
  throw Refusal("no truncation level up to " + std::to_string(max_n) + " meets the tolerance");
}

}  // namespace clentropy
