#pragma once

// Certified Shannon entropy of nu^u_CL and the machinery behind its
// monotonicity in u: the per-class decreasing inequality, its exceptional
// classes, the margins that absorb them, and the large-u upper bound.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "clentropy/groups.hpp"
#include "clentropy/interval.hpp"
#include "clentropy/measures.hpp"
#include "clentropy/partitions.hpp"

namespace clentropy {

/// H = -log F_u + F_u * sum_{A != 1} log(x_A)/x_A with x_A = #A^u #Aut A.
struct EntropyResult {
  CLParams params;
  CertifiedValue H;
  Interval minus_log_Fu;
  CertifiedValue weighted_sum;  ///< F_u * sum_{A != 1} log(x_A)/x_A, tail included
};

/// Any per-class mass below this is on the increasing branch of -x log x.
inline constexpr double kBelowInverseE = 0.3678;

/// Majorant for sum_{n > N} sum_{#A = p^n} -nu(A) log nu(A), using
/// nu(A) <= F_u p^{1-(u+1)n} and monotonicity of -x log x below 1/e.
inline LevelMajorant entropy_majorant(const CLParams& cl, const Interval& f) {
  LevelMajorant m;
  const Interval lp = log_p(cl.p);
  m.scale = Interval(f.hi()) * static_cast<double>(cl.p);
  m.decay = Interval(cl.u) + 1.0;
  m.offset = -log(Interval(f.hi())) - lp;
  m.slope = m.decay * lp;
  return m;
}

/// Throws Refusal unless every class above level N has mass < 1/e.
inline void require_small_classes(const CLParams& cl, const Interval& f, int N) {
  const Interval largest = Interval(f.hi()) * static_cast<double>(cl.p) *
                           pow_p_neg(cl.p, (Interval(cl.u) + 1.0) * Interval(static_cast<double>(N + 1)));
  if (!(largest.hi() < kBelowInverseE))
    throw Refusal("class masses above level " + std::to_string(N) + " are not below 1/e");
}

/// Entropy tail bound past level N.
inline double entropy_tail_bound(const CLParams& cl, const Interval& f, int N) {
  require_small_classes(cl, f, N);
  return tail_upper_bound(cl.p, N, entropy_majorant(cl, f));
}

/// Entropy from the level sums at depth N with the product truncated at J.
inline EntropyResult entropy_at_depth(const CLParams& cl, const LevelTable& table, int N, int J) {
  if (N > table.depth()) throw std::invalid_argument("level table too shallow");
  const Interval f = normalizing_constant(cl, J);
  const Interval log_f = log_normalizing_constant(cl, J);
  const Interval lp = log_p(cl.p);
  Interval w(0.0);
  for (int n = 1; n <= N; ++n) {
    const Interval un_log_p = Interval(cl.u) * Interval(static_cast<double>(n)) * lp;
    w += order_power_neg(cl, n) * (un_log_p * table[n].inv_aut + table[n].log_aut_over_aut);
  }
  const double tail = entropy_tail_bound(cl, f, N);
  const Interval fw = f * w;
  EntropyResult r;
  r.params = cl;
  r.minus_log_Fu = -log_f;
  r.weighted_sum = {Interval(std::max(0.0, fw.lo()), detail::add_up(fw.hi(), tail)), N, tail};
  const Interval h = r.minus_log_Fu + r.weighted_sum.value;
  // Entropy is nonnegative.
  r.H = {Interval(std::max(h.lo(), 0.0), std::max(h.hi(), 0.0)), N, tail};
  return r;
}

/// Certified entropy with enclosure width <= eps.
inline EntropyResult entropy(const CLParams& cl, double eps, unsigned threads = 1,
                             int max_n = kMaxEnumeratedLevel) {
  if (!(eps > 0)) throw std::invalid_argument("entropy tolerance must be positive");
  int J = auto_product_depth(cl, eps / 8);
  const Interval f = normalizing_constant(cl, J);
  const int min_n = 2 + static_cast<int>(std::ceil(1.0 / (cl.u + 1.0)));
  int N = min_n;
  for (;; ++N) {
    if (N > max_n) throw Refusal("entropy tail does not close below eps by level " + std::to_string(max_n));
    try {
      if (entropy_tail_bound(cl, f, N) < eps / 2) break;
    } catch (const Refusal&) {
    }
  }
  LevelTable table(cl.p, N, threads);
  for (int attempt = 0; attempt < 8; ++attempt) {
    EntropyResult r = entropy_at_depth(cl, table, N, J);
    if (r.H.value.width() <= eps) return r;
    J += 8;
  }
  throw Refusal("entropy enclosure wider than eps after refinement");
}

/// Independent route: -sum nu log nu over every class with #A <= p^N,
/// each nu computed on its own, plus the same certified tail.
inline CertifiedValue entropy_direct(const CLParams& cl, int N, int J) {
  const Interval f = normalizing_constant(cl, J);
  const Interval log_f = log_normalizing_constant(cl, J);
  const Interval lp = log_p(cl.p);
  Interval sum(0.0);
  for (int n = 0; n <= N; ++n) {
    const Interval un_log_p = Interval(cl.u) * Interval(static_cast<double>(n)) * lp;
    const Interval scale = f * order_power_neg(cl, n);
    for_each_partition(n, [&](const std::vector<int>& parts) {
      const mpz_class aut = aut_order(AbelianPGroup(cl.p, Partition(parts)));
      const Interval nu = scale * enclose_reciprocal(aut);
      const Interval log_nu = log_f - un_log_p - log_enclosure(aut);
      sum += -(nu * log_nu);
    });
  }
  const double tail = entropy_tail_bound(cl, f, N);
  return {Interval(sum.lo(), detail::add_up(sum.hi(), tail)), N, tail};
}

/// Large-u upper bound on H:
///   sum_k (1/k) / ((p^k - 1) p^{ku}) + u F_u p^{1-u} sum_{A != 1} 1/#Aut A
///     + F_u p^{1-u} sum_{A != 1} 1/#A,
/// with the Hall sums truncated at N plus their tails and the k-series at J.
inline Interval entropy_upper_bound_III(const CLParams& cl, int N, int J) {
  if (cl.u < 2) throw std::invalid_argument("the large-u entropy bound needs u >= 2");
  const unsigned p = cl.p;
  Interval series(0.0);
  for (int k = 1; k <= J; ++k) {
    const Interval pk_minus_1 = enclose(mpz_class(ipow(p, static_cast<unsigned long>(k)) - 1));
    series += pow_p_neg(p, Interval(cl.u) * Interval(static_cast<double>(k))) /
              (Interval(static_cast<double>(k)) * pk_minus_1);
  }
  // k > J: (1/k)/((p^k-1)p^{ku}) <= (1/(J+1)) (p/(p-1)) p^{-k(u+1)}
  const Interval q = pow_p_neg(p, Interval(cl.u) + 1.0);
  const Interval series_tail = Interval(static_cast<double>(p)) / Interval(static_cast<double>(p - 1)) /
                               Interval(static_cast<double>(J + 1)) *
                               pow_p_neg(p, (Interval(cl.u) + 1.0) * Interval(static_cast<double>(J + 1))) / (1.0 - q);
  series = Interval(series.lo(), detail::add_up(series.hi(), series_tail.hi()));

  const HallSums hall = hall_sum_partial(p, N);
  const auto [aut_tail, ord_tail] = hall_tail_bounds(p, N);
  const Interval by_aut = enclose(mpq_class(hall.by_aut - 1)) + Interval(0.0, aut_tail);
  const Interval by_order = enclose(mpq_class(hall.by_order - 1)) + Interval(0.0, ord_tail);
  const Interval f = normalizing_constant(cl, J);
  const Interval shrink = f * pow_p_neg(p, Interval(cl.u) - 1.0);
  return series + Interval(cl.u) * shrink * by_aut + shrink * by_order;
}

// ---------------------------------------------------------------------------
// Per-class decreasing inequality.

namespace detail {

/// Decides base1^exp1 <= base2^exp2 for positive integers. Certified log
/// enclosures settle almost every case; near-ties fall back to exact powers.
inline bool power_le(const mpz_class& base1, const mpz_class& exp1, const mpz_class& base2, const mpz_class& exp2) {
  if (base1 == 1 || exp1 == 0) return true;
  if (base2 == 1 || exp2 == 0) return false;
  const Interval lhs = enclose(exp1) * log_enclosure(base1);
  const Interval rhs = enclose(exp2) * log_enclosure(base2);
  if (lhs.hi() < rhs.lo()) return true;
  if (lhs.lo() > rhs.hi()) return false;
  const double bits = exp1.get_d() * static_cast<double>(mpz_sizeinbase(base1.get_mpz_t(), 2)) +
                      exp2.get_d() * static_cast<double>(mpz_sizeinbase(base2.get_mpz_t(), 2));
  if (!exp1.fits_ulong_p() || !exp2.fits_ulong_p() || bits > 1e9)
    throw std::runtime_error("power comparison too large to settle exactly");
  mpz_class a, b;
  mpz_pow_ui(a.get_mpz_t(), base1.get_mpz_t(), exp1.get_ui());
  mpz_pow_ui(b.get_mpz_t(), base2.get_mpz_t(), exp2.get_ui());
  return a <= b;
}

}  // namespace detail

/// #A^{u+1} #Aut A <= (#A^u #Aut A)^{(1 - p^{-(u+1)}) #A}, decided exactly.
/// With #A = p^n the rational exponent is cleared by raising both sides to
/// p^{u+1} / gcd.
inline bool check_decreasing_inequality(unsigned p, long u, const AbelianPGroup& a) {
  if (a.is_trivial()) throw std::invalid_argument("decreasing inequality concerns nontrivial groups");
  if (u < 0) throw std::invalid_argument("decreasing inequality needs integral u >= 0");
  if (a.p() != p) throw std::invalid_argument("group prime does not match");
  const long n = a.exponent();
  const mpz_class order = group_order(a);
  const mpz_class aut = aut_order(a);
  const mpz_class x = ipow(p, static_cast<unsigned long>(u * n)) * aut;
  const mpz_class lhs_base = x * order;
  const long common = std::min(u + 1, n);
  const mpz_class lhs_exp = ipow(p, static_cast<unsigned long>(u + 1 - common));
  const mpz_class rhs_exp = (ipow(p, static_cast<unsigned long>(u + 1)) - 1) * ipow(p, static_cast<unsigned long>(n - common));
  return detail::power_le(lhs_base, lhs_exp, x, rhs_exp);
}

/// The u = 0 case divided through by #Aut A: #A <= #Aut A^{#A - 1 - #A/p}.
inline bool check_reduced_u0_inequality(const AbelianPGroup& a) {
  if (a.is_trivial()) throw std::invalid_argument("reduced inequality concerns nontrivial groups");
  const mpz_class order = group_order(a);
  const mpz_class e = order - 1 - order / a.p();
  return detail::power_le(order, 1, aut_order(a), e);
}

struct ExceptionCase {
  unsigned p;
  long u;
  Partition type;
  friend bool operator==(const ExceptionCase&, const ExceptionCase&) = default;
};

inline std::vector<unsigned> primes_up_to(unsigned p_max) {
  std::vector<unsigned> out;
  for (unsigned q = 2; q <= p_max; ++q)
    if (is_prime(q)) out.push_back(q);
  return out;
}

/// Every (p, u, A) with p <= p_max, 1 <= log_p #A <= n_max, u <= u_max that
/// violates the decreasing inequality, ordered by p, u, #A, then canonical
/// partition order. Primes are scanned concurrently and merged in order.
inline std::vector<ExceptionCase> scan_exceptions(unsigned p_max, int n_max, long u_max, unsigned threads = 1) {
  const auto primes = primes_up_to(p_max);
  auto scan_prime = [n_max, u_max](unsigned p) {
    std::vector<ExceptionCase> found;
    for (long u = 0; u <= u_max; ++u)
      for (int n = 1; n <= n_max; ++n)
        for (const auto& g : groups_of_order(p, n))
          if (!check_decreasing_inequality(p, u, g)) found.push_back({p, u, g.type()});
    return found;
  };
  std::vector<std::vector<ExceptionCase>> per_prime(primes.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < primes.size(); ++i) per_prime[i] = scan_prime(primes[i]);
  } else {
    std::vector<std::future<std::vector<ExceptionCase>>> jobs;
    for (unsigned q : primes) jobs.push_back(std::async(std::launch::async, scan_prime, q));
    for (std::size_t i = 0; i < jobs.size(); ++i) per_prime[i] = jobs[i].get();
  }
  std::vector<ExceptionCase> out;
  for (auto& v : per_prime) out.insert(out.end(), v.begin(), v.end());
  return out;
}

/// F * log(x) / x for a positive integer x.
inline Interval log_over(const Interval& f, long x) {
  const Interval xi(static_cast<double>(x));
  return f * log(xi) / xi;
}

/// Lower bounds on H(u) - H(u+1) restricted to the exceptional classes, which
/// must stay positive for the monotonicity argument:
///   [0] p = 2, Z/2 and Z/4, u = 0 -> 1
///   [1] p = 2, Z/2, u = 1 -> 2
///   [2] p = 3, Z/3, u = 0 -> 1
/// Each is (-log F_u + F_u sum log(x)/x) - (-log F_{u+1} + F_{u+1} sum ...).
inline std::array<Interval, 3> exceptional_margins(int J = 64) {
  auto f = [J](unsigned p, long u) { return normalizing_constant(CLParams(p, static_cast<double>(u)), J); };
  auto log_f = [J](unsigned p, long u) { return log_normalizing_constant(CLParams(p, static_cast<double>(u)), J); };
  // #Aut: Z/2 -> 1, Z/4 -> 2, Z/3 -> 2
  const Interval first = (log_f(2, 1) - log_f(2, 0)) + log_over(f(2, 0), 1) + log_over(f(2, 0), 2) -
                         log_over(f(2, 1), 2 * 1) - log_over(f(2, 1), 4 * 2);
  const Interval second = (log_f(2, 2) - log_f(2, 1)) + log_over(f(2, 1), 2 * 1) - log_over(f(2, 2), 4 * 1);
  const Interval third = (log_f(3, 1) - log_f(3, 0)) + log_over(f(3, 0), 2) - log_over(f(3, 1), 3 * 2);
  return {first, second, third};
}

}  // namespace clentropy
