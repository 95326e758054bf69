#pragma once

// Cohen-Lenstra zeta functions and relative entropy between CL measures.
//
//   zeta_k(s) = sum_A w_k(A) / #A^s = prod_{i=1}^{k} (1 - p^{-s-i})^{-1}
//
// with w_k(A) = (1/#Aut A) prod_{i=k-r+1}^{k} (1 - p^{-i}) for rank r <= k.

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clentropy/groups.hpp"
#include "clentropy/interval.hpp"
#include "clentropy/measures.hpp"
#include "clentropy/partitions.hpp"

namespace clentropy {

struct ZetaParams {
  unsigned p = 2;
  std::optional<int> k;  ///< nullopt is the k -> infinity limit
  double s = 0.0;

  ZetaParams() = default;
  ZetaParams(unsigned p_, std::optional<int> k_, double s_) : p(p_), k(k_), s(s_) {
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
    if (k && *k < 1) throw std::invalid_argument("zeta level k must be >= 1");
    if (!std::isfinite(s) || !(s > -1.0)) throw std::invalid_argument("zeta needs real s > -1");
  }
};

/// w_k(A), exact. nullopt k gives the limit weight 1/#Aut A.
inline mpq_class w_k_weight(const AbelianPGroup& a, std::optional<int> k) {
  mpq_class w(1, aut_order(a));
  if (!k) return w;
  const int r = rank(a);
  if (r > *k) return 0;
  for (int i = *k - r + 1; i <= *k; ++i) {
    const mpz_class pi = ipow(a.p(), static_cast<unsigned long>(i));
    w *= mpq_class(pi - 1, pi);
  }
  w.canonicalize();
  return w;
}

/// p^{x} for x > 0.
inline Interval pow_p_pos(unsigned p, double x) {
  if (x >= 0 && x == std::floor(x) && x <= 4096) return enclose(ipow(p, static_cast<unsigned long>(x)));
  return exp(Interval(x) * log_p(p));
}

/// Closed product. For infinite k this is 1/F_s with the product cut at J.
inline Interval zeta_product(const ZetaParams& z, int J = 64) {
  if (!z.k) return Interval(1.0) / normalizing_constant(CLParams(z.p, z.s), J);
  Interval prod(1.0);
  for (int i = 1; i <= *z.k; ++i) prod /= 1.0 - pow_p_neg(z.p, z.s + i);
  return prod;
}

/// Truncated group sum over #A <= p^N; the value includes the certified
/// tail sum_{n > N} (classes of rank <= k) * p^{1-n} p^{-sn}.
inline CertifiedValue zeta_sum(const ZetaParams& z, int N) {
  if (N < 0) throw std::invalid_argument("zeta_sum needs N >= 0");
  Interval sum(0.0);
  for (int n = 0; n <= N; ++n) {
    mpq_class level = 0;
    for_each_partition(n, [&](const std::vector<int>& parts) {
      if (z.k && static_cast<int>(parts.size()) > *z.k) return;
      level += w_k_weight(AbelianPGroup(z.p, Partition(parts)), z.k);
    });
    level.canonicalize();
    sum += enclose(level) * pow_p_neg(z.p, Interval(z.s) * Interval(static_cast<double>(n)));
  }
  LevelMajorant m;
  m.scale = Interval(static_cast<double>(z.p));
  m.decay = Interval(z.s) + 1.0;
  m.max_parts = z.k.value_or(0);
  const double tail = tail_upper_bound(z.p, N, m);
  return {Interval(sum.lo(), detail::add_up(sum.hi(), tail)), N, tail};
}

/// sum_{i >= 1} log(p) / (p^{s+i} - 1), first I terms plus the bound
/// log(p) p^{-(s+I)} / ((p-1)(1 - p^{-(s+I+1)})) on the rest.
inline Interval log_derivative_series(unsigned p, double s, int I) {
  const Interval lp = log_p(p);
  Interval sum(0.0);
  for (int i = 1; i <= I; ++i) sum += lp / (pow_p_pos(p, s + i) - 1.0);
  const Interval rest =
      lp * pow_p_neg(p, s + I) / (Interval(static_cast<double>(p - 1)) * (1.0 - pow_p_neg(p, s + I + 1)));
  return {sum.lo(), detail::add_up(sum.hi(), rest.hi())};
}

/// d/ds zeta_k(s) = zeta_k(s) * (-sum_{i=1}^{k} log p / (p^{s+i} - 1)).
inline Interval zeta_log_derivative(const ZetaParams& z, int J = 64) {
  if (!z.k) return -(zeta_product(z, J) * log_derivative_series(z.p, z.s, J));
  const Interval lp = log_p(z.p);
  Interval sum(0.0);
  for (int i = 1; i <= *z.k; ++i) sum += lp / (pow_p_pos(z.p, z.s + i) - 1.0);
  return -(zeta_product(z) * sum);
}

// ---------------------------------------------------------------------------
// Relative entropy D_KL(nu^{u1} || nu^{u2}).

/// log(F_{u1}/F_{u2}) + (u2 - u1) sum_{i >= 1} log p / (p^{u1+i} - 1).
inline CertifiedValue kl_closed(unsigned p, double u1, double u2, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("kl tolerance must be positive");
  const CLParams c1(p, u1), c2(p, u2);
  const int J = std::max(auto_product_depth(c1, tol / 4), auto_product_depth(c2, tol / 4));
  const double du = u2 - u1;
  int I = 1;
  // series tail is below log(p) p^{1-u1-I}/(p-1)^2
  while (std::fabs(du) * (log_p(p) * pow_p_neg(p, u1 + I - 1) / double((p - 1) * (p - 1))).hi() >= tol / 4) ++I;
  const Interval log_ratio = log_normalizing_constant(c1, J) - log_normalizing_constant(c2, J);
  const Interval series = log_derivative_series(p, u1, I);
  const double series_rest =
      (Interval(std::fabs(du)) * log_p(p) * pow_p_neg(p, u1 + I - 1) / double((p - 1) * (p - 1))).hi();
  const double tail = detail::add_up(series_rest, detail::add_up(detail::omitted_factor_log_bound(c1, J).hi(),
                                                                 detail::omitted_factor_log_bound(c2, J).hi()));
  return {log_ratio + Interval(du) * series, I, tail};
}

/// Direct sum of nu1(A) log(nu1(A)/nu2(A)) over #A <= p^N, grouped by level
/// (the log ratio depends on A only through #A), with a two-sided tail.
inline CertifiedValue kl_direct(unsigned p, double u1, double u2, int N, int J) {
  const CLParams c1(p, u1), c2(p, u2);
  const Interval f1 = normalizing_constant(c1, J);
  const Interval log_ratio_f = log_normalizing_constant(c1, J) - log_normalizing_constant(c2, J);
  const Interval lp = log_p(p);
  const LevelTable table(p, N);
  Interval sum(0.0);
  for (int n = 0; n <= N; ++n) {
    const Interval level_mass = f1 * order_power_neg(c1, n) * table[n].inv_aut;
    const Interval log_ratio = log_ratio_f + Interval(u2 - u1) * Interval(static_cast<double>(n)) * lp;
    sum += level_mass * log_ratio;
  }
  LevelMajorant m = mass_majorant(c1, f1);
  m.offset = Interval(abs(log_ratio_f).hi());
  m.slope = Interval(std::fabs(u2 - u1)) * lp;
  const double tail = m.offset.hi() == 0 && m.slope.hi() == 0 ? 0.0 : tail_upper_bound(p, N, m);
  return {Interval(detail::add_down(sum.lo(), -tail), detail::add_up(sum.hi(), tail)), N, tail};
}

/// kl_direct with N and J chosen so the enclosure is narrower than tol.
inline CertifiedValue kl_direct(unsigned p, double u1, double u2, double tol) {
  const CLParams c1(p, u1);
  const int J = std::max(auto_product_depth(c1, tol / 8), auto_product_depth(CLParams(p, u2), tol / 8));
  const Interval f1 = normalizing_constant(c1, J);
  const Interval log_ratio_f =
      log_normalizing_constant(c1, J) - log_normalizing_constant(CLParams(p, u2), J);
  LevelMajorant m = mass_majorant(c1, f1);
  m.offset = Interval(abs(log_ratio_f).hi());
  m.slope = Interval(std::fabs(u2 - u1)) * log_p(p);
  for (int N = 1; N <= kMaxEnumeratedLevel; ++N) {
    try {
      if ((m.offset.hi() == 0 && m.slope.hi() == 0) || tail_upper_bound(p, N, m) < tol / 4)
        return kl_direct(p, u1, u2, N, J);
    } catch (const Refusal&) {
    }
  }
  throw Refusal("kl_direct tail does not close below tolerance by level " + std::to_string(kMaxEnumeratedLevel));
}

struct LimitReport {
  bool ok = false;
  int k_reached = 0;
  Interval lhs{0.0};  ///< -d/ds zeta_k at s = u1 for the last k tried
  Interval rhs{0.0};  ///< (1/F_{u1}) sum_i log p / (p^{u1+i} - 1)
};

/// Checks that -zeta_k'(u1) approaches (1/F_{u1}) sum_i log p/(p^{u1+i}-1)
/// to within tol for some k <= k_max.
inline LimitReport limit_derivative_identity(unsigned p, double u1, double tol, int k_max = 200) {
  const CLParams cl(p, u1);
  const int J = auto_product_depth(cl, tol / 16) + 8;
  LimitReport r;
  r.rhs = log_derivative_series(p, u1, J) / normalizing_constant(cl, J);
  for (int k = 1; k <= k_max; ++k) {
    r.k_reached = k;
    r.lhs = -zeta_log_derivative(ZetaParams(p, k, u1));
    const double gap = std::max(std::fabs(r.lhs.hi() - r.rhs.lo()), std::fabs(r.rhs.hi() - r.lhs.lo()));
    if (gap <= tol) {
      r.ok = true;
      return r;
    }
  }
  return r;
}

}  // namespace clentropy
