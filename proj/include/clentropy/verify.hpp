#pragma once

// Verification suites that re-check every numerical claim end to end:
// automorphism lower bounds, the exceptional classes of the decreasing
// inequality and their margins, strict monotonicity of the entropy, Hall's
// identity, and the two forms of the zeta function.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "clentropy/entropy.hpp"
#include "clentropy/groups.hpp"
#include "clentropy/measures.hpp"
#include "clentropy/report.hpp"
#include "clentropy/zeta.hpp"

namespace clentropy::verify {

struct Bounds {
  unsigned p_max = 0;  ///< 0 selects the suite's default
  int n_max = 0;
  long u_max = -1;
  unsigned threads = 1;
};

inline std::vector<unsigned> primes_or_default(const Bounds& b, std::vector<unsigned> fallback) {
  if (b.p_max == 0) return fallback;
  return primes_up_to(b.p_max);
}

/// #Aut A >= #A (1 - 1/p) for A != 1, and #Aut A >= #A at rank >= 2.
inline report::SuiteReport lemma1(const Bounds& b = {}) {
  report::SuiteReport r{"lemma1", true, 0, {}, {}};
  const int n_max = b.n_max > 0 ? b.n_max : 12;
  for (unsigned p : primes_or_default(b, {2, 3, 5, 7})) {
    for (int n = 1; n <= n_max; ++n) {
      for (const auto& g : groups_of_order(p, n)) {
        ++r.checked;
        if (!lemma1_holds(g).holds()) r.counterexamples.push_back("p=" + std::to_string(p) + " " + g.type().to_string());
      }
    }
  }
  r.passed = r.counterexamples.empty();
  r.details = {{"n_max", std::to_string(n_max)}};
  return r;
}

/// The four classes where the per-term decreasing inequality fails.
inline std::vector<ExceptionCase> expected_exceptions() {
  return {{2, 0, Partition{1}}, {2, 0, Partition{2}}, {2, 1, Partition{1}}, {3, 0, Partition{1}}};
}

inline report::SuiteReport exceptions(const Bounds& b = {}) {
  const unsigned p_max = b.p_max > 0 ? b.p_max : 7;
  const int n_max = b.n_max > 0 ? b.n_max : 8;
  const long u_max = b.u_max >= 0 ? b.u_max : 5;
  const auto found = scan_exceptions(p_max, n_max, u_max, b.threads);
  std::vector<ExceptionCase> expected;
  for (const auto& e : expected_exceptions())
    if (e.p <= p_max && e.u <= u_max && e.type.size() <= n_max) expected.push_back(e);
  report::SuiteReport r{"exceptions", found == expected, 0, {}, {}};
  for (unsigned p : primes_up_to(p_max))
    for (int n = 1; n <= n_max; ++n) r.checked += static_cast<long>(groups_of_order(p, n).size()) * (u_max + 1);
  auto label = [](const ExceptionCase& e) {
    return "p=" + std::to_string(e.p) + " u=" + std::to_string(e.u) + " " + e.type.to_string();
  };
  auto contains = [](const std::vector<ExceptionCase>& v, const ExceptionCase& e) {
    return std::find(v.begin(), v.end(), e) != v.end();
  };
  std::string cases;
  for (const auto& e : found) {
    cases += (cases.empty() ? "" : " | ") + label(e);
    if (!contains(expected, e)) r.counterexamples.push_back("unexpected " + label(e));
  }
  for (const auto& e : expected)
    if (!contains(found, e)) r.counterexamples.push_back("missing " + label(e));
  r.details = {{"p_max", std::to_string(p_max)}, {"n_max", std::to_string(n_max)},
               {"u_max", std::to_string(u_max)}, {"found", std::to_string(found.size())},
               {"expected", std::to_string(expected.size())}, {"cases", cases}};
  return r;
}

inline constexpr std::array<double, 3> kMarginFloors = {0.44, 0.21, 0.34};

inline report::SuiteReport margins(const Bounds& = {}) {
  const auto m = exceptional_margins();
  report::SuiteReport r{"margins", true, 3, {}, {}};
  const char* names[] = {"z2_z4_u0", "z2_u1", "z3_u0"};
  for (std::size_t i = 0; i < m.size(); ++i) {
    r.details.emplace_back(std::string(names[i]) + "_lo", report::format_double(m[i].lo()));
    if (!(m[i].lo() >= kMarginFloors[i])) {
      r.passed = false;
      r.counterexamples.push_back(std::string(names[i]) + " below " + report::format_double(kMarginFloors[i]));
    }
  }
  return r;
}

/// Certified strict separation H(u) > H(u+1), shrinking eps from 1e-6
/// until the enclosures separate or eps drops below 1e-10.
inline bool entropy_separates(unsigned p, long u, unsigned threads, double* eps_used = nullptr) {
  for (double eps = 1e-6; eps >= 1e-10; eps /= 10) {
    const auto a = entropy(CLParams(p, static_cast<double>(u)), eps, threads);
    const auto b = entropy(CLParams(p, static_cast<double>(u + 1)), eps, threads);
    if (a.H.value.lo() > b.H.value.hi()) {
      if (eps_used) *eps_used = eps;
      return true;
    }
  }
  return false;
}

inline report::SuiteReport monotone(const Bounds& b = {}) {
  const long u_max = b.u_max >= 0 ? b.u_max : 8;
  report::SuiteReport r{"monotone", true, 0, {}, {}};
  double smallest_eps = 1e-6;
  for (unsigned p : primes_or_default(b, {2, 3, 5})) {
    for (long u = 0; u <= u_max; ++u) {
      ++r.checked;
      double eps = 0;
      if (!entropy_separates(p, u, b.threads, &eps)) {
        r.passed = false;
        r.counterexamples.push_back("p=" + std::to_string(p) + " u=" + std::to_string(u));
      } else {
        smallest_eps = std::min(smallest_eps, eps);
      }
    }
  }
  r.details = {{"u_max", std::to_string(u_max)}, {"smallest_eps", report::format_double(smallest_eps)}};
  return r;
}

/// Both partial Hall sums at level N sit within the certified tail below
/// 1/F_0 and increase with N.
inline report::SuiteReport hall(const Bounds& b = {}) {
  const int N = b.n_max > 0 ? b.n_max : 25;
  report::SuiteReport r{"hall", true, 0, {}, {}};
  for (unsigned p : primes_or_default(b, {2, 3})) {
    const Interval limit = Interval(1.0) / normalizing_constant(CLParams(p, 0), 64);
    const auto [aut_tail, ord_tail] = hall_tail_bounds(p, N);
    const HallSums s = hall_sum_partial(p, N);
    const HallSums prev = hall_sum_partial(p, N - 1);
    const Interval by_aut = enclose(s.by_aut);
    const Interval by_order = enclose(s.by_order);
    const bool ok = by_aut.hi() <= limit.hi() && by_aut.lo() + aut_tail >= limit.lo() &&
                    by_order.hi() <= limit.hi() && by_order.lo() + ord_tail >= limit.lo() &&
                    prev.by_aut < s.by_aut && prev.by_order < s.by_order;
    r.checked += 2;
    if (!ok) {
      r.passed = false;
      r.counterexamples.push_back("p=" + std::to_string(p));
    }
    const std::string tag = "p" + std::to_string(p);
    r.details.emplace_back(tag + "_by_aut", report::format_double(by_aut.mid()));
    r.details.emplace_back(tag + "_by_order", report::format_double(by_order.mid()));
    r.details.emplace_back(tag + "_limit", report::format_double(limit.mid()));
  }
  r.details.emplace_back("N", std::to_string(N));
  return r;
}

/// Central difference (zeta(s+h) - zeta(s-h)) / 2h on the product form.
inline double finite_difference(const ZetaParams& z, double h = 1e-6) {
  const double up = zeta_product(ZetaParams(z.p, z.k, z.s + h)).mid();
  const double down = zeta_product(ZetaParams(z.p, z.k, z.s - h)).mid();
  return (up - down) / (2 * h);
}

/// Fixed sample of derivative check points.
inline std::vector<ZetaParams> derivative_sample() {
  const unsigned ps[] = {2, 3, 5, 7, 11};
  const int ks[] = {1, 2, 4, 7};
  std::vector<ZetaParams> out;
  for (int i = 0; i < 20; ++i) out.emplace_back(ps[i % 5], ks[i % 4], -0.75 + 0.21 * i);
  return out;
}

inline report::SuiteReport zeta(const Bounds& b = {}) {
  const int N = b.n_max > 0 ? b.n_max : 30;
  report::SuiteReport r{"zeta", true, 0, {}, {}};
  for (unsigned p : primes_or_default(b, {2, 3}))
    for (int k : {1, 2, 3, 5})
      for (double s : {-0.5, 0.0, 1.0, 2.0}) {
        ++r.checked;
        const ZetaParams z(p, k, s);
        if (!zeta_sum(z, N).value.overlaps(zeta_product(z))) {
          r.passed = false;
          r.counterexamples.push_back("sum/product p=" + std::to_string(p) + " k=" + std::to_string(k) +
                                      " s=" + report::format_double(s));
        }
      }
  for (const auto& z : derivative_sample()) {
    ++r.checked;
    const Interval d = zeta_log_derivative(z);
    const double fd = finite_difference(z);
    if (!(d.lo() - 1e-4 <= fd && fd <= d.hi() + 1e-4)) {
      r.passed = false;
      r.counterexamples.push_back("derivative p=" + std::to_string(z.p) + " k=" + std::to_string(*z.k) +
                                  " s=" + report::format_double(z.s));
    }
  }
  r.details = {{"N", std::to_string(N)}};
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"lemma1", "exceptions", "monotone", "hall", "zeta", "margins"};
  return names;
}

/// Runs one named suite; throws std::invalid_argument for unknown names.
inline report::SuiteReport run_suite(const std::string& name, const Bounds& b) {
  if (name == "lemma1") return lemma1(b);
  if (name == "exceptions") return exceptions(b);
  if (name == "monotone") return monotone(b);
  if (name == "hall") return hall(b);
  if (name == "zeta") return zeta(b);
  if (name == "margins") return margins(b);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace clentropy::verify
