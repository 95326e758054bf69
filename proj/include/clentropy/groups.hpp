#pragma once

// Finite abelian p-groups up to isomorphism and their automorphism counts.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "clentropy/partitions.hpp"

namespace clentropy {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline mpz_class ipow(unsigned long base, unsigned long exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

/// The group prod_i Z/p^{lambda'_i}, identified by its type lambda'.
class AbelianPGroup {
 public:
  AbelianPGroup(unsigned p, Partition type) : p_(p), type_(std::move(type)) {
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  }

  unsigned p() const { return p_; }
  const Partition& type() const { return type_; }
  /// log_p of the order, |lambda'|.
  int exponent() const { return type_.size(); }
  bool is_trivial() const { return type_.empty(); }

  std::string to_string() const {
    if (type_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < type_.length(); ++i) {
      if (i) s += " x ";
      s += "Z/" + std::to_string(p_) + "^" + std::to_string(type_[i]);
    }
    return s;
  }

 private:
  unsigned p_;
  Partition type_;
};

inline mpz_class group_order(const AbelianPGroup& a) {
  return ipow(a.p(), static_cast<unsigned long>(a.exponent()));
}

inline int rank(const AbelianPGroup& a) { return static_cast<int>(a.type().length()); }

/// #Aut A = p^{|l'| + 2n(l')} prod_j prod_{k=1}^{m_j} (1 - p^{-k}),
/// m_j = l_j - l_{j+1} over the conjugate l, evaluated with the
/// denominators p^{sum k} cleared so every step stays in Z.
inline mpz_class aut_order(const AbelianPGroup& a) {
  const Partition dual = dual_partition(a.type());
  const unsigned long p = a.p();
  mpz_class exponent = mpz_class(a.exponent()) + 2 * n_lambda(a.type());
  mpz_class product = 1;
  for (std::size_t j = 0; j < dual.length(); ++j) {
    const int m = dual.part(j) - dual.part(j + 1);
    exponent -= mpz_class(m) * (m + 1) / 2;
    for (int k = 1; k <= m; ++k) product *= ipow(p, static_cast<unsigned long>(k)) - 1;
  }
  if (exponent < 0) throw std::logic_error("negative p-exponent in #Aut of " + a.to_string());
  return ipow(p, exponent.get_ui()) * product;
}

// ---------------------------------------------------------------------------
// Exhaustive automorphism counting (test oracle).

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Explicit model of prod_i Z/p^{e_i} with elements encoded in mixed radix.
class ExplicitGroup {
 public:
  ExplicitGroup(unsigned p, const std::vector<int>& exps) : p_(p), exps_(exps) {
    order_ = 1;
    for (int e : exps_) {
      int m = 1;
      for (int k = 0; k < e; ++k) m *= static_cast<int>(p);
      moduli_.push_back(m);
      order_ *= m;
    }
    add_.assign(static_cast<std::size_t>(order_) * order_, 0);
    for (int x = 0; x < order_; ++x)
      for (int y = 0; y < order_; ++y) add_[index(x, y)] = slow_add(x, y);
  }

  int order() const { return order_; }
  int rank() const { return static_cast<int>(exps_.size()); }
  int exp_of(int i) const { return exps_[static_cast<std::size_t>(i)]; }

  int add(int x, int y) const { return add_[index(x, y)]; }

  int times(long c, int x) const {
    int acc = 0;
    for (long i = 0; i < c; ++i) acc = add(acc, x);
    return acc;
  }

  /// Standard generator i.
  int generator(int i) const {
    int code = 1;
    for (int j = 0; j < i; ++j) code *= moduli_[static_cast<std::size_t>(j)];
    return code;
  }

  std::vector<int> coordinates(int x) const {
    std::vector<int> c;
    for (int m : moduli_) {
      c.push_back(x % m);
      x /= m;
    }
    return c;
  }

  long pow_p(int e) const {
    long r = 1;
    for (int k = 0; k < e; ++k) r *= p_;
    return r;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(order_) + static_cast<std::size_t>(y);
  }
  int slow_add(int x, int y) const {
    int code = 0, scale = 1;
    for (int m : moduli_) {
      code += ((x % m + y % m) % m) * scale;
      x /= m;
      y /= m;
      scale *= m;
    }
    return code;
  }

  unsigned p_;
  std::vector<int> exps_;
  std::vector<int> moduli_;
  int order_ = 1;
  std::vector<int> add_;
};

using ElementSet = std::array<std::uint64_t, 4>;  // order <= 256

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : s) h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

inline bool has(const ElementSet& s, int x) { return (s[static_cast<std::size_t>(x) >> 6] >> (x & 63)) & 1U; }
inline void put(ElementSet& s, int x) { s[static_cast<std::size_t>(x) >> 6] |= std::uint64_t{1} << (x & 63); }

/// Tuples of generator images for which the induced map on all of A is a
/// permutation, counted by enumerating every tuple.
inline mpz_class count_by_enumeration(const ExplicitGroup& g, const std::vector<std::vector<int>>& candidates) {
  const int r = g.rank();
  std::vector<std::size_t> choice(static_cast<std::size_t>(r), 0);
  std::vector<int> image(static_cast<std::size_t>(g.order()));
  std::vector<char> seen(static_cast<std::size_t>(g.order()));
  std::vector<std::vector<int>> coords;
  for (int x = 0; x < g.order(); ++x) coords.push_back(g.coordinates(x));
  mpz_class count = 0;
  while (true) {
    std::fill(seen.begin(), seen.end(), 0);
    bool bijective = true;
    for (int x = 0; x < g.order() && bijective; ++x) {
      int y = 0;
      for (int i = 0; i < r; ++i)
        y = g.add(y, g.times(coords[static_cast<std::size_t>(x)][static_cast<std::size_t>(i)],
                             candidates[static_cast<std::size_t>(i)][choice[static_cast<std::size_t>(i)]]));
      if (seen[static_cast<std::size_t>(y)]) bijective = false;
      seen[static_cast<std::size_t>(y)] = 1;
    }
    if (bijective) ++count;
    int i = 0;
    while (i < r && ++choice[static_cast<std::size_t>(i)] == candidates[static_cast<std::size_t>(i)].size())
      choice[static_cast<std::size_t>(i++)] = 0;
    if (i == r) break;
  }
  return count;
}

/// Same count, organized by the image subgroup H generated so far. A tuple
/// extends injectively by h iff ord(h) = p^{e_i} and p^{e_i - 1} h lies
/// outside H, and the number of completions depends only on H + <h>.
class SubgroupCounter {
 public:
  SubgroupCounter(const ExplicitGroup& g, const std::vector<std::vector<int>>& candidates)
      : g_(g), candidates_(candidates), memo_(static_cast<std::size_t>(g.rank()) + 1) {}

  mpz_class count() {
    ElementSet trivial{};
    put(trivial, 0);
    return extend(0, trivial);
  }

 private:
  mpz_class extend(int level, const ElementSet& h_set) {
    if (level == g_.rank()) return 1;
    auto& memo = memo_[static_cast<std::size_t>(level)];
    if (auto it = memo.find(h_set); it != memo.end()) return it->second;

    const int e = g_.exp_of(level);
    const long step = g_.pow_p(e - 1);
    std::vector<ElementSet> successors;
    std::vector<long> multiplicity;
    std::vector<int> owner(static_cast<std::size_t>(g_.order()), -1);
    for (int h : candidates_[static_cast<std::size_t>(level)]) {
      const int low = g_.times(step, h);
      if (low == 0 || has(h_set, low)) continue;
      if (owner[static_cast<std::size_t>(h)] >= 0) {
        ++multiplicity[static_cast<std::size_t>(owner[static_cast<std::size_t>(h)])];
        continue;
      }
      ElementSet next{};
      std::vector<int> members;
      for (int x = 0; x < g_.order(); ++x)
        if (has(h_set, x)) members.push_back(x);
      int shift = 0;
      const long cyclic = g_.pow_p(e);
      for (long c = 0; c < cyclic; ++c) {
        for (int x : members) put(next, g_.add(x, shift));
        shift = g_.add(shift, h);
      }
      const int id = static_cast<int>(successors.size());
      for (int x = 0; x < g_.order(); ++x)
        if (has(next, x)) owner[static_cast<std::size_t>(x)] = id;
      successors.push_back(next);
      multiplicity.push_back(1);
    }
    mpz_class total = 0;
    for (std::size_t s = 0; s < successors.size(); ++s)
      total += mpz_class(multiplicity[s]) * extend(level + 1, successors[s]);
    memo.emplace(h_set, total);
    return total;
  }

  const ExplicitGroup& g_;
  const std::vector<std::vector<int>>& candidates_;
  std::vector<std::unordered_map<ElementSet, mpz_class, ElementSetHash>> memo_;
};

}  // namespace detail

/// Counts bijective endomorphisms of A by exhaustive search over images of
/// the standard generators. Small Hom(A, A) are enumerated tuple by tuple;
/// larger ones are counted over the lattice of image subgroups.
inline mpz_class aut_order_bruteforce(const AbelianPGroup& a) {
  if (group_order(a) > 256) throw OracleRefusal("brute-force automorphism count needs #A <= 256, got " + group_order(a).get_str());
  const detail::ExplicitGroup g(a.p(), a.type().parts());
  std::vector<std::vector<int>> candidates(static_cast<std::size_t>(g.rank()));
  double hom_size = 1;
  for (int i = 0; i < g.rank(); ++i) {
    const long kill = g.pow_p(g.exp_of(i));
    for (int x = 0; x < g.order(); ++x)
      if (g.times(kill, x) == 0) candidates[static_cast<std::size_t>(i)].push_back(x);
    hom_size *= static_cast<double>(candidates[static_cast<std::size_t>(i)].size());
  }
  if (hom_size * g.order() <= static_cast<double>(1 << 22)) return detail::count_by_enumeration(g, candidates);
  return detail::SubgroupCounter(g, candidates).count();
}

/// Outcome of checking both automorphism lower bounds on one group.
struct Lemma1Report {
  bool lower_bound_ok = false;                ///< #Aut >= #A (1 - 1/p)
  std::optional<bool> rank2_bound_ok;         ///< #Aut >= #A, only when rank >= 2
  bool holds() const { return lower_bound_ok && rank2_bound_ok.value_or(true); }
};

inline Lemma1Report lemma1_holds(const AbelianPGroup& a) {
  if (a.is_trivial()) throw std::invalid_argument("automorphism lower bounds concern nontrivial groups");
  const mpz_class order = group_order(a);
  const mpz_class aut = aut_order(a);
  Lemma1Report r;
  r.lower_bound_ok = aut * a.p() >= order * (a.p() - 1);
  if (rank(a) >= 2) r.rank2_bound_ok = aut >= order;
  return r;
}

/// All groups of order p^n in canonical order.
inline std::vector<AbelianPGroup> groups_of_order(unsigned p, int n) {
  std::vector<AbelianPGroup> out;
  for_each_partition(n, [&](const std::vector<int>& parts) { out.emplace_back(p, Partition(parts)); });
  return out;
}

}  // namespace clentropy
