#pragma once

// Integer partitions: enumeration, exact counting, conjugation, n(lambda).

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace clentropy {

/// Weakly decreasing sequence of positive parts. The empty partition is the
/// unique partition of 0.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 1) throw std::invalid_argument("partition parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1])
        throw std::invalid_argument("partition parts must be weakly decreasing");
    }
  }
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  int operator[](std::size_t i) const { return parts_[i]; }
  /// Part i, or 0 past the end.
  int part(std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

  int size() const {
    int s = 0;
    for (int x : parts_) s += x;
    return s;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> parts_;
};

inline std::ostream& operator<<(std::ostream& os, const Partition& p) { return os << p.to_string(); }

namespace detail {

template <class Visit>
void visit_partitions(int remaining, int max_part, std::vector<int>& prefix, Visit& visit) {
  if (remaining == 0) {
    visit(prefix);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    prefix.push_back(part);
    visit_partitions(remaining - part, part, prefix, visit);
    prefix.pop_back();
  }
}

}  // namespace detail

/// Calls visit(const std::vector<int>&) for every partition of n in
/// reverse-lexicographic order, without materializing the list.
template <class Visit>
void for_each_partition(int n, Visit&& visit) {
  if (n < 0) throw std::invalid_argument("partition of a negative integer");
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(n));
  detail::visit_partitions(n, n, prefix, visit);
}

/// All partitions of n in reverse-lexicographic order.
inline std::vector<Partition> enumerate_partitions(int n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](const std::vector<int>& parts) { out.emplace_back(parts); });
  return out;
}

/// pi(0..n) by Euler's pentagonal-number recurrence.
inline std::vector<mpz_class> partition_counts(int n) {
  if (n < 0) throw std::invalid_argument("partition count of a negative integer");
  std::vector<mpz_class> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1;
  for (int m = 1; m <= n; ++m) {
    mpz_class acc = 0;
    for (int k = 1;; ++k) {
      const int g1 = k * (3 * k - 1) / 2;
      if (g1 > m) break;
      const int g2 = k * (3 * k + 1) / 2;
      const bool plus = (k % 2) == 1;
      if (plus) acc += p[m - g1]; else acc -= p[m - g1];
      if (g2 <= m) {
        if (plus) acc += p[m - g2]; else acc -= p[m - g2];
      }
    }
    p[m] = acc;
  }
  return p;
}

inline mpz_class partition_count(int n) { return partition_counts(n).back(); }

/// Number of partitions of each m <= n into at most k parts.
inline std::vector<mpz_class> partition_counts_at_most(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("negative argument to partition_counts_at_most");
  // Partitions into at most k parts = partitions into parts of size <= k.
  std::vector<mpz_class> c(static_cast<std::size_t>(n) + 1, 0);
  c[0] = 1;
  for (int part = 1; part <= k && part <= n; ++part)
    for (int m = part; m <= n; ++m) c[m] += c[m - part];
  return c;
}

/// Conjugate partition: lambda_j = #{i : lambda'_i >= j}.
inline Partition dual_partition(const Partition& lp) {
  std::vector<int> out;
  if (lp.empty()) return Partition{};
  out.assign(static_cast<std::size_t>(lp[0]), 0);
  for (int x : lp.parts())
    for (int j = 0; j < x; ++j) ++out[static_cast<std::size_t>(j)];
  return Partition(std::move(out));
}

/// n(lambda') = sum_i (i-1) lambda'_i, cross-checked against
/// sum_j C(lambda_j, 2) over the conjugate.
inline mpz_class n_lambda(const Partition& lp) {
  mpz_class by_rows = 0;
  for (std::size_t i = 0; i < lp.length(); ++i) by_rows += mpz_class(static_cast<unsigned long>(i)) * lp[i];
  mpz_class by_columns = 0;
  const Partition dual = dual_partition(lp);
  for (int l : dual.parts()) by_columns += mpz_class(l) * (l - 1) / 2;
  if (by_rows != by_columns) throw std::logic_error("n(lambda) formulas disagree for " + lp.to_string());
  return by_rows;
}

}  // namespace clentropy
