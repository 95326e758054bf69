#include <gtest/gtest.h>

#include <map>
#include <set>

#include "clentropy/partitions.hpp"

using clentropy::Partition;

namespace {

// Independent count: number of ways to write n with parts <= k.
long count_bounded(int n, int k, std::map<std::pair<int, int>, long>& memo) {
  if (n == 0) return 1;
  if (k == 0) return 0;
  const auto key = std::make_pair(n, k);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  long c = count_bounded(n, k - 1, memo);
  if (k <= n) c += count_bounded(n - k, k, memo);
  return memo[key] = c;
}

}  // namespace

TEST(Partition, Validates) {
  EXPECT_THROW(Partition({1, 2}), std::invalid_argument);
  EXPECT_THROW(Partition({2, 0}), std::invalid_argument);
  EXPECT_NO_THROW(Partition({3, 3, 1}));
  EXPECT_EQ(Partition({3, 1}).to_string(), "(3,1)");
  EXPECT_EQ(Partition{}.to_string(), "()");
}

TEST(Partitions, EnumerationExamples) {
  const auto zero = clentropy::enumerate_partitions(0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_TRUE(zero[0].empty());
  const std::vector<Partition> four = {{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  EXPECT_EQ(clentropy::enumerate_partitions(4), four);
  EXPECT_EQ(clentropy::enumerate_partitions(10).size(), 42u);
}

TEST(Partitions, EnumerationIsReverseLexAndDistinct) {
  for (int n = 1; n <= 20; ++n) {
    const auto all = clentropy::enumerate_partitions(n);
    std::set<Partition> seen(all.begin(), all.end());
    EXPECT_EQ(seen.size(), all.size());
    for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GT(all[i - 1], all[i]);
    for (const auto& p : all) EXPECT_EQ(p.size(), n);
  }
}

TEST(Partitions, CountExamples) {
  EXPECT_EQ(clentropy::partition_count(0), 1);
  EXPECT_EQ(clentropy::partition_count(5), 7);
  EXPECT_EQ(clentropy::partition_count(100), 190569292);
  EXPECT_THROW(clentropy::partition_count(-1), std::invalid_argument);
}

TEST(Partitions, CountMatchesEnumerationUpTo40) {
  const auto counts = clentropy::partition_counts(40);
  for (int n = 0; n <= 40; ++n) {
    long enumerated = 0;
    clentropy::for_each_partition(n, [&](const std::vector<int>&) { ++enumerated; });
    EXPECT_EQ(counts[static_cast<std::size_t>(n)], enumerated) << n;
  }
}

TEST(Partitions, AtMostKPartsMatchesRecursiveCount) {
  std::map<std::pair<int, int>, long> memo;
  for (int k = 0; k <= 8; ++k) {
    const auto c = clentropy::partition_counts_at_most(40, k);
    for (int n = 0; n <= 40; ++n) EXPECT_EQ(c[static_cast<std::size_t>(n)], count_bounded(n, k, memo)) << n << "," << k;
  }
}

TEST(Partitions, GeneratingFunctionToDegree30) {
  const int N = 30;
  std::vector<mpq_class> series(N + 1, 0);
  series[0] = 1;
  // Multiply by 1/(1 - x^i) = 1 + x^i + x^{2i} + ... for each i.
  for (int i = 1; i <= N; ++i)
    for (int m = i; m <= N; ++m) series[static_cast<std::size_t>(m)] += series[static_cast<std::size_t>(m - i)];
  const auto counts = clentropy::partition_counts(N);
  for (int n = 0; n <= N; ++n) EXPECT_EQ(mpq_class(counts[static_cast<std::size_t>(n)]), series[static_cast<std::size_t>(n)]);
}

TEST(Partitions, DualExamples) {
  EXPECT_EQ(clentropy::dual_partition(Partition{}), Partition{});
  EXPECT_EQ(clentropy::dual_partition(Partition{3, 1}), (Partition{2, 1, 1}));
  EXPECT_EQ(clentropy::dual_partition(Partition{2, 2}), (Partition{2, 2}));
}

TEST(Partitions, DualIsSizePreservingInvolution) {
  for (int n = 0; n <= 20; ++n)
    clentropy::for_each_partition(n, [&](const std::vector<int>& parts) {
      const Partition p(parts);
      const Partition d = clentropy::dual_partition(p);
      ASSERT_EQ(d.size(), p.size());
      ASSERT_EQ(clentropy::dual_partition(d), p);
      ASSERT_EQ(static_cast<int>(d.length()), p.part(0));
    });
}

TEST(Partitions, NLambdaExamples) {
  EXPECT_EQ(clentropy::n_lambda(Partition{}), 0);
  EXPECT_EQ(clentropy::n_lambda(Partition{1, 1, 1}), 3);
  EXPECT_EQ(clentropy::n_lambda(Partition{2, 1}), 1);
}

TEST(Partitions, NLambdaFormulasAgreeUpToSize20) {
  for (int n = 0; n <= 20; ++n)
    clentropy::for_each_partition(n, [&](const std::vector<int>& parts) {
      const Partition p(parts);
      mpz_class by_columns = 0;
      const Partition dual = clentropy::dual_partition(p);
      for (int l : dual.parts()) by_columns += mpz_class(l) * (l - 1) / 2;
      ASSERT_EQ(clentropy::n_lambda(p), by_columns) << p;
    });
}
