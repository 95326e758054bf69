#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "clentropy/entropy.hpp"
#include "clentropy/verify.hpp"
#include "clentropy/zeta.hpp"

using clentropy::AbelianPGroup;
using clentropy::CLParams;
using clentropy::Interval;
using clentropy::Partition;
using clentropy::ZetaParams;
using clentropy::kl_closed;
using clentropy::kl_direct;

TEST(Zeta, ParamsValidate) {
  EXPECT_THROW(ZetaParams(4, 1, 0.0), std::invalid_argument);
  EXPECT_THROW(ZetaParams(2, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(ZetaParams(2, 1, -1.0), std::invalid_argument);
  EXPECT_NO_THROW(ZetaParams(2, std::nullopt, -0.5));
}

TEST(Zeta, WeightExamples) {
  EXPECT_EQ(w_k_weight(AbelianPGroup(2, {}), 1), 1);
  EXPECT_EQ(w_k_weight(AbelianPGroup(2, {}), 7), 1);
  EXPECT_EQ(w_k_weight(AbelianPGroup(2, {1}), 1), mpq_class(1, 2));
  EXPECT_EQ(w_k_weight(AbelianPGroup(2, {1, 1}), 1), 0);
  EXPECT_EQ(w_k_weight(AbelianPGroup(2, {1, 1}), std::nullopt), mpq_class(1, 6));
}

TEST(Zeta, WeightsIncreaseToLimit) {
  for (unsigned p : {2u, 3u})
    for (int n = 0; n <= 6; ++n)
      for (const auto& g : clentropy::groups_of_order(p, n)) {
        const mpq_class limit = w_k_weight(g, std::nullopt);
        mpq_class prev = 0;
        for (int k = 1; k <= 50; ++k) {
          const mpq_class w = w_k_weight(g, k);
          ASSERT_GE(w, prev) << g.to_string() << " k=" << k;
          ASSERT_LE(w, limit);
          prev = w;
        }
        EXPECT_LT(clentropy::enclose(mpq_class((limit - prev) / limit)).hi(), 1e-12) << g.to_string();
      }
}

TEST(Zeta, ProductExamples) {
  EXPECT_TRUE(zeta_product(ZetaParams(2, 1, 0.0)).contains(2.0));
  const Interval limit = zeta_product(ZetaParams(2, std::nullopt, 0.0));
  EXPECT_NEAR(limit.mid(), 3.4627466194550636, 1e-12);
  EXPECT_NEAR(zeta_product(ZetaParams(2, 60, 0.0)).mid(), limit.mid(), 1e-12);
  const mpq_class exact = mpq_class(9, 8) * mpq_class(27, 26);
  EXPECT_TRUE(zeta_product(ZetaParams(3, 2, 1.0)).overlaps(clentropy::enclose(exact)));
  EXPECT_TRUE(zeta_product(ZetaParams(3, 2, 1.0)).contains(clentropy::enclose(exact).mid()));
}

TEST(Zeta, SumExamples) {
  const ZetaParams z(2, 3, 0.0);
  const auto s = zeta_sum(z, 30);
  EXPECT_TRUE(s.value.overlaps(zeta_product(z)));
  EXPECT_EQ(s.truncation_level, 30);
  EXPECT_TRUE(zeta_sum(ZetaParams(2, 1, 0.0), 30).value.contains(2.0));
  for (int N : {5, 10, 20}) {
    EXPECT_GE(zeta_sum(ZetaParams(2, 2, 0.0), N).value.lo(), zeta_sum(ZetaParams(2, 1, 0.0), N).value.lo());
  }
}

TEST(Zeta, SumProductGrid) {
  for (unsigned p : {2u, 3u})
    for (int k : {1, 2, 3, 5})
      for (double s : {-0.5, 0.0, 1.0, 2.0}) {
        const ZetaParams z(p, k, s);
        EXPECT_TRUE(zeta_sum(z, 30).value.overlaps(zeta_product(z))) << p << "," << k << "," << s;
      }
}

TEST(Zeta, DerivativeExamples) {
  const Interval d = zeta_log_derivative(ZetaParams(2, 1, 0.0));
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big exact = -2 * boost::multiprecision::log(Big(2));
  EXPECT_TRUE(Big(d.lo()) <= exact && exact <= Big(d.hi()));
  EXPECT_NEAR(d.mid(), -1.3862943611198906, 1e-12);
  for (unsigned p : {2u, 3u, 5u})
    for (int k : {1, 3, 8})
      for (double s : {-0.9, 0.0, 2.5}) EXPECT_LT(zeta_log_derivative(ZetaParams(p, k, s)).hi(), 0.0);
  EXPECT_LT(zeta_log_derivative(ZetaParams(3, std::nullopt, 0.0)).hi(), 0.0);
}

TEST(Zeta, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick_p(0, 4), pick_k(1, 12);
  std::uniform_real_distribution<double> pick_s(-0.9, 3.0);
  const unsigned ps[] = {2, 3, 5, 7, 11};
  for (int i = 0; i < 20; ++i) {
    const ZetaParams z(ps[pick_p(rng)], pick_k(rng), pick_s(rng));
    const Interval d = zeta_log_derivative(z);
    const double fd = clentropy::verify::finite_difference(z);
    EXPECT_GE(fd, d.lo() - 1e-4) << z.p << "," << *z.k << "," << z.s;
    EXPECT_LE(fd, d.hi() + 1e-4) << z.p << "," << *z.k << "," << z.s;
  }
}

TEST(Zeta, KlClosedExamples) {
  const auto zero = kl_closed(3, 2.0, 2.0, 1e-9);
  EXPECT_TRUE(zero.value.contains(0.0));
  EXPECT_LE(zero.value.width(), 1e-9);
  for (unsigned p : {2u, 3u, 5u})
    for (int u1 = 0; u1 <= 5; ++u1)
      for (int u2 = 0; u2 <= 5; ++u2) EXPECT_GE(kl_closed(p, u1, u2, 1e-6).value.lo(), -1e-6);
  const auto c = kl_closed(2, 0, 1, 1e-7);
  const auto d = kl_direct(2, 0, 1, 1e-7);
  EXPECT_TRUE(c.value.overlaps(d.value));
  EXPECT_NEAR(c.value.mid(), d.value.mid(), 1e-6);
}

TEST(Zeta, KlDirectExamples) {
  EXPECT_TRUE(kl_direct(2, 1, 1, 1e-8).value.contains(0.0));
  const auto ab = kl_direct(2, 0, 2, 1e-6);
  const auto ba = kl_direct(2, 2, 0, 1e-6);
  EXPECT_FALSE(ab.value.overlaps(ba.value));
}

TEST(Zeta, KlRoutesOverlapOnGrid) {
  for (unsigned p : {2u, 3u, 5u})
    for (int u1 = 0; u1 <= 5; ++u1)
      for (int u2 = 0; u2 <= 5; ++u2) {
        const auto c = kl_closed(p, u1, u2, 1e-6);
        const auto d = kl_direct(p, u1, u2, 1e-6);
        EXPECT_TRUE(c.value.overlaps(d.value)) << p << "," << u1 << "," << u2 << ": " << c.value << " " << d.value;
      }
}

TEST(Zeta, KlExtendedDomain) {
  const auto c = kl_closed(5, -0.5, 0.75, 1e-6);
  const auto d = kl_direct(5, -0.5, 0.75, 1e-6);
  EXPECT_TRUE(c.value.overlaps(d.value));
  EXPECT_GT(c.value.lo(), 0.0);
  // At p = 2 the direct tail decays too slowly to enumerate.
  EXPECT_THROW(kl_direct(2, -0.5, 0.75, 1e-6), clentropy::Refusal);
  EXPECT_GT(kl_closed(2, -0.5, 0.75, 1e-6).value.lo(), 0.0);
}

TEST(Zeta, CrossEntropyIdentity) {
  // H(nu1) + D(nu1 || nu2) = -sum nu1 log nu2, the right side summed
  // directly over #A <= p^N in extended precision.
  using Big = boost::multiprecision::cpp_bin_float_50;
  struct Case {
    unsigned p;
    int u1, u2;
  };
  for (const Case c : {Case{2, 0, 1}, Case{2, 1, 0}, Case{3, 0, 2}}) {
    auto euler = [&](int u) {
      Big f = 1;
      for (int j = u + 1; j <= u + 300; ++j) f *= 1 - boost::multiprecision::pow(Big(c.p), -j);
      return f;
    };
    const Big f1 = euler(c.u1), f2 = euler(c.u2);
    const int N = c.p == 2 ? 40 : 26;
    Big cross = 0;
    for (int n = 0; n <= N; ++n) {
      const Big pn = boost::multiprecision::pow(Big(c.p), n);
      clentropy::for_each_partition(n, [&](const std::vector<int>& parts) {
        const Big aut(aut_order(AbelianPGroup(c.p, Partition(parts))).get_str());
        const Big nu1 = f1 / (boost::multiprecision::pow(pn, c.u1) * aut);
        const Big nu2 = f2 / (boost::multiprecision::pow(pn, c.u2) * aut);
        cross -= nu1 * boost::multiprecision::log(nu2);
      });
    }
    const Interval lhs = entropy(CLParams(c.p, c.u1), 1e-7).H.value + kl_closed(c.p, c.u1, c.u2, 1e-7).value;
    EXPECT_NEAR(lhs.mid(), cross.convert_to<double>(), 1e-5) << c.p << "," << c.u1 << "," << c.u2;
  }
  EXPECT_TRUE(kl_closed(2, 1, 1, 1e-9).value.contains(0.0));
}

TEST(Zeta, LimitDerivativeIdentity) {
  const auto a = clentropy::limit_derivative_identity(2, 0.0, 1e-8);
  EXPECT_TRUE(a.ok);
  EXPECT_LE(a.k_reached, 60);
  const auto b = clentropy::limit_derivative_identity(5, 3.0, 1e-10);
  EXPECT_TRUE(b.ok);
  EXPECT_LE(b.k_reached, 30);
  EXPECT_TRUE(clentropy::limit_derivative_identity(2, -0.5, 1e-6).ok);
}
