#include <gtest/gtest.h>

#include <random>

#include "laneemden/hyperbola.hpp"

using namespace laneemden;

TEST(PairFromP, SymmetricPointN4) {
  const CriticalPair c = pair_from_p(4, 3.0);
  EXPECT_NEAR(c.q, 3.0, 1e-12);
  EXPECT_NEAR(c.alpha, 1.0, 1e-12);
  EXPECT_NEAR(c.beta, 1.0, 1e-12);
  EXPECT_EQ(c.regime, Regime::SuperSerrin);
}

TEST(PairFromP, SubSerrinN5) {
  const CriticalPair c = pair_from_p(5, 1.0);
  EXPECT_NEAR(c.q, 9.0, 1e-12);
  EXPECT_EQ(c.regime, Regime::SubSerrin);
}

TEST(PairFromP, LogCaseN3) {
  const CriticalPair c = pair_from_p(3, 3.0);
  EXPECT_NEAR(c.q, 11.0, 1e-12);
  EXPECT_EQ(c.regime, Regime::LogCase);
}

TEST(PairFromP, ExactRatioOnSerrinBoundary) {
  EXPECT_EQ(pair_from_text(5, "5/3").regime, Regime::LogCase);
  EXPECT_EQ(pair_from_text(5, "2").regime, Regime::SuperSerrin);
  const CriticalPair c = pair_from_text(5, "11/4");
  EXPECT_NEAR(c.p, 2.75, 1e-15);
  ASSERT_TRUE(c.p_exact.has_value());
  EXPECT_EQ(c.p_exact->num, 11);
  EXPECT_EQ(c.p_exact->den, 4);
}

TEST(PairFromP, RejectsInadmissible) {
  EXPECT_THROW(pair_from_p(4, 1.0), AdmissibilityError);   // p = 2/(N-2)
  EXPECT_THROW(pair_from_p(4, 0.5), AdmissibilityError);
  EXPECT_THROW(pair_from_p(2, 3.0), AdmissibilityError);
  EXPECT_THROW(pair_from_text(4, "abc"), AdmissibilityError);
  EXPECT_THROW(pair_from_text(4, "3/0"), AdmissibilityError);
}

TEST(PairFromP, InvolutionSwapsRoles) {
  for (int N = 3; N <= 8; ++N) {
    for (double p : {2.0 / (N - 2) + 0.1, 1.0 * N / (N - 2), 4.0}) {
      const CriticalPair c = pair_from_p(N, p);
      EXPECT_NEAR(pair_from_p(N, c.q).q, p, 1e-12 * p);
    }
  }
}

TEST(ScalingExponents, ExamplesVanish) {
  EXPECT_LE(scaling_exponent_identity(pair_from_p(4, 3.0)), 1e-12);
  const CriticalPair a = pair_from_p(5, 1.0);
  EXPECT_NEAR(a.alpha, 0.5, 1e-12);
  EXPECT_NEAR(a.beta, 2.5, 1e-12);
  EXPECT_LE(scaling_exponent_identity(a), 1e-12);
  const CriticalPair b = pair_from_p(3, 3.0);
  EXPECT_NEAR(b.alpha, 0.25, 1e-12);
  EXPECT_NEAR(b.beta, 0.75, 1e-12);
}

TEST(ScalingExponents, RandomSamplesStayOnCurve) {
  std::mt19937 rng(7);
  for (int N = 3; N <= 8; ++N) {
    std::uniform_real_distribution<double> dist(2.0 / (N - 2) * 1.001, 30.0);
    for (int k = 0; k < 100; ++k) {
      const CriticalPair c = pair_from_p(N, dist(rng));
      EXPECT_LE(hyperbola_residual(c), 1e-12);
      EXPECT_LE(scaling_exponent_identity(c), 1e-12);
    }
  }
}

TEST(InequalityLemma, Examples) {
  const InequalityLemma a = check_inequality_lemma(pair_from_p(5, 1.0));
  EXPECT_NEAR(a.lhs, 8.0, 1e-12);
  EXPECT_NEAR(a.mid, 4.0, 1e-12);
  EXPECT_TRUE(a.verdict);
  EXPECT_TRUE(check_inequality_lemma(pair_from_p(6, 0.6)).verdict);
  EXPECT_THROW(check_inequality_lemma(pair_from_text(5, "5/3")), AdmissibilityError);
}

TEST(InequalityLemma, TrueOnSubSerrinGrid) {
  for (int N = 3; N <= 8; ++N) {
    const double lo = 2.0 / (N - 2), hi = 1.0 * N / (N - 2);
    for (int k = 0; k < 100; ++k) {
      EXPECT_TRUE(check_inequality_lemma(pair_from_p(N, lo + (hi - lo) * (k + 0.5) / 100)).verdict) << N << " " << k;
    }
  }
}

TEST(Bootstrap, SubSerrinHandIteration) {
  const double eta = 1e-3;
  const BootstrapResult b = decay_bootstrap(pair_from_p(5, 1.0), eta);
  ASSERT_GE(b.beta.size(), 1u);
  ASSERT_GE(b.alpha.size(), 2u);
  EXPECT_NEAR(b.beta[0], 3.0 - eta, 1e-12);
  EXPECT_NEAR(b.alpha[1], 1.0 - 2 * eta, 1e-12);
  EXPECT_NEAR(b.alpha_limit, 1.0, 10 * eta);
  EXPECT_NEAR(b.beta_limit, 3.0, 10 * eta);
  EXPECT_TRUE(b.strictly_increasing);
}

TEST(Bootstrap, SaturatingBranches) {
  const BootstrapResult a = decay_bootstrap(pair_from_p(4, 3.0));
  EXPECT_NEAR(a.alpha_limit, 2.0, 1e-2);
  EXPECT_NEAR(a.beta_limit, 2.0, 1e-2);
  const BootstrapResult b = decay_bootstrap(pair_from_p(3, 3.0));
  EXPECT_NEAR(b.alpha_limit, 1.0, 1e-2);
  EXPECT_NEAR(b.beta_limit, 1.0, 1e-2);
  EXPECT_TRUE(a.strictly_increasing);
  EXPECT_TRUE(b.strictly_increasing);
}

TEST(Bootstrap, SaturatesQuicklyForSampledPairs) {
  for (int N = 3; N <= 8; ++N) {
    for (int k = 1; k <= 10; ++k) {
      const double p = 2.0 / (N - 2) + k * 0.3;
      const BootstrapResult b = decay_bootstrap(pair_from_p(N, p));
      EXPECT_LE(b.steps_to_saturation, 10) << N << " " << p;
      EXPECT_TRUE(b.strictly_increasing);
    }
  }
  EXPECT_THROW(decay_bootstrap(pair_from_p(4, 3.0), 0.5), std::invalid_argument);
}
