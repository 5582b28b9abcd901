#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "laneemden/identities.hpp"

using namespace laneemden;
using laneemden::testing::ground_state;

TEST(BoundaryTerms, TranslationGeneratorCancels) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "1"}, std::pair{5, "2"}}) {
    const auto& P = ground_state(N, p);
    const ChannelSolution g = known_generators(P, 1);
    for (double R : {0.5, 1.0, 5.0, 20.0}) {
      const BoundaryTerms b = compute_I(P, g, R);
      EXPECT_LE(std::abs(b.sum()), 1e-10 * b.scale) << N << ":" << p << " R " << R;
    }
  }
}

TEST(BoundaryTerms, DilationGeneratorAtBubble) {
  // u = 8/(8+r^2), psi = r u' + u; at R = 1 both terms equal -10368/59049
  const auto& P = ground_state(4, "3");
  const BoundaryTerms b = compute_I(P, known_generators(P, 0), 1.0);
  EXPECT_NEAR(b.I1, -10368.0 / 59049.0, 1e-9);
  EXPECT_NEAR(b.I2, -10368.0 / 59049.0, 1e-9);
}

TEST(BoundaryTerms, RadiusOutsideGrid) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution g = known_generators(P, 1);
  EXPECT_THROW(compute_I(P, g, 2e3), std::out_of_range);
  EXPECT_THROW(compute_I(P, g, 1e-4), std::out_of_range);
}

TEST(PohozaevCoefficient, Values) {
  EXPECT_DOUBLE_EQ(pohozaev_coefficient(4, 0), -3.0);
  EXPECT_DOUBLE_EQ(pohozaev_coefficient(4, 1), 0.0);
  EXPECT_DOUBLE_EQ(pohozaev_coefficient(5, 1), 0.0);
  EXPECT_DOUBLE_EQ(pohozaev_coefficient(5, 2), 6.0);
}

TEST(DerivativeFormulas, HoldForSolutions) {
  const auto& P = ground_state(5, "2");
  for (const ChannelSolution& s : {known_generators(P, 0), known_generators(P, 1), integrate_linearized(P, 2, 1.0, 0.0),
                                   integrate_linearized(P, 3, 0.0, 1.0)}) {
    const DerivativeResiduals d = check_derivative_formulas(P, s);
    EXPECT_LE(d.I1, 1e-5) << "ell = " << s.ell;
    EXPECT_LE(d.I2, 1e-5) << "ell = " << s.ell;
  }
}

TEST(DerivativeFormulas, DetectNonSolution) {
  const auto& P = ground_state(4, "3");
  ChannelSolution s = integrate_linearized(P, 2, 1.0, 0.0);
  // a smooth pair with consistent derivatives that does not solve the channel equations
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.r[i], e = std::exp(-r);
    s.psi[i] = r * r * e;
    s.dpsi[i] = (2.0 * r - r * r) * e;
    s.d2psi[i] = (2.0 - 4.0 * r + r * r) * e;
  }
  const DerivativeResiduals d = check_derivative_formulas(P, s);
  EXPECT_GT(std::max(d.I1, d.I2), 0.1);
}

TEST(PohozaevIdentity, VanishesInTheTranslationChannel) {
  const auto& P = ground_state(5, "1");
  for (const PohozaevSample& x : check_poho_identity(P, known_generators(P, 1), {1.0, 5.0, 20.0})) {
    EXPECT_EQ(x.integral, 0.0);
    EXPECT_LE(x.residual, 1e-10) << "R = " << x.R;
  }
}

TEST(PohozaevIdentity, HigherChannelBasisRun) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "2"}, std::pair{3, "3"}}) {
    const auto& P = ground_state(N, p);
    for (const ChannelSolution& s : {integrate_linearized(P, 2, 1.0, 0.0), integrate_linearized(P, 2, 0.0, 1.0)}) {
      for (const PohozaevSample& x : check_poho_identity(P, s, {1.0, 5.0, 20.0})) {
        EXPECT_LE(x.residual, 1e-6) << N << ":" << p << " R " << x.R;
      }
    }
  }
}

TEST(PohozaevIdentity, DilationGeneratorAtTen) {
  const auto& P = ground_state(5, "2");
  const auto xs = check_poho_identity(P, known_generators(P, 0), {10.0});
  ASSERT_EQ(xs.size(), 1u);
  EXPECT_LE(xs[0].residual, 1e-6);
  EXPECT_NE(xs[0].lhs, 0.0);
}

TEST(PohozaevIdentity, SpansTwoDecades) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution s = integrate_linearized(P, 3, 0.0, 1.0);
  for (const PohozaevSample& x : check_poho_identity(P, s, {0.5, 2.0, 10.0, 50.0})) EXPECT_LE(x.residual, 1e-6);
}

TEST(SignStructure, BubbleHigherChannel) {
  const auto& P = ground_state(4, "3");
  const SignStructure s = check_sign_structure(P, integrate_linearized(P, 2, 1.0, 0.0));
  EXPECT_TRUE(s.outside_signs_hold) << s.note;
  EXPECT_TRUE(s.tail_away_from_zero) << s.note;
  EXPECT_GT(s.R, 0.0);
}

TEST(SignStructure, InvariantUnderSignFlip) {
  const auto& P = ground_state(5, "2");
  const SignStructure a = check_sign_structure(P, integrate_linearized(P, 2, 1.0, 0.0));
  const SignStructure b = check_sign_structure(P, integrate_linearized(P, 2, -1.0, 0.0));
  EXPECT_EQ(a.sigma, -b.sigma);
  EXPECT_EQ(a.r1.has_value(), b.r1.has_value());
  EXPECT_EQ(a.r2.has_value(), b.r2.has_value());
  if (a.r1 && b.r1) EXPECT_NEAR(*a.r1, *b.r1, 1e-9 * *a.r1);
  if (a.r2 && b.r2) EXPECT_NEAR(*a.r2, *b.r2, 1e-9 * *a.r2);
  EXPECT_EQ(a.phi_positive_near_zero, b.phi_positive_near_zero);
  EXPECT_EQ(a.integral_negative, b.integral_negative);
  EXPECT_EQ(a.tail_away_from_zero, b.tail_away_from_zero);
}

TEST(SignStructure, LowChannelsRejected) {
  const auto& P = ground_state(4, "3");
  EXPECT_THROW(check_sign_structure(P, known_generators(P, 1)), std::invalid_argument);
}

TEST(EnergyNorm, GroundStateMatchesSourceIntegral) {
  // -Delta u = v^p, so the norm with s = (p+1)/p is (int v^{p+1} r^{N-1})^{p/(p+1)}; 16/3 for the bubble
  const auto& P = ground_state(4, "3");
  const EnergyNorm e = energy_norm(profile_component(P, true), 4, 0, 4.0 / 3.0);
  EXPECT_NEAR(e.value, std::pow(16.0 / 3.0, 0.75), 1e-6);
  EXPECT_FALSE(e.diverging);
}

TEST(EnergyNorm, GeneratorFinitePartnerDiverges) {
  const auto& P = ground_state(5, "2");
  const double s = (P.pair.p + 1.0) / P.pair.p;
  const EnergyNorm g = energy_norm(solution_component(known_generators(P, 1), true), 5, 1, s);
  EXPECT_TRUE(std::isfinite(g.value));
  EXPECT_FALSE(g.diverging);
  const GridFunction f = solution_component(integrate_linearized(P, 0, 0.0, 1.0), true);
  const DivergenceWitness w = energy_divergence(f, 5, 0, s);
  EXPECT_TRUE(w.diverges()) << "growth " << w.growth;
  for (std::size_t i = 1; i < w.norms.size(); ++i) EXPECT_GT(w.norms[i], w.norms[i - 1]);
}

TEST(EnergyNorm, CutoffBeyondRangeRejected) {
  const auto& P = ground_state(4, "3");
  EXPECT_THROW(truncated_energy_norm(profile_component(P, true), 4, 0, 4.0 / 3.0, 5e3), std::out_of_range);
}

TEST(Inequalities, GradientExponents) {
  const auto [inv_s, inv_t] = gradient_exponents(pair_from_p(5, 1.0));
  EXPECT_NEAR(inv_s, 0.7, 1e-14);
  EXPECT_NEAR(inv_t, 0.3, 1e-14);
  for (const auto& [N, p] : {std::pair{4, 3.0}, std::pair{5, 2.0}, std::pair{7, 1.5}}) {
    const auto [a, b] = gradient_exponents(pair_from_p(N, p));
    EXPECT_NEAR(a + b, 1.0, 1e-13);
  }
}

TEST(Inequalities, RatiosAreScaleInvariant) {
  const auto& P = ground_state(5, "2");
  const InequalityTable a = inequality_ratios(P, {});
  const InequalityTable b = inequality_ratios(rescale_profile(P, 2.0), {});
  ASSERT_EQ(a.rows.size(), b.rows.size());
  ASSERT_FALSE(a.rows.empty());
  EXPECT_LE(a.exponent_defect, 1e-13);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const InequalityRow& x = a.rows[i];
    const InequalityRow& y = b.rows[i];
    for (const auto& [u, v] : {std::pair{x.sobolev_lower, y.sobolev_lower}, std::pair{x.hardy, y.hardy},
                               std::pair{x.sobolev_grad_t, y.sobolev_grad_t},
                               std::pair{x.sobolev_grad_s, y.sobolev_grad_s}}) {
      if (std::isnan(u)) {
        EXPECT_TRUE(std::isnan(v));
        continue;
      }
      EXPECT_NEAR(u, v, 1e-4 * std::abs(u)) << x.function;
    }
  }
}

TEST(Integrability, GeneratorTailShrinks) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution g = known_generators(P, 0);
  EXPECT_LT(integrability_tail(P, g, 1000.0), integrability_tail(P, g, 100.0));
  EXPECT_LT(integrability_tail(P, g, 100.0), integrability_tail(P, g, 10.0));
}

TEST(IdentityReport, CollectsAllRadii) {
  const auto& P = ground_state(4, "3");
  const IdentityReport r = identity_report(P, known_generators(P, 0));
  EXPECT_EQ(r.radii.size(), 3u);
  EXPECT_EQ(r.I1_values.size(), 3u);
  EXPECT_EQ(r.poho_residuals.size(), 3u);
  for (double x : r.poho_residuals) EXPECT_LE(x, 1e-6);
  EXPECT_LE(r.derivative_residuals.I1, 1e-5);
}
