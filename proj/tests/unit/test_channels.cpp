#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "laneemden/channels.hpp"

using namespace laneemden;
using laneemden::testing::ground_state;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// power pair r^ell (psi) and r^{-(ell+N-2)} (phi) on a log grid, exact derivatives
ChannelSolution frame_solution(int ell, int N) {
  ChannelSolution s;
  s.ell = ell;
  const double m = ell + N - 2.0;
  for (double r : log_uniform_nodes(1.0, 1e3, 100)) {
    s.r.push_back(r);
    s.psi.push_back(std::pow(r, ell));
    s.dpsi.push_back(ell * std::pow(r, ell - 1.0));
    s.d2psi.push_back(ell * (ell - 1.0) * std::pow(r, ell - 2.0));
    s.phi.push_back(std::pow(r, -m));
    s.dphi.push_back(-m * std::pow(r, -m - 1.0));
    s.d2phi.push_back(m * (m + 1.0) * std::pow(r, -m - 2.0));
  }
  return s;
}

}  // namespace

TEST(KnownGenerators, TranslationGeneratorAtBubble) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution g = known_generators(P, 1);
  for (std::size_t i = 0; i < g.size(); i += 97) {
    const double r = g.r[i];
    if (r > 50) break;
    const double want = -(r / 4.0) * std::pow(1.0 + r * r / 8.0, -2.0);
    EXPECT_LT(std::abs(g.psi[i] - want), 1e-8 * std::max(std::abs(want), 1e-6)) << "r = " << r;
  }
}

TEST(KnownGenerators, DilationGeneratorStartsAtAlphaU0) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution g = known_generators(P, 0);
  EXPECT_NEAR(g.a, 1.0, 1e-14);
  EXPECT_NEAR(g.psi.front(), 1.0, 1e-5);
  EXPECT_NEAR(g.b, P.gamma_star, 1e-8);
}

TEST(KnownGenerators, HigherChannelsRejected) {
  const auto& P = ground_state(4, "3");
  EXPECT_THROW(known_generators(P, 2), std::invalid_argument);
  EXPECT_THROW(known_generators(P, 5), std::invalid_argument);
}

TEST(KnownGenerators, DecayAtInfinity) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "1"}, std::pair{5, "2"}}) {
    const auto& P = ground_state(N, p);
    for (int ell : {0, 1}) {
      const ChannelSolution g = known_generators(P, ell);
      // slowest admissible decay is r^{-1}, so a decade outward must shrink both components
      const std::size_t i = g.size() - 1 - 400;
      EXPECT_LT(std::abs(g.psi.back()), 0.2 * std::abs(g.psi[i])) << N << ":" << p << " l" << ell;
      EXPECT_LT(std::abs(g.phi.back()), 0.2 * std::abs(g.phi[i])) << N << ":" << p << " l" << ell;
    }
  }
}

TEST(KnownGenerators, SolveTheLinearizedEquations) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "1"}, std::pair{3, "3"}}) {
    const auto& P = ground_state(N, p);
    for (int ell : {0, 1}) EXPECT_LE(channel_residual(P, known_generators(P, ell)), 1e-6) << N << ":" << p;
  }
}

TEST(IntegrateLinearized, RejectsZeroStart) {
  const auto& P = ground_state(4, "3");
  EXPECT_THROW(integrate_linearized(P, 0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate_linearized(P, -1, 1.0, 0.0), std::invalid_argument);
}

TEST(IntegrateLinearized, Superposition) {
  const auto& P = ground_state(5, "1");
  const double c1 = 0.7, c2 = -1.3;
  const ChannelSolution s1 = integrate_linearized(P, 2, 1.0, 0.0);
  const ChannelSolution s2 = integrate_linearized(P, 2, 0.0, 1.0);
  const ChannelSolution s = integrate_linearized(P, 2, c1, c2);
  ASSERT_EQ(s.size(), s1.size());
  ASSERT_EQ(s.size(), s2.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double want_psi = c1 * s1.psi[i] + c2 * s2.psi[i];
    const double want_phi = c1 * s1.phi[i] + c2 * s2.phi[i];
    const double scale_psi = std::abs(c1 * s1.psi[i]) + std::abs(c2 * s2.psi[i]);
    const double scale_phi = std::abs(c1 * s1.phi[i]) + std::abs(c2 * s2.phi[i]);
    ASSERT_LE(std::abs(s.psi[i] - want_psi), 1e-8 * scale_psi) << "r = " << s.r[i];
    ASSERT_LE(std::abs(s.phi[i] - want_phi), 1e-8 * scale_phi) << "r = " << s.r[i];
  }
}

TEST(IntegrateLinearized, ResidualSmallForBasisStarts) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "2"}}) {
    const auto& P = ground_state(N, p);
    for (int ell = 0; ell <= 3; ++ell) {
      EXPECT_LE(channel_residual(P, integrate_linearized(P, ell, 1.0, 0.0)), 1e-6) << N << ":" << p << " l" << ell;
      EXPECT_LE(channel_residual(P, integrate_linearized(P, ell, 0.0, 1.0)), 1e-6) << N << ":" << p << " l" << ell;
    }
  }
}

TEST(IntegrateLinearized, HigherChannelStartGrows) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution s = integrate_linearized(P, 2, 1.0, 0.0);
  const auto A = growth_coefficients(P, s);
  EXPECT_GT(std::abs(A[0]) + std::abs(A[1]), 1e-3);
}

TEST(ExtractConnection, TranslationGeneratorHasNoGrowingPart) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution g = known_generators(P, 1);
  const ConnectionFit f = extract_connection(g, 4);
  const double R = g.r_max();
  // compare growing and decaying contributions at r_max
  EXPECT_LT(std::abs(f.A_psi) * R, 1e-4 * std::abs(f.B_psi) * std::pow(R, -3.0));
  EXPECT_NEAR(f.B_psi, -16.0, 1e-3);
}

TEST(ExtractConnection, RecoversFramePowers) {
  for (int N : {3, 4, 5}) {
    for (int ell : {0, 1, 2, 3}) {
      const ConnectionFit f = extract_connection(frame_solution(ell, N), N);
      // off-diagonal coefficients are judged by their share of the value at r_max
      const double R = 1e3, grow = std::pow(R, ell), decay = std::pow(R, -(ell + N - 2.0));
      EXPECT_NEAR(f.A_psi, 1.0, 1e-9);
      EXPECT_LT(std::abs(f.B_psi) * decay, 1e-9 * grow);
      EXPECT_LT(std::abs(f.A_phi) * grow, 1e-9 * decay);
      EXPECT_NEAR(f.B_phi, 1.0, 1e-6);
      EXPECT_TRUE(f.consistent());
    }
  }
}

TEST(ExtractConnection, DilationPartnerStartGrows) {
  const auto& P = ground_state(4, "3");
  const ChannelSolution s = integrate_linearized(P, 0, 0.0, 1.0);
  // ell = 0 has a constant growing mode; this start is not a multiple of the generator
  EXPECT_GT(std::abs(s.A_psi), 1e-3);
}

TEST(ExtractConnection, NeedsOuterWindow) {
  ChannelSolution s = frame_solution(1, 4);
  s.r.erase(s.r.begin(), s.r.end() - 1);
  s.psi.erase(s.psi.begin(), s.psi.end() - 1);
  s.dpsi.erase(s.dpsi.begin(), s.dpsi.end() - 1);
  s.phi.erase(s.phi.begin(), s.phi.end() - 1);
  s.dphi.erase(s.dphi.begin(), s.dphi.end() - 1);
  s.r.insert(s.r.begin(), 900.0);
  s.psi.insert(s.psi.begin(), 900.0);
  s.dpsi.insert(s.dpsi.begin(), 1.0);
  s.phi.insert(s.phi.begin(), std::pow(900.0, -3.0));
  s.dphi.insert(s.dphi.begin(), -3.0 * std::pow(900.0, -4.0));
  EXPECT_THROW(extract_connection(s, 4), std::invalid_argument);
}

TEST(ShootingNullity, BubbleChannels) {
  const auto& P = ground_state(4, "3");
  const int expected[] = {1, 1, 0, 0, 0};
  for (int ell = 0; ell <= 4; ++ell) {
    const ShootingNullity n = kernel_nullity_shooting(P, ell);
    EXPECT_EQ(n.nullity, expected[ell]) << "ell = " << ell << " margin " << n.matrix.margin();
    EXPECT_EQ(n.kernel.has_value(), expected[ell] == 1);
  }
}

TEST(ShootingNullity, DilationNullDirection) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "1"}}) {
    const auto& P = ground_state(N, p);
    const ShootingNullity n = kernel_nullity_shooting(P, 0);
    ASSERT_EQ(n.nullity, 1);
    const double a = P.pair.alpha * P.u0, b = P.pair.beta * P.gamma_star;
    const auto& d = n.matrix.null_direction;
    // parallel: the 2d cross product vanishes
    EXPECT_LT(std::abs(d[0] * b - d[1] * a) / std::hypot(a, b), 1e-6) << N << ":" << p;
  }
}

TEST(ShootingNullity, KernelMatchesGenerators) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "1"}, std::pair{5, "2"}, std::pair{3, "3"}}) {
    const auto& P = ground_state(N, p);
    for (int ell : {0, 1}) {
      const ShootingNullity n = kernel_nullity_shooting(P, ell);
      ASSERT_TRUE(n.kernel.has_value()) << N << ":" << p << " l" << ell;
      EXPECT_LE(scaled_deviation(*n.kernel, known_generators(P, ell)), 1e-5) << N << ":" << p << " l" << ell;
    }
  }
}

TEST(ShootingNullity, HigherChannelsClearOfThreshold) {
  for (const auto& [N, p] : {std::pair{4, "3"}, std::pair{5, "1"}, std::pair{5, "2"}, std::pair{3, "3"}}) {
    const auto& P = ground_state(N, p);
    for (int ell = 2; ell <= 6; ++ell) {
      const ShootingNullity n = kernel_nullity_shooting(P, ell);
      EXPECT_EQ(n.nullity, 0);
      EXPECT_GT(n.matrix.margin(), 1e-3) << N << ":" << p << " l" << ell;
    }
  }
}

TEST(ShootingNullity, StableUnderTruncationAndTolerance) {
  const auto& P = ground_state(5, "2");
  ChannelOptions tight;
  tight.rtol = 0.5e-12;
  for (int ell = 0; ell <= 3; ++ell) {
    const int base = kernel_nullity_shooting(P, ell).nullity;
    EXPECT_EQ(kernel_nullity_shooting(P, ell, tight).nullity, base) << "ell = " << ell;
    for (double r_cut : {50.0, 100.0}) {
      EXPECT_EQ(kernel_nullity_shooting(P.truncated(r_cut), ell).nullity, base) << "ell = " << ell << " r " << r_cut;
    }
  }
}

TEST(Monotonicity, PartnerStartAtBubble) {
  const auto& P = ground_state(4, "3");
  for (int ell : {0, 2, 3}) {
    const MonotonicityReport m = monotonicity_check(integrate_linearized(P, ell, 0.0, 1.0));
    EXPECT_TRUE(m.strictly_monotone) << "ell = " << ell;
    EXPECT_EQ(m.sign_changes, 0);
    EXPECT_TRUE(m.psi_increasing_on_positivity);
    EXPECT_TRUE(m.phi_decreasing);
  }
}

TEST(Monotonicity, GeneratorViolatesPrecondition) {
  const auto& P = ground_state(4, "3");
  EXPECT_THROW(monotonicity_check(known_generators(P, 0)), PreconditionError);
  EXPECT_THROW(monotonicity_check(integrate_linearized(P, 2, 1.0, 0.0)), PreconditionError);
}

TEST(LinearizedDecay, TranslationGeneratorSubSerrin) {
  const auto& P = ground_state(5, "1");
  const LinearizedDecay d = verify_linearized_decay(known_generators(P, 1), P.pair);
  EXPECT_TRUE(d.bound_satisfied) << d.psi_exponent << " " << d.phi_exponent;
  EXPECT_NEAR(d.phi_bound, 3.0, 1e-12);
}

TEST(LinearizedDecay, DilationGeneratorAtBubble) {
  const auto& P = ground_state(4, "3");
  const LinearizedDecay d = verify_linearized_decay(known_generators(P, 0), P.pair);
  EXPECT_TRUE(d.bound_satisfied);
  EXPECT_LT(rel_err(d.psi_exponent, 2.0), 0.02);
  EXPECT_LT(rel_err(d.phi_exponent, 2.0), 0.02);
}

TEST(LinearizedDecay, LogCaseTranslationGenerator) {
  const auto& P = ground_state(3, "3");
  const LinearizedDecay d = verify_linearized_decay(known_generators(P, 1), P.pair);
  EXPECT_TRUE(d.bound_satisfied) << d.psi_exponent << " " << d.psi_log_exponent << " " << d.phi_exponent;
}

TEST(LinearizedDecay, ShortRangeRejected) {
  const auto& P = ground_state(4, "3");
  EXPECT_THROW(verify_linearized_decay(known_generators(P.truncated(20.0), 1), P.pair), std::invalid_argument);
}
