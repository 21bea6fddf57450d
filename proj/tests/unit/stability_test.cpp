#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "polarsim/dynamics.hpp"
#include "polarsim/stability.hpp"

using namespace polarsim;

namespace {

constexpr double kB = 100.0;
const double kTwoBOverPi = 2.0 * kB / std::numbers::pi;

StateVector sv(std::initializer_list<int> v) {
  std::vector<Opinion> out;
  for (int x : v) out.push_back(static_cast<Opinion>(x));
  return StateVector(out);
}

SteadyStateResult fixed(const StateVector& x) {
  SteadyStateResult r;
  r.final_state = x;
  r.status = Convergence::FixedPoint;
  r.period = 1;
  return r;
}

// Discrete fixed points reached from random ternary starts on G(n, p).
std::vector<std::pair<Graph, StateVector>> random_fixed_points(std::size_t count, std::size_t n_max,
                                                               bool with_zeros, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> tern(-1, 1), bin(0, 1);
  std::vector<std::pair<Graph, StateVector>> out;
  for (std::uint32_t s = 0; out.size() < count; ++s) {
    std::size_t n = 5 + rng() % (n_max - 4);
    Graph g = oracle::gnp(n, 4.0 / static_cast<double>(n), seed * 1000 + s);
    std::vector<Opinion> x0(n);
    for (auto& v : x0) v = static_cast<Opinion>(with_zeros ? tern(rng) : 2 * bin(rng) - 1);
    auto r = evolve_to_steady(g, StateVector(x0));
    if (r.status != Convergence::FixedPoint) continue;
    if ((r.final_state.count(0) > 0) != with_zeros) continue;
    out.emplace_back(std::move(g), r.final_state);
  }
  return out;
}

}  // namespace

TEST(SmoothedStep, ZeroStaysZero) {
  Graph g = oracle::gnp(10, 0.3, 1);
  SmoothedState x{std::vector<double>(10, 0.0), kB};
  EXPECT_EQ(smoothed_step(g, x).values, x.values);
}

TEST(SmoothedStep, IsolatedNode) {
  Graph g = oracle::edgeless_graph(1);
  auto y = smoothed_step(g, SmoothedState{{1.0}, kB});
  EXPECT_NEAR(y.values[0], 0.993634, 1e-6);
  EXPECT_DOUBLE_EQ(y.values[0], 2.0 / std::numbers::pi * std::atan(100.0));
}

TEST(SmoothedStep, Odd) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Graph g = oracle::gnp(20, 0.2, 2);
  SmoothedState x{std::vector<double>(20), kB}, neg = x;
  for (std::size_t i = 0; i < 20; ++i) neg.values[i] = -(x.values[i] = u(rng));
  auto a = smoothed_step(g, x), b = smoothed_step(g, neg);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a.values[i], -b.values[i]);
}

TEST(Relaxation, TriangleConsensus) {
  Graph g = oracle::complete_graph(3);
  auto x = relax_to_fixed_point(g, StateVector::filled(3, 1), kB, 1e-10, 100000);
  double expected = oracle::consensus_fixed_point(3.0, kB);
  for (double v : x.values) {
    EXPECT_GT(v, 0.99);
    EXPECT_LT(v, 1.0);
    EXPECT_NEAR(v, expected, 1e-10);
  }
  EXPECT_LT(fixed_point_residual(g, x), 1e-8);
}

TEST(Relaxation, AllZeroIsExact) {
  Graph g = oracle::gnp(12, 0.3, 5);
  std::size_t iterations = 0;
  auto x = relax_to_fixed_point(g, StateVector::filled(12, 0), kB, 1e-10, 100000, &iterations);
  for (double v : x.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(iterations, 1u);
  EXPECT_EQ(fixed_point_residual(g, x), 0.0);
}

TEST(Relaxation, KeepsSignPattern) {
  for (bool zeros : {false, true}) {
    for (auto& [g, state] : random_fixed_points(40, 60, zeros, zeros ? 3 : 4)) {
      auto x = relax_to_fixed_point(g, state, kB, 1e-10, 100000);
      EXPECT_LT(fixed_point_residual(g, x), 1e-8);
      for (std::size_t i = 0; i < state.size(); ++i) {
        if (state[i] > 0) {
          EXPECT_GT(x.values[i], 0.5);
        }
        if (state[i] < 0) {
          EXPECT_LT(x.values[i], -0.5);
        }
        if (state[i] == 0) {
          EXPECT_LT(std::abs(x.values[i]), 0.5);
        }
      }
    }
  }
}

TEST(Relaxation, ReportsNonConvergence) {
  Graph g = oracle::path_graph(4);
  try {
    relax_to_fixed_point(g, StateVector::filled(4, 1), kB, 1e-300, 3);
    FAIL();
  } catch (const RelaxationError& e) {
    EXPECT_GE(e.residual(), 0.0);
  }
}

TEST(Jacobian, EdgelessAtZero) {
  Graph g = oracle::edgeless_graph(4);
  SmoothedState x{std::vector<double>(4, 0.0), kB};
  SparseMatrix j = jacobian(g, x);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(j.at(i, k), i == k ? kTwoBOverPi : 0.0);
  }
  EXPECT_NEAR(kTwoBOverPi, 63.662, 1e-3);
}

TEST(Jacobian, PatternIsAdjacencyPlusIdentity) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Graph g = oracle::gnp(25, 0.2, 6);
  SmoothedState x{std::vector<double>(25), kB};
  for (double& v : x.values) v = u(rng);
  SparseMatrix j = jacobian(g, x);
  auto dense = oracle::rational_jacobian(g, x);
  for (std::size_t a = 0; a < 25; ++a) {
    for (std::size_t b = 0; b < 25; ++b) {
      bool structural = a == b || g.has_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));
      EXPECT_EQ(j.at(a, b) > 0.0, structural);
      EXPECT_GE(j.at(a, b), 0.0);
      EXPECT_DOUBLE_EQ(j.at(a, b), dense[a][b]);
    }
  }
}

TEST(Jacobian, TwoFormsAgreeAtFixedPoints) {
  const double tol = 1e-10;
  for (bool zeros : {false, true}) {
    for (auto& [g, state] : random_fixed_points(30, 50, zeros, zeros ? 7 : 8)) {
      auto x = relax_to_fixed_point(g, state, kB, tol, 100000);
      auto a = oracle::cos2_jacobian(g, x);
      auto b = oracle::rational_jacobian(g, x);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[i][k], b[i][k], 10 * tol);
    }
  }
}

TEST(SpectralRadius, EdgelessAtZero) {
  Graph g = oracle::edgeless_graph(5);
  EXPECT_NEAR(spectral_radius(g, SmoothedState{std::vector<double>(5, 0.0), kB}, 1e-10), kTwoBOverPi, 1e-9);
}

TEST(SpectralRadius, ZeroScaling) {
  Graph g = oracle::gnp(10, 0.4, 9);
  std::vector<double> d(10, 0.0);
  EXPECT_EQ(spectral_radius(g, d, 1e-10), 0.0);
  // The cos^2 scaling vanishes at |x| = 1.
  SmoothedState ones{std::vector<double>(10, 1.0), kB};
  auto dense = oracle::cos2_jacobian(g, ones);
  for (std::size_t i = 0; i < 10; ++i) d[i] = dense[i][i];
  EXPECT_NEAR(spectral_radius(g, d, 1e-10), 0.0, 1e-25);
}

TEST(SpectralRadius, PathConsensusMatchesDense) {
  Graph g = oracle::path_graph(5);
  auto x = relax_to_fixed_point(g, StateVector::filled(5, 1), kB, 1e-10, 100000);
  double rho = spectral_radius(g, x, 1e-10);
  EXPECT_LT(rho, 1.0);
  EXPECT_NEAR(rho, oracle::dense_spectral_radius(oracle::rational_jacobian(g, x)), 1e-6 * rho);
}

TEST(SpectralRadius, MatchesDenseOnRandomGraphs) {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::uint32_t s = 0; s < 40; ++s) {
    std::size_t n = 3 + s % 48;
    Graph g = oracle::gnp(n, 0.15, 100 + s);
    SmoothedState x{std::vector<double>(n), s % 2 ? kB : 1.0};
    for (double& v : x.values) v = u(rng);
    double rho = spectral_radius(g, x, 1e-12);
    EXPECT_NEAR(rho, oracle::dense_spectral_radius(oracle::rational_jacobian(g, x)), 1e-6 * rho);
  }
}

TEST(SpectralRadius, StarWithUnitScaling) {
  // Eigenvalues of A + I on a star with 6 leaves: 1 + sqrt(6), 1 - sqrt(6), and 1.
  Graph g = oracle::star_graph(6);
  std::vector<double> d(7, 1.0);
  double rho = spectral_radius(g, d, 1e-12);
  std::vector<std::vector<double>> m(7, std::vector<double>(7, 0.0));
  for (std::size_t i = 0; i < 7; ++i) {
    m[i][i] = 1.0;
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) m[i][j] = 1.0;
  }
  EXPECT_NEAR(rho, oracle::dense_spectral_radius(m), 1e-9);
  EXPECT_NEAR(rho, 1.0 + std::sqrt(6.0), 1e-9);
}

TEST(Classify, ConsensusIsStable) {
  for (std::uint32_t s = 0; s < 20; ++s) {
    Graph g = oracle::gnp(30, 0.2, 200 + s);
    if (connected_components(g).size() != 1) continue;
    for (int sign : {-1, 1}) {
      auto report = classify_stability(g, fixed(StateVector::filled(30, static_cast<Opinion>(sign))));
      EXPECT_EQ(report.verdict, Verdict::Stable);
      EXPECT_LT(report.spectral_radius, 1.0);
      EXPECT_EQ(report.zeros_in_state, 0u);
    }
  }
}

TEST(Classify, NeutralMiddleOfPathIsUnstable) {
  Graph g = oracle::path_graph(3);
  auto report = classify_stability(g, fixed(sv({1, 0, -1})));
  EXPECT_EQ(report.verdict, Verdict::Unstable);
  EXPECT_GE(report.spectral_radius, kTwoBOverPi);
  EXPECT_EQ(report.zeros_in_state, 1u);
  EXPECT_LT(report.residual, 1e-8);
}

TEST(Classify, AllZeroIsUnstable) {
  Graph g = oracle::gnp(15, 0.3, 11);
  auto report = classify_stability(g, fixed(StateVector::filled(15, 0)));
  EXPECT_EQ(report.verdict, Verdict::Unstable);
  EXPECT_GE(report.spectral_radius, kTwoBOverPi);
}

TEST(Classify, RandomFixedPoints) {
  for (auto& [g, state] : random_fixed_points(40, 100, false, 12)) {
    auto report = classify_stability(g, fixed(state));
    EXPECT_EQ(report.verdict, Verdict::Stable) << "rho " << report.spectral_radius;
  }
  for (auto& [g, state] : random_fixed_points(40, 100, true, 13)) {
    auto report = classify_stability(g, fixed(state));
    EXPECT_EQ(report.verdict, Verdict::Unstable);
    EXPECT_LT(report.residual, 1e-10);
  }
}

// Where no neutral node touches a nonzero one the relaxed neutral values are
// exactly 0, the zero node's diagonal entry is exactly 2B/pi and bounds rho.
TEST(Classify, DiagonalBoundOnIsolatedNeutralRegions) {
  std::size_t checked = 0;
  for (auto& [g, state] : random_fixed_points(200, 60, true, 14)) {
    bool isolated = true;
    for (std::size_t v = 0; v < state.size() && isolated; ++v) {
      if (state[v] != 0) continue;
      for (NodeId w : g.neighbors(static_cast<NodeId>(v))) isolated = isolated && state[w] == 0;
    }
    if (!isolated) continue;
    ++checked;
    auto report = classify_stability(g, fixed(state));
    EXPECT_GE(report.spectral_radius, kTwoBOverPi * (1.0 - 1e-12));
  }
  EXPECT_GT(checked, 0u);
}

// An antisymmetric pair of adjacent neutral nodes has no smoothed root near 0;
// the relaxed point moves well away from the discrete zeros.
TEST(Classify, AdjacentNeutralPairLeavesZero) {
  for (auto& [g, state] : random_fixed_points(40, 100, true, 13)) {
    auto report = classify_stability(g, fixed(state));
    if (report.spectral_radius >= 1.0 && report.spectral_radius < 10.0) {
      double largest = 0.0;
      for (std::size_t v = 0; v < state.size(); ++v) {
        if (state[v] == 0) largest = std::max(largest, std::abs(report.fixed_point.values[v]));
      }
      EXPECT_GT(largest, 0.5);
      return;
    }
  }
  FAIL() << "no low-rho zero-bearing case in this sample";
}

TEST(Classify, RequiresFixedPoint) {
  SteadyStateResult r = fixed(StateVector::filled(3, 1));
  r.status = Convergence::Cycle;
  r.period = 2;
  EXPECT_THROW(classify_stability(oracle::path_graph(3), r), std::invalid_argument);
}
