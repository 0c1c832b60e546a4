#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nhqm/swanson.hpp"
#include "test_util.hpp"

using namespace nhqm;
using nhqm::test::max_abs;

namespace {

// Time-dependent auxiliary functions and coefficients built to satisfy every
// constraint: the real parts solve the algebraic relations and the imaginary
// parts are fixed by the two differential constraints.
struct Fixture {
  static double phi(double t) { return 0.1 + 0.02 * std::sin(t); }
  static double phi_dot(double t) { return 0.02 * std::cos(t); }
  static double chi(double t) { return -0.9 + 0.05 * std::cos(t); }
  static double chi_dot(double t) { return -0.05 * std::sin(t); }
  static double theta(double t) { return phi(t) * phi(t) - chi(t); }
  static double theta_dot(double t) { return 2 * phi(t) * phi_dot(t) - chi_dot(t); }

  static constexpr double kBeta = 0.2;

  static Complex beta(double t) { return {kBeta, phi_dot(t) / (2 * theta(t))}; }
  static Complex omega(double t) {
    const double p = phi(t), c = chi(t);
    const double bi = beta(t).imag();
    const double wi = ((p * p + c) * bi - p * theta_dot(t) / (2 * theta(t)) + phi_dot(t) / 2) / p;
    return {(p * p + c) * kBeta / p, wi};
  }
  static Complex alpha(double t) {
    return {chi(t) * kBeta, phi(t) * omega(t).imag() - chi(t) * beta(t).imag()};
  }

  static SwansonCoefficients coeffs() { return {omega, alpha, beta}; }
  static AuxiliaryFunctions aux() { return {phi, chi, theta}; }
};

Operator commutator_block(const Operator& a, const Operator& b, Index n) { return commutator(a, b).topLeftCorner(n, n); }

}  // namespace

TEST(Su11, CommutationRelationsOnLowBlock) {
  const Su11Generators g = su11_generators(30);
  const Index b = 26;
  EXPECT_LT(max_abs(commutator_block(g.k0, g.kplus, b) - g.kplus.topLeftCorner(b, b)), 1e-13);
  EXPECT_LT(max_abs(commutator_block(g.k0, g.kminus, b) + g.kminus.topLeftCorner(b, b)), 1e-13);
  EXPECT_LT(max_abs(commutator_block(g.kminus, g.kplus, b) - 2.0 * g.k0.topLeftCorner(b, b)), 1e-12);
  EXPECT_NEAR(g.k0(3, 3).real(), 0.5 * 3.5, 1e-15);
}

TEST(Swanson, StaticConstraintSolution) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  EXPECT_NEAR(s.phi, 1.0 - 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.chi, 0.5, 1e-15);
  EXPECT_NEAR(s.vartheta0, 1.0 - std::sqrt(2.0), 1e-15);
  const auto r = constraint_residuals(2.0, 0.5, 1.0, s.phi, s.chi, s.vartheta0, 0.0, 0.0);
  for (double x : r) EXPECT_LT(x, 1e-15);

  const StaticSolution herm = static_constraint_solution(1.0, 0.0, 0.0);
  EXPECT_EQ(herm.phi, 0.0);
  EXPECT_EQ(herm.chi, -1.0);
  EXPECT_EQ(herm.vartheta0, 1.0);

  auto kind_of = [](double w, double a, double b) {
    try {
      static_constraint_solution(w, a, b);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::UsageError;
  };
  EXPECT_EQ(kind_of(2.0, 0.5, 0.0), ErrorKind::ConstraintViolation);
  EXPECT_EQ(kind_of(2.0, 0.0, 1.0), ErrorKind::SingularTheta);
  EXPECT_EQ(kind_of(1.0, 1.0, 1.0), ErrorKind::ComplexSpectrum);
}

TEST(Swanson, StaticPhaseIsMinusEnergyTimesT) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  const auto grid = uniform_grid(0.0, 3.0, 300);
  const AuxiliaryFunctions aux = AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0);
  for (int n = 0; n < 4; ++n) {
    const GammaPhase g = gamma_phase(SwansonCoefficients::constant(2.0, 0.5, 1.0), aux, 0.5 * (n + 0.5), grid);
    EXPECT_NEAR(g.gamma.back(), -std::sqrt(2.0) * (n + 0.5) * 3.0, 1e-12) << n;
    EXPECT_LT(std::abs(g.gamma_imag.back()), 1e-12);
    EXPECT_LT(g.max_u, 1e-14);
    EXPECT_LT(g.max_v, 1e-14);
  }
}

TEST(Swanson, PhaseScalesInverselyWithHbar) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  const auto grid = uniform_grid(0.0, 1.0, 10);
  const AuxiliaryFunctions aux = AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0);
  const auto c = SwansonCoefficients::constant(2.0, 0.5, 1.0);
  EXPECT_NEAR(gamma_phase(c, aux, 0.25, grid, 2.0).gamma.back(), 0.5 * gamma_phase(c, aux, 0.25, grid, 1.0).gamma.back(),
              1e-14);
}

TEST(Swanson, InvariantMapsToK0UnderDysonMap) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  const Index n = 40;
  const InvariantPair ip = build_invariant_pair(AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0), n, {0.0});
  const DysonMap d = swanson_dyson_map(s.phi, s.vartheta0, n);
  const Su11Generators g = su11_generators(n);
  EXPECT_LT(max_abs((d.rho * ip.i_ph[0] - g.k0 * d.rho).topLeftCorner(10, 10)), 1e-12);
  EXPECT_LT(max_abs(ip.i_h[0] - g.k0), 1e-14);
  EXPECT_LT(max_abs((d.rho * d.rho_inv - Operator::Identity(n, n)).topLeftCorner(10, 10)), 1e-10);
  EXPECT_NEAR(ip.k_n[2], 1.25, 1e-15);
}

TEST(Swanson, InvariantModesAreEigenvectors) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  const Index n = 40;
  const InvariantPair ip = build_invariant_pair(AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0), n, {0.0});
  const DysonMap d = swanson_dyson_map(s.phi, s.vartheta0, n);
  const auto modes = swanson_modes(ip.i_ph[0], d.rho, ip.k_n, 5);
  for (int k = 0; k < 5; ++k) {
    const StateVector& v = modes[static_cast<std::size_t>(k)];
    EXPECT_LT((ip.i_ph[0] * v - ip.k_n[static_cast<std::size_t>(k)] * v).norm() / v.norm(), 1e-8) << k;
    EXPECT_NEAR(std::abs((d.rho * v)[k] - 1.0), 0.0, 1e-10);
  }
}

TEST(Swanson, VonNeumannResidualOfStaticInvariant) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  const Index n = 40;
  const auto grid = uniform_grid(0.0, 1.0, 20);
  const InvariantPair ip = build_invariant_pair(AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0), n, grid);
  const auto res = von_neumann_residual({grid, ip.i_ph}, swanson_model(SwansonCoefficients::constant(2.0, 0.5, 1.0), n),
                                        1.0, n / 2);
  for (double r : res) EXPECT_LT(r, 1e-13);
}

TEST(Swanson, BchParametersReproduceExponential) {
  // With epsilon > 0 the truncated exponential has entries of size e^{epsilon N}
  // and is no oracle; epsilon < 0 covers the inverse maps.
  const Index n = 80;
  const Su11Generators g = su11_generators(n);
  for (auto [eps, mu] : {std::pair{-0.3, 0.1}, std::pair{-0.4, 0.15}, std::pair{-1.0, -0.2}}) {
    const AuxiliaryParams p = auxiliary_from_epsilon_mu(eps, mu);
    EXPECT_NEAR(p.vartheta0, p.phi * p.phi - p.chi, 1e-13);
    const Operator exact = expm(2.0 * eps * g.k0 + 2.0 * mu * (g.kminus + g.kplus));
    const DysonMap d = swanson_dyson_map(p.phi, p.vartheta0, n);
    EXPECT_LT(max_abs((exact - d.rho).topLeftCorner(12, 12)), 1e-10) << eps << " " << mu;
  }
  try {
    auxiliary_from_epsilon_mu(0.1, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolation);
  }
}

TEST(Swanson, FixtureSatisfiesConstraints) {
  for (double t : {0.0, 0.7, 1.9, 4.0}) {
    const auto r = constraint_residuals(Fixture::omega(t), Fixture::alpha(t), Fixture::beta(t), Fixture::phi(t),
                                        Fixture::chi(t), Fixture::theta(t), Fixture::phi_dot(t), Fixture::theta_dot(t));
    for (double x : r) EXPECT_LT(x, 1e-14) << t;
  }
  EXPECT_NEAR(derivative(Fixture::phi, 0.4), Fixture::phi_dot(0.4), 1e-12);
}

TEST(Swanson, DeltaFlowTracksInvariantCoefficients) {
  auto exact = [](double t) {
    const double p = Fixture::phi(t), c = Fixture::chi(t), th = Fixture::theta(t);
    return DeltaState{-(p * p + c) / (2 * th), -c * p / (2 * th), -p / (2 * th)};
  };
  const auto grid = uniform_grid(0.0, 3.0, 3000);
  const DeltaSamples d = delta_odes(Fixture::coeffs(), exact(0.0), grid);
  for (std::size_t k = 0; k < grid.size(); k += 500) {
    const DeltaState e = exact(grid[k]);
    for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(d.values[k][static_cast<std::size_t>(c)] - e[static_cast<std::size_t>(c)]), 1e-9);
  }
  EXPECT_LT(d.max_imag, 1e-9);
}

TEST(Swanson, TimeDependentPhaseIsRealAndUVVanish) {
  const auto grid = uniform_grid(0.0, 2.0, 400);
  const GammaPhase g = gamma_phase(Fixture::coeffs(), Fixture::aux(), 0.25, grid);
  EXPECT_LT(g.max_u, 1e-10);
  EXPECT_LT(g.max_v, 1e-10);
  EXPECT_LT(g.max_constraint, 1e-14);
  for (double x : g.gamma_imag) EXPECT_LT(std::abs(x), 1e-9);
}

TEST(Swanson, ConstraintViolationDetected) {
  const StaticSolution s = static_constraint_solution(2.0, 0.5, 1.0);
  const auto grid = uniform_grid(0.0, 1.0, 10);
  try {
    gamma_phase(SwansonCoefficients::constant(2.0, 0.6, 1.0), AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0),
                0.25, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolation);
  }
  try {
    build_invariant_pair(AuxiliaryFunctions::constant(1.0, 1.0, 0.0), 10, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularTheta);
  }
}

TEST(Swanson, AssembledSolutionSolvesTimeDependentSchrodinger) {
  const Index n = 40;
  const int levels = 3;
  const auto grid = uniform_grid(0.0, 2.0, 800);
  const auto coeffs = Fixture::coeffs();
  const auto aux = Fixture::aux();
  const InvariantPair ip = build_invariant_pair(aux, n, grid);
  std::vector<std::vector<double>> gammas;
  std::vector<std::vector<StateVector>> modes(levels);
  std::vector<Operator> rhos;
  for (int k = 0; k < levels; ++k) gammas.push_back(gamma_phase(coeffs, aux, ip.k_n[static_cast<std::size_t>(k)], grid).gamma);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const DysonMap d = swanson_dyson_map(aux.phi(grid[s]), aux.vartheta0(grid[s]), n);
    rhos.push_back(d.rho);
    const auto m = swanson_modes(ip.i_ph[s], d.rho, ip.k_n, levels);
    for (int k = 0; k < levels; ++k) modes[static_cast<std::size_t>(k)].push_back(m[static_cast<std::size_t>(k)]);
  }
  const std::vector<Complex> cn{1.0, Complex(0.0, 0.5), 0.25};
  const Trajectory tr = assemble_solution(cn, gammas, modes, grid);
  const TimeDependentModel model = swanson_model(coeffs, n);
  for (double r : schrodinger_residual(tr, model)) EXPECT_LT(r, 1e-6);

  // <Phi| rho^+ rho |Phi> is conserved.
  const double norm0 = (rhos[0] * tr.states[0]).squaredNorm();
  for (std::size_t s = 0; s < grid.size(); s += 40) EXPECT_NEAR((rhos[s] * tr.states[s]).squaredNorm() / norm0, 1.0, 1e-6);

  const Trajectory direct = integrate_schrodinger(model, tr.states.front(), 0.0, 2.0, 800);
  for (std::size_t s = 0; s < grid.size(); s += 40) {
    EXPECT_LT((direct.states[s] - tr.states[s]).norm() / tr.states[s].norm(), 1e-4) << s;
  }
}

TEST(Swanson, AssembleRejectsMismatchedGrids) {
  const std::vector<double> times{0.0, 1.0};
  try {
    assemble_solution({1.0}, {{0.0}}, {{StateVector::Ones(2), StateVector::Ones(2)}}, times);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}
