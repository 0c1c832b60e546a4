#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nhqm/driven_oscillator.hpp"
#include "test_util.hpp"

using namespace nhqm;
using nhqm::test::max_abs;

namespace {

OscillatorParams reference_params() {
  OscillatorParams p;
  p.m = 1.0;
  p.omega0 = 1.0;
  p.lambda = 0.1;
  p.omega = 2.0;
  p.phi = 0.0;
  p.hbar = 1.0;
  return p;
}

}  // namespace

TEST(Fock, LadderOperatorsAndQuadratures) {
  const FockOperators f = fock_operators(8, 1.0, 1.0, 1.0);
  const Operator c = commutator(f.a, f.adag);
  for (Index k = 0; k < 7; ++k) EXPECT_NEAR(std::abs(c(k, k) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(c(7, 7).real(), -7.0, 1e-13);
  const Operator xp = commutator(f.x, f.p);
  for (Index k = 0; k < 7; ++k) EXPECT_NEAR(std::abs(xp(k, k) - Complex(0.0, 1.0)), 0.0, 1e-14);
  EXPECT_LT(max_abs(f.x - f.x.adjoint()), 1e-15);
  EXPECT_LT(max_abs(f.p - f.p.adjoint()), 1e-15);
}

TEST(Oscillator, HamiltonianStructure) {
  const OscillatorParams p = reference_params();
  const Operator h0 = build_hamiltonian(p, 6, std::numbers::pi / 4);  // cos(pi/2) = 0
  for (Index k = 0; k < 6; ++k) EXPECT_NEAR(h0(k, k).real(), k + 0.5, 1e-15);
  EXPECT_LT(max_abs(h0 - h0.adjoint()), 1e-15);
  const Operator h = build_hamiltonian(p, 6, 0.0);
  // -i lambda x is anti-Hermitian and PT-symmetric under the Fock parity.
  EXPECT_NEAR(h(0, 1).imag(), -0.1 / std::sqrt(2.0), 1e-15);
  EXPECT_LT(pt_residual(h, ParityOperator::fock(6)), 1e-15);
}

TEST(Oscillator, ClosedFormQuasienergies) {
  const OscillatorParams p = reference_params();
  // hbar omega0 (n + 1/2) + lambda^2 / (4 m (omega0^2 - omega^2)) = n + 1/2 - 1/1200.
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(quasienergy_closed_form(p, n), n + 0.5 - 1.0 / 1200.0, 1e-15);
  OscillatorParams res = p;
  res.omega = 1.0;
  try {
    quasienergy_closed_form(res, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResonanceError);
  }
}

TEST(Oscillator, ClassicalTrajectoryEquations) {
  const OscillatorParams p = reference_params();
  const double h = 1e-4;
  for (double t : {0.0, 0.4, 1.3, 2.9}) {
    const double f = p.lambda * std::cos(p.omega * t + p.phi);
    auto x = [&](double s) { return classical_solution(p, s).x_c; };
    const Complex xdd = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
    // Real particular solution of m x'' + m omega0^2 x = f.
    EXPECT_NEAR(std::abs(p.m * xdd + p.m * p.omega0 * p.omega0 * x(t) - f), 0.0, 1e-6);
    // p_c / m is the velocity of X = i x_c, which solves m X'' + m omega0^2 X = i f.
    const Complex xd = (x(t + h) - x(t - h)) / (2 * h);
    EXPECT_NEAR(std::abs(classical_solution(p, t).p_c / p.m - Complex(0.0, 1.0) * xd), 0.0, 1e-8);
  }
}

TEST(Oscillator, FloquetModeIsNormalizedAndQuasiPeriodic) {
  const OscillatorParams p = reference_params();
  std::vector<double> grid;
  const double dx = 0.01;
  for (int k = -1200; k <= 1200; ++k) grid.push_back(k * dx);
  const double tau = p.period();
  for (int n = 0; n < 3; ++n) {
    const auto psi = floquet_mode(p, n, grid, 0.0);
    double norm = 0.0;
    for (const auto& z : psi) norm += std::norm(z) * dx;
    EXPECT_NEAR(norm, 1.0, 1e-10) << n;
    const auto later = floquet_mode(p, n, grid, tau);
    const Complex phase = std::exp(Complex(0.0, -quasienergy_closed_form(p, n) * tau / p.hbar));
    double diff = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) diff = std::max(diff, std::abs(later[k] - phase * psi[k]));
    EXPECT_LT(diff, 1e-12) << n;
  }
}

namespace {

// Largest |i hbar dPsi/dt - H Psi| over the interior of the grid.
template <class Mode>
double position_space_residual(const OscillatorParams& p, Mode mode, int n, double t) {
  const double dx = 1e-3, dt = 1e-4;
  std::vector<double> grid;
  for (int k = -2000; k <= 2000; ++k) grid.push_back(k * dx);
  const auto now = mode(p, n, grid, t);
  const auto fwd = mode(p, n, grid, t + dt);
  const auto bwd = mode(p, n, grid, t - dt);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double x = grid[k];
    const Complex dpsi_dt = (fwd[k] - bwd[k]) / (2 * dt);
    const Complex lap = (now[k + 1] - 2.0 * now[k] + now[k - 1]) / (dx * dx);
    const Complex hpsi = -p.hbar * p.hbar / (2 * p.m) * lap + 0.5 * p.m * p.omega0 * p.omega0 * x * x * now[k] +
                         Complex(0.0, -p.lambda * std::cos(p.omega * t + p.phi)) * x * now[k];
    worst = std::max(worst, std::abs(Complex(0.0, p.hbar) * dpsi_dt - hpsi));
  }
  return worst;
}

}  // namespace

TEST(Oscillator, ExactModeSolvesSchrodingerEquationInPositionSpace) {
  const OscillatorParams p = reference_params();
  for (int n : {0, 2}) {
    for (double t : {0.3, 1.1}) EXPECT_LT(position_space_residual(p, floquet_mode_exact, n, t), 1e-5) << n << " " << t;
  }
  OscillatorParams shifted = p;
  shifted.phi = 0.7;
  shifted.hbar = 0.5;
  EXPECT_LT(position_space_residual(shifted, floquet_mode_exact, 1, 0.4), 1e-5);
}

TEST(Oscillator, RealCentredModeIsOnlyApproximateSolution) {
  // floquet_mode keeps the real centre x_c, which misses the imaginary
  // displacement produced by the anti-Hermitian drive.
  EXPECT_GT(position_space_residual(reference_params(), floquet_mode, 0, 0.3), 1e-3);
}

TEST(Oscillator, ExactModeIsQuasiPeriodicAndReducesToEigenfunction) {
  OscillatorParams p = reference_params();
  std::vector<double> grid;
  for (int k = -400; k <= 400; ++k) grid.push_back(0.01 * k);
  const double tau = p.period();
  for (int n = 0; n < 3; ++n) {
    const auto now = floquet_mode_exact(p, n, grid, 0.2);
    const auto later = floquet_mode_exact(p, n, grid, 0.2 + tau);
    const Complex phase = std::exp(Complex(0.0, -quasienergy_closed_form(p, n) * tau));
    double diff = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) diff = std::max(diff, std::abs(later[k] - phase * now[k]));
    EXPECT_LT(diff, 1e-12) << n;
  }
  p.lambda = 0.0;
  const auto exact = floquet_mode_exact(p, 1, grid, 0.0);
  const auto real_centred = floquet_mode(p, 1, grid, 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(std::abs(exact[k] - real_centred[k]), 0.0, 1e-15);
}

TEST(Oscillator, RealCentredGroundStateSitsOnClassicalPosition) {
  const OscillatorParams p = reference_params();
  for (double t : {0.0, 0.5, 1.3}) {
    const double xc = classical_solution(p, t).x_c.real();
    const auto v = floquet_mode(p, 0, {xc - 0.1, xc, xc + 0.1}, t);
    // Only the drift factor exp(-i p_c y) tilts the profile, and it is real.
    const double tilt = std::abs(std::exp(Complex(0.0, -1.0) * classical_solution(p, t).p_c * 0.1));
    EXPECT_NEAR(std::abs(v[2]) / std::abs(v[1]), tilt * std::exp(-0.005), 1e-12);
    EXPECT_NEAR(std::abs(v[0]) / std::abs(v[1]), std::exp(-0.005) / tilt, 1e-12);
  }
}

TEST(Oscillator, NumericalQuasienergiesMatchClosedFormAtModestTruncation) {
  const OscillatorParams p = reference_params();
  const TimeDependentModel m = oscillator_model(p, 24);
  const double tau = p.period();
  const FloquetResult fr = floquet_decompose(evolution_operator(m, 0.0, tau, 1000, 1.0, 1000), tau);
  EXPECT_EQ(fr.stability, Stability::Stable);
  for (const QuasienergyMatch& q : match_quasienergies(fr, p, 3)) {
    EXPECT_LT(q.relative_error, 1e-6) << q.n;
    EXPECT_GT(q.weight, 0.0);
  }
}
