#pragma once

#include <array>
#include <functional>
#include <vector>

#include "nhqm/dynamics.hpp"

namespace nhqm {

// H(t) = omega (a^+ a + 1/2) + alpha a^2 + beta a^+2 with complex coefficients.
struct SwansonCoefficients {
  Coefficient omega;
  Coefficient alpha;
  Coefficient beta;

  static SwansonCoefficients constant(Complex omega, Complex alpha, Complex beta);
};

using RealFunction = std::function<double(double)>;

struct Su11Generators {
  Operator k0;
  Operator kplus;
  Operator kminus;
};

Su11Generators su11_generators(Index n);

TimeDependentModel swanson_model(const SwansonCoefficients& coeffs, Index n);

// Coefficients of I = d1 (a^+ a + 1/2) + d2 a^2 + d3 a^+2. They are complex
// during integration; reality is a diagnostic.
using DeltaState = std::array<Complex, 3>;

struct DeltaSamples {
  std::vector<double> times;
  std::vector<DeltaState> values;
  double max_imag = 0.0;
};

// RK4 for the Von Neumann flow of the invariant coefficients:
//   d1' = (4i/hbar)(beta d2 - alpha d3)
//   d2' = (2i/hbar)(omega d2 - alpha d1)
//   d3' = (2i/hbar)(beta d1 - omega d3)
DeltaSamples delta_odes(const SwansonCoefficients& coeffs, const DeltaState& delta0, const std::vector<double>& grid,
                        double hbar = 1.0);

// Auxiliary functions of the quadratic Dyson map
// rho = exp(-Phi K+) exp(ln(vartheta0) K0) exp(-Phi K-), vartheta0 = Phi^2 - chi.
struct AuxiliaryFunctions {
  RealFunction phi;
  RealFunction chi;
  RealFunction vartheta0;

  static AuxiliaryFunctions constant(double phi, double chi, double vartheta0);
};

// The Dyson-map parameters of rho = exp(epsilon (a^+a + 1/2) + mu a^2 + mu a^+2)
// for real mu.
struct AuxiliaryParams {
  double epsilon = 0.0;
  double mu = 0.0;
  double theta = 0.0;
  double vartheta0 = 1.0;
  double vartheta_plus = 0.0;
  double vartheta_minus = 0.0;
  double phi = 0.0;
  double chi = -1.0;
};

// Throws ConstraintViolation when epsilon^2 - 4 mu^2 <= 0.
AuxiliaryParams auxiliary_from_epsilon_mu(double epsilon, double mu);

// Residuals of the two differential constraints and of the three algebraic
// relations (max of the three), in that order.
std::array<double, 3> constraint_residuals(Complex omega, Complex alpha, Complex beta, double phi, double chi,
                                           double vartheta0, double phi_dot, double vartheta0_dot, double hbar = 1.0);

struct StaticSolution {
  double phi = 0.0;
  double chi = 0.0;
  double vartheta0 = 0.0;
};

// Closed-form (Phi, chi) for constant real coefficients, on the root that
// gives the phase -E_n t.
StaticSolution static_constraint_solution(double omega, double alpha, double beta);

struct InvariantPair {
  std::vector<double> times;
  std::vector<Operator> i_ph;
  std::vector<Operator> i_h;
  std::vector<double> k_n;
};

// I^PH = -(1/vartheta0)[(Phi^2 + chi) K0 + chi Phi K- + Phi K+], normalized so
// that its Hermitian image is exactly K0.
InvariantPair build_invariant_pair(const AuxiliaryFunctions& aux, Index n, const std::vector<double>& grid);

struct DysonMap {
  Operator rho;
  Operator rho_inv;
};

DysonMap swanson_dyson_map(double phi, double vartheta0, Index n);

// Right eigenvectors phi_n of the truncated invariant for the lowest `levels`
// values k_n, scaled so that <n| rho phi_n> = 1. Columns of the truncated
// rho^-1 are not used because they converge poorly; the truncated invariant
// is diagonally similar to a symmetric matrix, so its low eigenpairs do.
// Throws NotInvariant when an eigenvalue misses its k_n by more than `tol`.
std::vector<StateVector> swanson_modes(const Operator& i_ph, const Operator& rho, const std::vector<double>& k_n,
                                       int levels, double tol = 1e-6);

struct GammaPhase {
  std::vector<double> times;
  std::vector<double> gamma;        // real phase for the requested k_n
  std::vector<double> gamma_imag;   // k_n integral of 2 Im W / hbar, zero when W is real
  std::vector<Complex> w, u, v;
  double max_constraint = 0.0;      // largest algebraic-relation residual on the grid
  double max_u = 0.0;
  double max_v = 0.0;
};

GammaPhase gamma_phase(const SwansonCoefficients& coeffs, const AuxiliaryFunctions& aux, double k_n,
                       const std::vector<double>& grid, double hbar = 1.0, double constraint_tol = 1e-8);

// |Phi(t)> = sum_n C_n e^{i gamma_n(t)} |phi_n(t)>.
Trajectory assemble_solution(const std::vector<Complex>& cn, const std::vector<std::vector<double>>& gammas,
                             const std::vector<std::vector<StateVector>>& modes, const std::vector<double>& times);

// Time derivative of a smooth scalar function by a five-point stencil.
double derivative(const RealFunction& f, double t, double h = 1e-3);

}  // namespace nhqm
