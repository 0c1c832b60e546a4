#pragma once

#include <vector>

#include "nhqm/dynamics.hpp"
#include "nhqm/floquet.hpp"

namespace nhqm {

// H(t) = p^2/2m + m omega0^2 x^2 / 2 - i lambda cos(omega t + phi) x.
struct OscillatorParams {
  double m = 1.0;
  double omega0 = 1.0;
  double lambda = 0.0;
  double omega = 2.0;
  double phi = 0.0;
  double hbar = 1.0;

  double period() const;
};

struct FockOperators {
  Operator a;
  Operator adag;
  Operator x;
  Operator p;
};

FockOperators fock_operators(Index n, double m = 1.0, double omega0 = 1.0, double hbar = 1.0);

// The quadratic part is taken as hbar omega0 (a^+ a + 1/2), which is exact on
// the truncated basis.
Operator build_hamiltonian(const OscillatorParams& params, Index n, double t);
TimeDependentModel oscillator_model(const OscillatorParams& params, Index n);

struct ClassicalSolution {
  Complex x_c;  // lambda cos(omega t + phi) / (m (omega0^2 - omega^2))
  Complex p_c;  // m dx_c/dt = -i lambda omega sin(omega t + phi) / (omega0^2 - omega^2)
};

ClassicalSolution classical_solution(const OscillatorParams& params, double t);

double quasienergy_closed_form(const OscillatorParams& params, int n);

// Closed-form Floquet mode with the real centre x_c and the standard phase
// factors. It is quasi-periodic but only approximately solves the
// position-space equation, see floquet_mode_exact.
std::vector<Complex> floquet_mode(const OscillatorParams& params, int n, const std::vector<double>& x_grid, double t);

// Exact solution of i hbar dPsi/dt = H Psi in position space. The wave packet
// is centred on the complex trajectory X = i x_c with momentum P = m dX/dt,
// so the Gaussian and the Hermite factor take complex arguments. Equal to
// the stationary eigenfunction times exp(-i E_n t / hbar) when lambda = 0.
std::vector<Complex> floquet_mode_exact(const OscillatorParams& params, int n, const std::vector<double>& x_grid,
                                        double t);

struct QuasienergyMatch {
  int n = 0;
  Index index = 0;        // position in FloquetResult::quasienergies
  double weight = 0.0;    // |<n|phi_j><chi_j|n>| of the selected mode
  Complex strip;          // numerical value in the fundamental strip
  double unfolded = 0.0;  // strip value shifted by k hbar omega
  long k = 0;
  double closed_form = 0.0;
  double relative_error = 0.0;
};

// Pairs Fock level n with the Floquet mode of largest spectral weight on |n>
// and unfolds its quasi-energy against the closed form.
std::vector<QuasienergyMatch> match_quasienergies(const FloquetResult& fr, const OscillatorParams& params, int n_max);

}  // namespace nhqm
