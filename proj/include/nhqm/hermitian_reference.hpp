#pragma once

#include <array>
#include <vector>

#include "nhqm/dynamics.hpp"
#include "nhqm/linalg.hpp"

namespace nhqm {

struct ParameterPath {
  std::vector<Operator> samples;
  bool closed = true;
};

struct BerryResult {
  std::vector<double> phases;                     // one per band, principal value in (-pi, pi]
  std::vector<std::vector<double>> band_energies;  // [band][sample]
  double min_gap = 0.0;
  double phase = 0.0;                              // phases[band] for the requested band
};

// (T^2 / hbar^2)(<Hbar^2> - <Hbar>^2), Hbar the average of the model over s in [0, 1].
double sudden_error_estimate(const TimeDependentModel& model, const StateVector& psi0, double T, double hbar = 1.0);

// 1 - |<psi0|U_T|psi0>|^2 with U_T generated by H(t / T) over t in [0, T].
double sudden_error_exact(const TimeDependentModel& model, const StateVector& psi0, double T, double hbar = 1.0,
                          std::size_t steps = 2000);

// -Im log prod_k <v_k|v_{k+1}> around a closed loop of states; the first
// state closes the loop and must not be repeated at the end.
double berry_phase_from_states(const std::vector<StateVector>& loop);

BerryResult discrete_berry_phase(const ParameterPath& path, Index band, const ToleranceConfig& cfg = {});

std::array<double, 3> berry_curvature_sum(const Operator& h, const std::array<Operator, 3>& grad_h, Index band,
                                          const BiorthogonalSpectrum& spec, const ToleranceConfig& cfg = {});

// hbar * sup |<phi_i|d phi_j/ds> / (lambda_i - lambda_j)| over i != j, s in [0, 1].
double adiabatic_metric(const ParameterPath& path, double hbar = 1.0, const ToleranceConfig& cfg = {});

struct LewisRiesenfeldPhase {
  std::vector<double> times;
  std::vector<double> alpha;
  std::vector<StateVector> modes;  // eigenvectors of I(t) in the gauge used for alpha
  double max_imag = 0.0;           // largest imaginary part dropped from the quadrature
  double max_von_neumann = 0.0;
};

LewisRiesenfeldPhase lewis_riesenfeld_phase(const OperatorSamples& i_samples, const TimeDependentModel& model,
                                            Index band, double hbar = 1.0, double invariant_tol = 1e-5,
                                            const ToleranceConfig& cfg = {});

}  // namespace nhqm
