#pragma once

#include <utility>
#include <vector>

#include "nhqm/dynamics.hpp"
#include "nhqm/symmetry.hpp"

namespace nhqm {

enum class Stability { Stable, Unstable };

const char* to_string(Stability s);

struct FloquetResult {
  double period = 0.0;
  Operator monodromy;
  Operator generator;                    // M with U(tau) = exp(-i M tau / hbar)
  Eigen::VectorXcd quasienergies;        // real parts folded into (-pi hbar/tau, pi hbar/tau]
  BiorthogonalSpectrum modes;            // eigenvectors of M, ordered like quasienergies
  OperatorSamples z_samples;             // Z(t_k) = U(t_k) exp(+i M (t_k - t_0) / hbar)
  Stability stability = Stability::Stable;
  std::vector<std::pair<Index, Index>> unstable_pairs;
  double hbar = 1.0;
};

inline constexpr double kMaxMonodromyCondition = 1e8;

Operator monodromy(const TimeDependentModel& model, double tau, std::size_t steps, double hbar = 1.0);

// Uses the last sample as U(tau). Throws DefectiveMonodromy when the
// eigenvector matrix of U(tau) is worse conditioned than `max_condition`.
FloquetResult floquet_decompose(const OperatorSamples& u_samples, double tau, double hbar = 1.0,
                                const ToleranceConfig& cfg = {}, double max_condition = kMaxMonodromyCondition);

Stability classify_stability(const FloquetResult& fr, const ToleranceConfig& cfg = {});
PTClassification classify_m_pt(const FloquetResult& fr, const ParityOperator& p, const ToleranceConfig& cfg = {});

// Folds Re(eps) into (-pi hbar / tau, pi hbar / tau].
Complex fold_quasienergy(Complex eps, double tau, double hbar = 1.0);

struct UnfoldedQuasienergy {
  double value = 0.0;  // strip value plus k hbar omega
  long k = 0;
};

// Adds the multiple of hbar*omega (omega = 2 pi / tau) that brings a strip
// value closest to `reference`.
UnfoldedQuasienergy unfold_quasienergy(double strip_value, double reference, double tau, double hbar = 1.0);

}  // namespace nhqm
