#include "nhqm/floquet.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nhqm {

const char* to_string(Stability s) { return s == Stability::Stable ? "Stable" : "Unstable"; }

Operator monodromy(const TimeDependentModel& model, double tau, std::size_t steps, double hbar) {
  if (steps < 10) throw Error(ErrorKind::UsageError, "monodromy: at least 10 steps per period are required");
  if (!(tau > 0.0)) throw Error(ErrorKind::UsageError, "monodromy: period must be positive");
  const OperatorSamples u = evolution_operator(model, 0.0, tau, steps, hbar, steps);
  return u.ops.back();
}

Complex fold_quasienergy(Complex eps, double tau, double hbar) {
  const double width = 2.0 * std::numbers::pi * hbar / tau;
  const double half = 0.5 * width;
  double re = std::remainder(eps.real(), width);  // in [-half, half]
  if (re <= -half) re += width;
  return {re, eps.imag()};
}

UnfoldedQuasienergy unfold_quasienergy(double strip_value, double reference, double tau, double hbar) {
  const double quantum = 2.0 * std::numbers::pi * hbar / tau;
  UnfoldedQuasienergy u;
  u.k = std::lround((reference - strip_value) / quantum);
  u.value = strip_value + static_cast<double>(u.k) * quantum;
  return u;
}

namespace {

std::vector<std::pair<Index, Index>> complex_pairs(const Eigen::VectorXcd& eps, double tol_scale, double residual_tol) {
  const Index n = eps.size();
  std::vector<bool> offending(static_cast<std::size_t>(n), false), used(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k) offending[static_cast<std::size_t>(k)] = std::abs(eps[k].imag()) > residual_tol * tol_scale;
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i) {
    if (!offending[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(i)]) continue;
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j == i || used[static_cast<std::size_t>(j)] || !offending[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(eps[j] - std::conj(eps[i]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[static_cast<std::size_t>(i)] = true;
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      pairs.emplace_back(std::min(i, best), std::max(i, best));
    } else {
      pairs.emplace_back(i, i);
    }
  }
  return pairs;
}

double stability_scale(const Eigen::VectorXcd& eps) {
  double m = 0.0;
  for (Index k = 0; k < eps.size(); ++k) m = std::max(m, std::abs(eps[k]));
  return 1.0 + m;
}

}  // namespace

FloquetResult floquet_decompose(const OperatorSamples& u_samples, double tau, double hbar, const ToleranceConfig& cfg,
                                double max_condition) {
  if (u_samples.ops.empty() || u_samples.ops.size() != u_samples.times.size()) {
    throw Error(ErrorKind::GridMismatch, "floquet_decompose: empty or inconsistent samples");
  }
  if (!(tau > 0.0)) throw Error(ErrorKind::UsageError, "floquet_decompose: period must be positive");
  FloquetResult fr;
  fr.period = tau;
  fr.hbar = hbar;
  fr.monodromy = u_samples.ops.back();
  const BiorthogonalSpectrum s = eig_general(fr.monodromy, cfg);
  if (!(s.condition <= max_condition)) {
    throw Error(ErrorKind::DefectiveMonodromy,
                "floquet_decompose: monodromy eigenvector condition number " + std::to_string(s.condition));
  }
  const Index n = s.size();
  Eigen::VectorXcd eps(n);
  for (Index k = 0; k < n; ++k) {
    const Complex lam = s.eigenvalues[k];
    if (std::abs(lam) == 0.0) throw Error(ErrorKind::DefectiveMonodromy, "floquet_decompose: monodromy is singular");
    eps[k] = fold_quasienergy(Complex(0.0, hbar / tau) * std::log(lam), tau, hbar);
  }
  const auto order = spectral_order(eps, 64 * std::numeric_limits<double>::epsilon() * stability_scale(eps));
  fr.quasienergies.resize(n);
  fr.modes.eigenvalues.resize(n);
  fr.modes.right.resize(n, n);
  fr.modes.left.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    fr.quasienergies[k] = eps[src];
    fr.modes.right.col(k) = s.right.col(src);
    fr.modes.left.col(k) = s.left.col(src);
  }
  fr.modes.eigenvalues = fr.quasienergies;
  fr.modes.condition = s.condition;
  fr.modes.degeneracy_flags.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && std::abs(fr.quasienergies[i] - fr.quasienergies[j]) < cfg.degeneracy_gap) {
        fr.modes.degeneracy_flags[static_cast<std::size_t>(i)] = true;
      }
    }
  }
  fr.generator = fr.modes.right * fr.quasienergies.asDiagonal() * fr.modes.left.adjoint();

  const double t0 = u_samples.times.front();
  fr.z_samples.times = u_samples.times;
  for (std::size_t k = 0; k < u_samples.size(); ++k) {
    const double t = u_samples.times[k] - t0;
    // exp(+i M t / hbar) through the eigendecomposition of M.
    Eigen::VectorXcd phase(n);
    for (Index j = 0; j < n; ++j) phase[j] = std::exp(Complex(0.0, t / hbar) * fr.quasienergies[j]);
    fr.z_samples.ops.push_back(u_samples.ops[k] * (fr.modes.right * phase.asDiagonal() * fr.modes.left.adjoint()));
  }
  fr.stability = classify_stability(fr, cfg);
  if (fr.stability == Stability::Unstable) {
    fr.unstable_pairs = complex_pairs(fr.quasienergies, stability_scale(fr.quasienergies), cfg.residual_tol);
  }
  return fr;
}

Stability classify_stability(const FloquetResult& fr, const ToleranceConfig& cfg) {
  const double scale = stability_scale(fr.quasienergies);
  for (Index k = 0; k < fr.quasienergies.size(); ++k) {
    if (std::abs(fr.quasienergies[k].imag()) > cfg.residual_tol * scale) return Stability::Unstable;
  }
  return Stability::Stable;
}

PTClassification classify_m_pt(const FloquetResult& fr, const ParityOperator& p, const ToleranceConfig& cfg) {
  return classify_pt(fr.generator, p, cfg);
}

}  // namespace nhqm
