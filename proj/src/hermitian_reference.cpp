#include "nhqm/hermitian_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace nhqm {

namespace {

struct Bands {
  Eigen::VectorXd values;
  Operator vectors;
};

Bands hermitian_bands(const Operator& h, const ToleranceConfig& cfg, const char* what) {
  require_square(h, what);
  if ((h - h.adjoint()).norm() > cfg.residual_tol * std::max(1.0, h.norm())) {
    throw Error(ErrorKind::NotHermitian, std::string(what) + ": operator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(Operator(0.5 * (h + h.adjoint())));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, std::string(what) + ": eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double smallest_gap(const Eigen::VectorXd& values) {
  double g = std::numeric_limits<double>::infinity();
  for (Index k = 1; k < values.size(); ++k) g = std::min(g, values[k] - values[k - 1]);
  return g;
}

// Rotates `v` so that <reference|v> is real and non-negative.
void align_phase(StateVector& v, const StateVector& reference) {
  const Complex ov = reference.dot(v);
  if (std::abs(ov) > 0.0) v *= std::conj(ov) / std::abs(ov);
}

// <a|b> evaluated term by term with separately rounded products. Rephasing either
// argument by a power of i then only permutes and negates the rounded terms, which
// keeps loop products exactly gauge invariant.
Complex loop_overlap(const StateVector& a, const StateVector& b) {
  double re = 0.0;
  double im = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const double ar = a[k].real();
    const double ai = a[k].imag();
    const double br = b[k].real();
    const double bi = b[k].imag();
    const double rr = ar * br;
    const double ii = ai * bi;
    const double ri = ar * bi;
    const double ir = ai * br;
    re += rr + ii;
    im += ri - ir;
  }
  return {re, im};
}

void require_band(Index band, Index dim, const char* what) {
  if (band < 0 || band >= dim) throw Error(ErrorKind::UsageError, std::string(what) + ": band index out of range");
}

}  // namespace

double sudden_error_estimate(const TimeDependentModel& model, const StateVector& psi0, double T, double hbar) {
  if (psi0.size() != model.dim()) throw Error(ErrorKind::DimensionMismatch, "sudden_error_estimate: psi0 dimension mismatch");
  constexpr int kIntervals = 128;
  const double h = 1.0 / kIntervals;
  Operator avg = Operator::Zero(model.dim(), model.dim());
  for (int k = 0; k <= kIntervals; ++k) {
    const double w = (k == 0 || k == kIntervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    avg += (w * h / 3.0) * model.at(k * h);
  }
  const double nn = psi0.squaredNorm();
  const StateVector hp = avg * psi0;
  const Complex mean = psi0.dot(hp) / nn;
  const double second = hp.squaredNorm() / nn;
  const double variance = std::max(0.0, second - std::norm(mean));
  return (T * T) / (hbar * hbar) * variance;
}

double sudden_error_exact(const TimeDependentModel& model, const StateVector& psi0, double T, double hbar,
                          std::size_t steps) {
  // In the reduced time s = t / T the equation reads i (hbar / T) d/ds psi = H(s) psi.
  const Trajectory tr = integrate_schrodinger(model, psi0, 0.0, 1.0, steps, hbar / T);
  const double nn = psi0.squaredNorm();
  const double survival = std::norm(psi0.dot(tr.states.back())) / (nn * nn);
  return 1.0 - survival;
}

double berry_phase_from_states(const std::vector<StateVector>& loop) {
  if (loop.empty()) return 0.0;
  Complex prod = 1.0;
  for (std::size_t k = 0; k < loop.size(); ++k) prod *= loop_overlap(loop[k], loop[(k + 1) % loop.size()]);
  double g = -std::arg(prod);
  if (g <= -std::numbers::pi) g += 2.0 * std::numbers::pi;
  return g;
}

BerryResult discrete_berry_phase(const ParameterPath& path, Index band, const ToleranceConfig& cfg) {
  if (path.samples.size() < 3) throw Error(ErrorKind::GridMismatch, "discrete_berry_phase: path needs at least three samples");
  const Operator& first = path.samples.front();
  const Operator& last = path.samples.back();
  require_same_dim(first, last, "discrete_berry_phase");
  if (!path.closed || (first - last).norm() > 1e-12 * std::max(1.0, first.norm())) {
    throw Error(ErrorKind::UsageError, "discrete_berry_phase: path must be closed with coinciding end points");
  }
  const Index dim = first.rows();
  require_band(band, dim, "discrete_berry_phase");
  const std::size_t k_loop = path.samples.size() - 1;

  BerryResult out;
  out.band_energies.assign(static_cast<std::size_t>(dim), std::vector<double>(path.samples.size()));
  out.min_gap = std::numeric_limits<double>::infinity();
  std::vector<std::vector<StateVector>> states(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < path.samples.size(); ++k) {
    require_same_dim(first, path.samples[k], "discrete_berry_phase");
    const Bands b = hermitian_bands(path.samples[k], cfg, "discrete_berry_phase");
    out.min_gap = std::min(out.min_gap, smallest_gap(b.values));
    for (Index n = 0; n < dim; ++n) {
      out.band_energies[static_cast<std::size_t>(n)][k] = b.values[n];
      if (k < k_loop) states[static_cast<std::size_t>(n)].push_back(b.vectors.col(n));
    }
  }
  if (dim > 1 && out.min_gap < cfg.degeneracy_gap) {
    throw Error(ErrorKind::GapClosure, "discrete_berry_phase: band gap " + std::to_string(out.min_gap) + " along the path");
  }
  for (Index n = 0; n < dim; ++n) out.phases.push_back(berry_phase_from_states(states[static_cast<std::size_t>(n)]));
  out.phase = out.phases[static_cast<std::size_t>(band)];
  return out;
}

std::array<double, 3> berry_curvature_sum(const Operator& h, const std::array<Operator, 3>& grad_h, Index band,
                                          const BiorthogonalSpectrum& spec, const ToleranceConfig& cfg) {
  require_square(h, "berry_curvature_sum");
  for (const auto& g : grad_h) require_same_dim(h, g, "berry_curvature_sum");
  require_band(band, spec.size(), "berry_curvature_sum");
  std::array<Complex, 3> acc{0.0, 0.0, 0.0};
  const StateVector bra_i = spec.chi(band);
  const StateVector ket_i = spec.phi(band);
  for (Index j = 0; j < spec.size(); ++j) {
    if (j == band) continue;
    const Complex gap = spec.eigenvalues[band] - spec.eigenvalues[j];
    if (std::abs(gap) < cfg.degeneracy_gap) {
      throw Error(ErrorKind::GapClosure, "berry_curvature_sum: band " + std::to_string(band) + " is degenerate");
    }
    std::array<Complex, 3> a{}, b{};
    for (int c = 0; c < 3; ++c) {
      a[c] = bra_i.dot(grad_h[c] * spec.phi(j));
      b[c] = spec.chi(j).dot(grad_h[c] * ket_i);
    }
    const Complex g2 = gap * gap;
    acc[0] += (a[1] * b[2] - a[2] * b[1]) / g2;
    acc[1] += (a[2] * b[0] - a[0] * b[2]) / g2;
    acc[2] += (a[0] * b[1] - a[1] * b[0]) / g2;
  }
  return {-acc[0].imag(), -acc[1].imag(), -acc[2].imag()};
}

double adiabatic_metric(const ParameterPath& path, double hbar, const ToleranceConfig& cfg) {
  const std::size_t k_count = path.samples.size();
  if (k_count < 3) throw Error(ErrorKind::GridMismatch, "adiabatic_metric: path needs at least three samples");
  const Index dim = path.samples.front().rows();
  std::vector<Eigen::VectorXd> values;
  std::vector<std::vector<StateVector>> bands(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < k_count; ++k) {
    require_same_dim(path.samples.front(), path.samples[k], "adiabatic_metric");
    Bands b = hermitian_bands(path.samples[k], cfg, "adiabatic_metric");
    if (dim > 1 && smallest_gap(b.values) < cfg.degeneracy_gap) {
      throw Error(ErrorKind::GapClosure, "adiabatic_metric: gap closes at sample " + std::to_string(k));
    }
    for (Index n = 0; n < dim; ++n) {
      StateVector v = b.vectors.col(n);
      if (k > 0) align_phase(v, bands[static_cast<std::size_t>(n)].back());
      bands[static_cast<std::size_t>(n)].push_back(std::move(v));
    }
    values.push_back(b.values);
  }
  const double ds = 1.0 / static_cast<double>(k_count - 1);
  std::vector<std::vector<StateVector>> deriv;
  for (const auto& band : bands) deriv.push_back(differentiate(band, ds));
  double sup = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j < dim; ++j) {
        if (i == j) continue;
        const Complex c = bands[static_cast<std::size_t>(i)][k].dot(deriv[static_cast<std::size_t>(j)][k]);
        sup = std::max(sup, std::abs(c) / std::abs(values[k][i] - values[k][j]));
      }
    }
  }
  return hbar * sup;
}

LewisRiesenfeldPhase lewis_riesenfeld_phase(const OperatorSamples& i_samples, const TimeDependentModel& model,
                                            Index band, double hbar, double invariant_tol, const ToleranceConfig& cfg) {
  if (i_samples.size() < 3 || i_samples.times.size() != i_samples.size()) {
    throw Error(ErrorKind::GridMismatch, "lewis_riesenfeld_phase: need at least three samples with matching times");
  }
  const Index dim = model.dim();
  require_band(band, dim, "lewis_riesenfeld_phase");
  LewisRiesenfeldPhase out;
  out.times = i_samples.times;
  const auto vn = von_neumann_residual(i_samples, model, hbar);
  out.max_von_neumann = *std::max_element(vn.begin(), vn.end());
  if (out.max_von_neumann > invariant_tol) {
    throw Error(ErrorKind::NotInvariant,
                "lewis_riesenfeld_phase: Von Neumann residual " + std::to_string(out.max_von_neumann) + " exceeds tolerance");
  }
  for (std::size_t k = 0; k < i_samples.size(); ++k) {
    const Bands b = hermitian_bands(i_samples.ops[k], cfg, "lewis_riesenfeld_phase");
    if (dim > 1 && smallest_gap(b.values) < cfg.degeneracy_gap) {
      throw Error(ErrorKind::GapClosure, "lewis_riesenfeld_phase: invariant spectrum is degenerate");
    }
    StateVector v = b.vectors.col(band);
    if (k > 0) align_phase(v, out.modes.back());
    out.modes.push_back(std::move(v));
  }
  const double dt = (out.times.back() - out.times.front()) / static_cast<double>(out.times.size() - 1);
  const auto dmodes = differentiate(out.modes, dt);
  std::vector<Complex> integrand(out.modes.size());
  for (std::size_t k = 0; k < out.modes.size(); ++k) {
    const StateVector& m = out.modes[k];
    integrand[k] = kI * m.dot(dmodes[k]) - m.dot(model.at(out.times[k]) * m) / hbar;
  }
  Complex acc = 0.0;
  out.alpha.push_back(0.0);
  for (std::size_t k = 1; k < integrand.size(); ++k) {
    acc += 0.5 * (out.times[k] - out.times[k - 1]) * (integrand[k] + integrand[k - 1]);
    out.alpha.push_back(acc.real());
    out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
  }
  return out;
}

}  // namespace nhqm
