#include "nhqm/metric.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace nhqm {

MetricPair metric_from_spectrum(const BiorthogonalSpectrum& spec_h, const ToleranceConfig& cfg) {
  for (Index k = 0; k < spec_h.size(); ++k) {
    const Complex e = spec_h.eigenvalues[k];
    if (std::abs(e.imag()) > cfg.residual_tol * (1.0 + std::abs(e))) {
      throw Error(ErrorKind::ComplexSpectrum,
                  "metric_from_spectrum: eigenvalue " + std::to_string(k) + " has imaginary part " + std::to_string(e.imag()));
    }
  }
  const BiorthogonalSpectrum b = biorthonormalize(spec_h, cfg);
  MetricPair mp;
  mp.eta = b.left * b.left.adjoint();
  mp.eta_inv = b.right * b.right.adjoint();
  mp.eta = 0.5 * (mp.eta + mp.eta.adjoint()).eval();
  mp.eta_inv = 0.5 * (mp.eta_inv + mp.eta_inv.adjoint()).eval();
  const std::vector<int> plus(static_cast<std::size_t>(b.size()), 1);
  const HermitianRoot root = hermitian_sqrt(mp.eta, plus, cfg);
  mp.rho = root.root;
  mp.rho_inv = root.inverse_root;
  return mp;
}

MetricPair normalize_unit_determinant(const MetricPair& mp) {
  const Index n = mp.eta.rows();
  if (n == 0) return mp;
  const double det = mp.eta.determinant().real();
  if (!(det > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "normalize_unit_determinant: det(eta) is not positive");
  const double c = std::pow(det, -1.0 / static_cast<double>(n));
  const double sc = std::sqrt(c);
  return {mp.eta * c, mp.eta_inv / c, mp.rho * sc, mp.rho_inv / sc};
}

MetricPair with_root_signature(const MetricPair& mp, std::span<const int> signs, const ToleranceConfig& cfg) {
  const HermitianRoot root = hermitian_sqrt(mp.eta, signs, cfg);
  MetricPair out = mp;
  out.rho = root.root;
  out.rho_inv = root.inverse_root;
  return out;
}

double pseudo_hermiticity_residual(const Operator& h, const Operator& eta) {
  require_same_dim(h, eta, "pseudo_hermiticity_residual");
  const double scale = eta.norm() * h.norm();
  if (scale == 0.0) return 0.0;
  return (h.adjoint() * eta - eta * h).norm() / scale;
}

HermitianEquivalent hermitian_equivalent(const Operator& h, const MetricPair& mp, double tol) {
  const double res = pseudo_hermiticity_residual(h, mp.eta);
  if (res > tol) {
    throw Error(ErrorKind::MetricMismatch, "hermitian_equivalent: intertwining residual " + std::to_string(res));
  }
  HermitianEquivalent out;
  out.h = mp.rho * h * mp.rho_inv;
  const double hn = out.h.norm();
  out.transform_residual = hn > 0 ? (out.h - out.h.adjoint()).norm() / hn : 0.0;
  return out;
}

Complex pseudo_inner(const StateVector& u, const StateVector& v, const Operator& eta) {
  if (u.size() != eta.rows() || v.size() != eta.rows()) throw Error(ErrorKind::DimensionMismatch, "pseudo_inner: dimension mismatch");
  return u.dot(eta * v);
}

Operator metric_from_pc(const ParityOperator& p, const ChargeOperator& c) {
  require_same_dim(p.matrix(), c.matrix, "metric_from_pc");
  return p.matrix() * c.matrix;
}

}  // namespace nhqm
