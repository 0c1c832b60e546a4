#include "nhqm/symmetry.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nhqm {

ParityOperator::ParityOperator(Operator matrix, double tol) : matrix_(std::move(matrix)) {
  require_square(matrix_, "ParityOperator");
  const Index n = matrix_.rows();
  if ((matrix_ * matrix_ - Operator::Identity(n, n)).norm() > tol * std::max<double>(1.0, static_cast<double>(n))) {
    throw Error(ErrorKind::SchemaError, "ParityOperator: P^2 != I");
  }
  if ((matrix_ - matrix_.adjoint()).norm() > tol * std::max<double>(1.0, static_cast<double>(n))) {
    throw Error(ErrorKind::SchemaError, "ParityOperator: P is not Hermitian");
  }
}

ParityOperator ParityOperator::sigma_x() { return exchange(2); }

ParityOperator ParityOperator::fock(Index n) {
  Operator p = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return ParityOperator(p);
}

ParityOperator ParityOperator::exchange(Index n) {
  Operator p = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) p(k, n - 1 - k) = 1.0;
  return ParityOperator(p);
}

ParityOperator ParityOperator::identity(Index n) { return ParityOperator(Operator::Identity(n, n)); }

const char* to_string(PTKind kind) {
  switch (kind) {
    case PTKind::NotPTInvariant: return "NotPTInvariant";
    case PTKind::Unbroken: return "Unbroken";
    case PTKind::Broken: return "Broken";
  }
  return "Unknown";
}

Operator brachistochrone(double r, double s, double theta) {
  Operator h(2, 2);
  h(0, 0) = r * std::exp(Complex(0.0, theta));
  h(0, 1) = s;
  h(1, 0) = s;
  h(1, 1) = r * std::exp(Complex(0.0, -theta));
  return h;
}

double pt_residual(const Operator& h, const ParityOperator& p) {
  require_same_dim(h, p.matrix(), "pt_residual");
  const double hn = h.norm();
  if (hn == 0.0) return 0.0;
  const Operator& pm = p.matrix();
  return (h - pm * h.conjugate() * pm).norm() / hn;
}

Complex pt_norm(const StateVector& phi, const ParityOperator& p) {
  if (phi.size() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "pt_norm: dimension mismatch");
  return (p.matrix() * phi.conjugate()).transpose() * phi;
}

PTClassification classify_pt(const Operator& h, const ParityOperator& p, const ToleranceConfig& cfg) {
  PTClassification out;
  out.pt_residual = pt_residual(h, p);
  if (out.pt_residual > cfg.residual_tol) {
    out.kind = PTKind::NotPTInvariant;
    return out;
  }
  const BiorthogonalSpectrum spec = eig_general(h, cfg);
  out.eigenvalues = spec.eigenvalues;
  const Index n = spec.size();

  bool unbroken = true;
  std::vector<bool> complex_value(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k) {
    const Complex e = spec.eigenvalues[k];
    if (std::abs(e.imag()) > cfg.residual_tol * (1.0 + std::abs(e))) {
      complex_value[static_cast<std::size_t>(k)] = true;
      unbroken = false;
    }
  }
  if (unbroken) {
    // Each non-degenerate eigenvector must be mapped onto itself by PT, up to a phase.
    for (Index k = 0; k < n && unbroken; ++k) {
      if (spec.degeneracy_flags[static_cast<std::size_t>(k)]) continue;
      const StateVector phi = spec.phi(k);
      const StateVector pt_phi = p.matrix() * phi.conjugate();
      const double overlap = std::abs(phi.dot(pt_phi));
      if (overlap < (1.0 - 1e-8) * phi.squaredNorm()) unbroken = false;
    }
  }
  if (unbroken) {
    out.kind = PTKind::Unbroken;
    return out;
  }

  out.kind = PTKind::Broken;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    if (!complex_value[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(i)]) continue;
    Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j == i || used[static_cast<std::size_t>(j)] || !complex_value[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(spec.eigenvalues[j] - std::conj(spec.eigenvalues[i]));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(best)] = true;
      out.conjugate_pairs.emplace_back(std::min(i, best), std::max(i, best));
    }
  }
  return out;
}

ChargeOperator build_charge_operator(const BiorthogonalSpectrum& spec, const ParityOperator& p,
                                     const ToleranceConfig& cfg) {
  if (spec.right.rows() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "build_charge_operator: dimension mismatch");
  const BiorthogonalSpectrum b = biorthonormalize(spec, cfg);
  const Index n = b.size();
  ChargeOperator c;
  c.signs.resize(static_cast<std::size_t>(n));
  Eigen::VectorXcd s(n);
  for (Index k = 0; k < n; ++k) {
    const Complex w = pt_norm(b.phi(k), p);
    if (std::abs(w) <= cfg.residual_tol || std::abs(w.imag()) > 1e-8 * std::abs(w.real())) {
      throw Error(ErrorKind::BrokenSymmetry,
                  "build_charge_operator: PT norm of state " + std::to_string(k) + " is not a nonzero real number");
    }
    c.signs[static_cast<std::size_t>(k)] = w.real() > 0 ? 1 : -1;
    s[k] = static_cast<double>(c.signs[static_cast<std::size_t>(k)]);
  }
  c.matrix = b.right * s.asDiagonal() * b.left.adjoint();
  return c;
}

Complex pt_inner(const StateVector& f, const StateVector& g, const ParityOperator& p) {
  if (f.size() != p.dim() || g.size() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "pt_inner: dimension mismatch");
  return (p.matrix() * f.conjugate()).transpose() * g;
}

Complex cpt_inner(const StateVector& f, const StateVector& g, const ChargeOperator& c, const ParityOperator& p) {
  if (f.size() != p.dim() || g.size() != p.dim() || c.matrix.rows() != p.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "cpt_inner: dimension mismatch");
  }
  return (c.matrix * (p.matrix() * f.conjugate())).transpose() * g;
}

Operator cpt_normalized_basis(const BiorthogonalSpectrum& spec, const ChargeOperator& c, const ParityOperator& p) {
  Operator basis = spec.right;
  for (Index k = 0; k < basis.cols(); ++k) {
    const Complex w = cpt_inner(basis.col(k), basis.col(k), c, p);
    basis.col(k) /= std::sqrt(w);
  }
  return basis;
}

Operator cpt_gram(const Operator& basis, const ChargeOperator& c, const ParityOperator& p) {
  const Index n = basis.cols();
  Operator g(n, n);
  for (Index m = 0; m < n; ++m) {
    for (Index k = 0; k < n; ++k) g(m, k) = cpt_inner(basis.col(m), basis.col(k), c, p);
  }
  return g;
}

}  // namespace nhqm
