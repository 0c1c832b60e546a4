#pragma once

#include <span>

#include "nhqm/linalg.hpp"
#include "nhqm/symmetry.hpp"

namespace nhqm {

struct MetricPair {
  Operator eta;
  Operator eta_inv;
  Operator rho;
  Operator rho_inv;
};

struct HermitianEquivalent {
  Operator h;
  double transform_residual = 0.0;
};

// eta = sum_n |chi_n><chi_n| for unit-norm right eigenvectors, rho its
// positive square root.
MetricPair metric_from_spectrum(const BiorthogonalSpectrum& spec_h, const ToleranceConfig& cfg = {});

// Rescales the pair so that det(eta) = 1.
MetricPair normalize_unit_determinant(const MetricPair& mp);

// Replaces rho by another Hermitian square root of eta, with one sign per
// eigenvalue of eta in ascending order. All +1 is the positive root.
MetricPair with_root_signature(const MetricPair& mp, std::span<const int> signs, const ToleranceConfig& cfg = {});

// ||H^+ eta - eta H|| / (||eta|| ||H||).
double pseudo_hermiticity_residual(const Operator& h, const Operator& eta);

// h = rho H rho^-1. Throws MetricMismatch when eta does not intertwine H.
HermitianEquivalent hermitian_equivalent(const Operator& h, const MetricPair& mp, double tol = 1e-8);

Complex pseudo_inner(const StateVector& u, const StateVector& v, const Operator& eta);

Operator metric_from_pc(const ParityOperator& p, const ChargeOperator& c);

}  // namespace nhqm
