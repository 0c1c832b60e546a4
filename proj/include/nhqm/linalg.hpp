#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nhqm/error.hpp"

namespace nhqm {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

struct ToleranceConfig {
  double residual_tol = 1e-10;
  double degeneracy_gap = 1e-8;
  double hbar = 1.0;
};

// Right eigenvectors are the columns of `right`, left eigenvectors the
// columns of `left`, so that <chi_m|phi_n> = (left.adjoint() * right)(m, n).
struct BiorthogonalSpectrum {
  Eigen::VectorXcd eigenvalues;
  Operator right;
  Operator left;
  std::vector<bool> degeneracy_flags;
  double max_residual = 0.0;
  // ||V|| * ||V^-1|| for the right-eigenvector matrix V (Frobenius norms).
  double condition = 1.0;

  Index size() const { return eigenvalues.size(); }
  StateVector phi(Index n) const { return right.col(n); }
  StateVector chi(Index n) const { return left.col(n); }
  bool any_degenerate() const;
};

double norm(const Operator& a);
double norm(const StateVector& v);
bool all_finite(const Operator& a);
bool all_finite(const StateVector& v);
Operator identity(Index dim);
Operator commutator(const Operator& a, const Operator& b);

void require_square(const Operator& a, const char* what);
void require_same_dim(const Operator& a, const Operator& b, const char* what);

// Inverse through LU with a reciprocal-condition guard; throws Singular.
Operator checked_inverse(const Operator& a, const char* what, double min_rcond = 1e-14);

BiorthogonalSpectrum eig_general(const Operator& a, const ToleranceConfig& cfg = {});
BiorthogonalSpectrum biorthonormalize(const BiorthogonalSpectrum& spec, const ToleranceConfig& cfg = {});

// Sum_n E_n |phi_n><chi_n|.
Operator reconstruct(const BiorthogonalSpectrum& spec);

// Stable lexicographic ordering by (Re, Im). Real parts closer than
// `tie_tol` count as equal, so that the imaginary part decides among them.
std::vector<Index> spectral_order(const Eigen::VectorXcd& values, double tie_tol);

Operator sqrt_posdef(const Operator& a, const ToleranceConfig& cfg = {});

// Hermitian square root S = V diag(sign_k sqrt(d_k)) V^+ of a positive
// definite Hermitian matrix with eigenvalues d_k in ascending order. With all
// signs +1 this is sqrt_posdef. Other signatures give the remaining Hermitian
// square roots, which are needed to reproduce non-positive Dyson maps.
struct HermitianRoot {
  Operator root;
  Operator inverse_root;
};
HermitianRoot hermitian_sqrt(const Operator& a, std::span<const int> signs, const ToleranceConfig& cfg = {});

inline constexpr double kExpmNormBound = 1e6;

// exp(scale * a) by scaling and squaring with a degree-adaptive Pade
// approximant. Throws Overflow when ||scale * a||_1 exceeds `norm_bound`.
Operator expm(const Operator& a, Complex scale = 1.0, double norm_bound = kExpmNormBound);

}  // namespace nhqm
