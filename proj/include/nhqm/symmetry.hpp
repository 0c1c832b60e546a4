#pragma once

#include <utility>
#include <vector>

#include "nhqm/linalg.hpp"

namespace nhqm {

// Linear parity P with P^2 = I and P = P^+. Time reversal is always entrywise
// complex conjugation in the computational basis; any other antiunitary must
// be folded into a generalized parity matrix.
class ParityOperator {
public:
  explicit ParityOperator(Operator matrix, double tol = 1e-12);

  static ParityOperator sigma_x();
  // diag((-1)^n), the oscillator parity on a truncated Fock basis.
  static ParityOperator fock(Index n);
  // Reversal of the basis order; reduces to sigma_x for two levels.
  static ParityOperator exchange(Index n);
  static ParityOperator identity(Index n);

  const Operator& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

private:
  Operator matrix_;
};

enum class PTKind { NotPTInvariant, Unbroken, Broken };

const char* to_string(PTKind kind);

struct PTClassification {
  PTKind kind = PTKind::NotPTInvariant;
  double pt_residual = 0.0;
  std::vector<std::pair<Index, Index>> conjugate_pairs;
  Eigen::VectorXcd eigenvalues;
};

struct ChargeOperator {
  Operator matrix;
  std::vector<int> signs;
};

// H = [[r e^{i theta}, s], [s, r e^{-i theta}]].
Operator brachistochrone(double r, double s, double theta);

// ||H - P conj(H) P|| / ||H|| (zero for H = 0).
double pt_residual(const Operator& h, const ParityOperator& p);

PTClassification classify_pt(const Operator& h, const ParityOperator& p, const ToleranceConfig& cfg = {});

// (P conj(phi))^T phi, real for Hermitian P.
Complex pt_norm(const StateVector& phi, const ParityOperator& p);

ChargeOperator build_charge_operator(const BiorthogonalSpectrum& spec, const ParityOperator& p,
                                     const ToleranceConfig& cfg = {});

Complex pt_inner(const StateVector& f, const StateVector& g, const ParityOperator& p);
Complex cpt_inner(const StateVector& f, const StateVector& g, const ChargeOperator& c, const ParityOperator& p);

// Right eigenvectors rescaled to unit CPT norm, one per column.
Operator cpt_normalized_basis(const BiorthogonalSpectrum& spec, const ChargeOperator& c, const ParityOperator& p);

// G_mn = cpt_inner(v_m, v_n) over the columns of `basis`.
Operator cpt_gram(const Operator& basis, const ChargeOperator& c, const ParityOperator& p);

}  // namespace nhqm
