#include "nhqm/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace nhqm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double one_norm(const Operator& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

bool BiorthogonalSpectrum::any_degenerate() const {
  return std::any_of(degeneracy_flags.begin(), degeneracy_flags.end(), [](bool b) { return b; });
}

double norm(const Operator& a) { return a.norm(); }
double norm(const StateVector& v) { return v.norm(); }

bool all_finite(const Operator& a) { return a.allFinite(); }
bool all_finite(const StateVector& v) { return v.allFinite(); }

Operator identity(Index dim) { return Operator::Identity(dim, dim); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

void require_square(const Operator& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": operator is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": operand dimensions differ");
  }
}

Operator checked_inverse(const Operator& a, const char* what, double min_rcond) {
  require_square(a, what);
  Eigen::PartialPivLU<Operator> lu(a);
  const double rc = lu.rcond();
  if (!(rc > min_rcond)) {
    throw Error(ErrorKind::Singular, std::string(what) + ": matrix is numerically singular (rcond " + std::to_string(rc) + ")");
  }
  return lu.inverse();
}

std::vector<Index> spectral_order(const Eigen::VectorXcd& values, double tie_tol) {
  std::vector<Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
    return values[a].imag() < values[b].imag();
  });
  // Runs of nearly equal real parts are re-sorted by imaginary part; this keeps
  // conjugate pairs in (-Im, +Im) order regardless of rounding in Re.
  std::size_t start = 0;
  while (start < idx.size()) {
    std::size_t end = start + 1;
    while (end < idx.size() && values[idx[end]].real() - values[idx[end - 1]].real() <= tie_tol) ++end;
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start), idx.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Index a, Index b) { return values[a].imag() < values[b].imag(); });
    start = end;
  }
  return idx;
}

BiorthogonalSpectrum eig_general(const Operator& a, const ToleranceConfig& cfg) {
  require_square(a, "eig_general");
  if (!all_finite(a)) throw Error(ErrorKind::NonFinite, "eig_general: input has non-finite entries");
  const Index n = a.rows();
  BiorthogonalSpectrum out;
  if (n == 0) return out;

  Eigen::ComplexSchur<Operator> schur(a, true);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "eig_general: Schur iteration did not converge");
  }
  const Operator& t = schur.matrixT();
  const Operator& q = schur.matrixU();
  const double t_norm = std::max(t.norm(), std::numeric_limits<double>::min());

  // Eigenvectors of the triangular factor by back substitution. Inside a
  // cluster of (nearly) equal diagonal entries the component is set to zero
  // when the right-hand side is negligible, which yields independent vectors
  // for semisimple degenerate eigenvalues.
  Operator x = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const Complex lam = t(k, k);
    x(k, k) = 1.0;
    double col_norm = 1.0;
    for (Index i = k - 1; i >= 0; --i) {
      Complex s = 0.0;
      for (Index j = i + 1; j <= k; ++j) s += t(i, j) * x(j, k);
      Complex d = t(i, i) - lam;
      if (std::abs(d) < cfg.degeneracy_gap) {
        if (std::abs(s) <= cfg.residual_tol * t_norm * col_norm) {
          x(i, k) = 0.0;
          continue;
        }
        const double floor = kEps * t_norm;
        if (std::abs(d) < floor) d = (d == Complex(0.0) ? Complex(floor) : d * (floor / std::abs(d)));
      }
      x(i, k) = -s / d;
      col_norm = std::hypot(col_norm, std::abs(x(i, k)));
    }
  }

  Operator v = q * x;
  for (Index k = 0; k < n; ++k) v.col(k).normalize();

  Eigen::VectorXcd values = t.diagonal();
  const double a_norm = a.norm();
  const auto order = spectral_order(values, std::max(cfg.residual_tol, 64 * kEps) * (1.0 + a_norm));

  out.eigenvalues.resize(n);
  out.right.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = values[order[static_cast<std::size_t>(k)]];
    out.right.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }

  Eigen::FullPivLU<Operator> lu(out.right);
  if (lu.isInvertible()) {
    const Operator vinv = lu.inverse();
    out.left = vinv.adjoint();
    out.condition = out.right.norm() * vinv.norm();
  } else {
    out.left = Operator::Zero(n, n);
    out.condition = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(out.condition)) out.condition = std::numeric_limits<double>::infinity();

  out.degeneracy_flags.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && std::abs(out.eigenvalues[i] - out.eigenvalues[j]) < cfg.degeneracy_gap) {
        out.degeneracy_flags[static_cast<std::size_t>(i)] = true;
      }
    }
  }

  double worst = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double r = (a * out.right.col(k) - out.eigenvalues[k] * out.right.col(k)).norm();
    worst = std::max(worst, r);
  }
  out.max_residual = a_norm > 0 ? worst / a_norm : worst;
  if (out.max_residual > cfg.residual_tol && worst > cfg.residual_tol * a_norm) {
    throw Error(ErrorKind::NonConvergence,
                "eig_general: eigenvector residual " + std::to_string(out.max_residual) + " exceeds tolerance");
  }
  return out;
}

BiorthogonalSpectrum biorthonormalize(const BiorthogonalSpectrum& spec, const ToleranceConfig& cfg) {
  const Index n = spec.size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(spec.eigenvalues[i] - spec.eigenvalues[j]) < cfg.degeneracy_gap) {
        throw Error(ErrorKind::DegenerateSpectrum,
                    "biorthonormalize: eigenvalues " + std::to_string(i) + " and " + std::to_string(j) + " are degenerate");
      }
    }
  }
  BiorthogonalSpectrum out = spec;
  for (Index k = 0; k < n; ++k) {
    const double c = out.right.col(k).norm();
    if (!(c > 0.0)) throw Error(ErrorKind::Singular, "biorthonormalize: zero right eigenvector");
    out.right.col(k) /= c;
  }
  const Operator vinv = checked_inverse(out.right, "biorthonormalize", 0.0);
  out.left = vinv.adjoint();
  out.condition = out.right.norm() * vinv.norm();
  return out;
}

Operator reconstruct(const BiorthogonalSpectrum& spec) {
  return spec.right * spec.eigenvalues.asDiagonal() * spec.left.adjoint();
}

namespace {

struct HermitianEigen {
  Eigen::VectorXd values;
  Operator vectors;
};

HermitianEigen hermitian_eigen_checked(const Operator& a, const ToleranceConfig& cfg, const char* what) {
  require_square(a, what);
  if (!all_finite(a)) throw Error(ErrorKind::NonFinite, std::string(what) + ": non-finite input");
  const double an = a.norm();
  if ((a - a.adjoint()).norm() > cfg.residual_tol * std::max(an, 1.0)) {
    throw Error(ErrorKind::NotHermitian, std::string(what) + ": input is not Hermitian");
  }
  const Operator herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(herm);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, std::string(what) + ": eigensolver failed");
  if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() <= cfg.degeneracy_gap) {
    throw Error(ErrorKind::NotPositiveDefinite,
                std::string(what) + ": smallest eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) +
                    " is not positive");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

Operator sqrt_posdef(const Operator& a, const ToleranceConfig& cfg) {
  const auto he = hermitian_eigen_checked(a, cfg, "sqrt_posdef");
  const Eigen::VectorXcd d = he.values.cwiseSqrt().cast<Complex>();
  Operator s = he.vectors * d.asDiagonal() * he.vectors.adjoint();
  return 0.5 * (s + s.adjoint());
}

HermitianRoot hermitian_sqrt(const Operator& a, std::span<const int> signs, const ToleranceConfig& cfg) {
  const auto he = hermitian_eigen_checked(a, cfg, "hermitian_sqrt");
  const Index n = he.values.size();
  if (static_cast<Index>(signs.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "hermitian_sqrt: one sign per eigenvalue is required");
  }
  Eigen::VectorXcd d(n), dinv(n);
  for (Index k = 0; k < n; ++k) {
    const double sg = signs[static_cast<std::size_t>(k)] < 0 ? -1.0 : 1.0;
    const double r = std::sqrt(he.values[k]);
    d[k] = sg * r;
    dinv[k] = sg / r;
  }
  HermitianRoot out;
  out.root = he.vectors * d.asDiagonal() * he.vectors.adjoint();
  out.inverse_root = he.vectors * dinv.asDiagonal() * he.vectors.adjoint();
  out.root = 0.5 * (out.root + out.root.adjoint()).eval();
  out.inverse_root = 0.5 * (out.inverse_root + out.inverse_root.adjoint()).eval();
  return out;
}

namespace {

// Pade coefficients b_0..b_m for degrees 3, 5, 7, 9 and 13.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                           2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                            1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                            670442572800.0,      33522128640.0,       1323241920.0,
                                            40840800.0,          960960.0,            16380.0,
                                            182.0,               1.0};
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t M>
Operator pade_low(const Operator& b, const std::array<double, M>& c) {
  const Index n = b.rows();
  const Operator id = Operator::Identity(n, n);
  const Operator b2 = b * b;
  Operator u_even = c[1] * id;  // odd-index coefficients, multiplied by b at the end
  Operator v = c[0] * id;
  Operator power = id;
  for (std::size_t k = 2; k < M; k += 2) {
    power = power * b2;
    v += c[k] * power;
    if (k + 1 < M) u_even += c[k + 1] * power;
  }
  const Operator u = b * u_even;
  return (v - u).partialPivLu().solve(v + u);
}

Operator pade13(const Operator& b) {
  const auto& c = kPade13;
  const Index n = b.rows();
  const Operator id = Operator::Identity(n, n);
  const Operator b2 = b * b;
  const Operator b4 = b2 * b2;
  const Operator b6 = b4 * b2;
  const Operator u_inner = b6 * (c[13] * b6 + c[11] * b4 + c[9] * b2) + c[7] * b6 + c[5] * b4 + c[3] * b2 + c[1] * id;
  const Operator u = b * u_inner;
  const Operator v = b6 * (c[12] * b6 + c[10] * b4 + c[8] * b2) + c[6] * b6 + c[4] * b4 + c[2] * b2 + c[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Operator expm(const Operator& a, Complex scale, double norm_bound) {
  require_square(a, "expm");
  const Index n = a.rows();
  if (n == 0) return a;
  if (scale == Complex(0.0)) return Operator::Identity(n, n);
  if (!all_finite(a)) throw Error(ErrorKind::NonFinite, "expm: non-finite input");
  Operator b = scale * a;
  const double nb = one_norm(b);
  if (!std::isfinite(nb) || nb > norm_bound) {
    throw Error(ErrorKind::Overflow, "expm: norm " + std::to_string(nb) + " exceeds bound " + std::to_string(norm_bound));
  }
  if (nb == 0.0) return Operator::Identity(n, n);
  if (nb <= kTheta3) return pade_low(b, kPade3);
  if (nb <= kTheta5) return pade_low(b, kPade5);
  if (nb <= kTheta7) return pade_low(b, kPade7);
  if (nb <= kTheta9) return pade_low(b, kPade9);
  int s = 0;
  if (nb > kTheta13) s = static_cast<int>(std::ceil(std::log2(nb / kTheta13)));
  if (s > 0) b /= std::ldexp(1.0, s);
  Operator r = pade13(b);
  for (int k = 0; k < s; ++k) r = (r * r).eval();
  if (!all_finite(r)) throw Error(ErrorKind::Overflow, "expm: result overflowed");
  return r;
}

}  // namespace nhqm
