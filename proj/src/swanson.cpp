#include "nhqm/swanson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nhqm {

SwansonCoefficients SwansonCoefficients::constant(Complex omega, Complex alpha, Complex beta) {
  return {[omega](double) { return omega; }, [alpha](double) { return alpha; }, [beta](double) { return beta; }};
}

AuxiliaryFunctions AuxiliaryFunctions::constant(double phi, double chi, double vartheta0) {
  return {[phi](double) { return phi; }, [chi](double) { return chi; }, [vartheta0](double) { return vartheta0; }};
}

Su11Generators su11_generators(Index n) {
  if (n < 4) throw Error(ErrorKind::UsageError, "su11_generators: truncation must be at least 4");
  Su11Generators g;
  g.k0 = Operator::Zero(n, n);
  g.kminus = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) g.k0(k, k) = 0.5 * (static_cast<double>(k) + 0.5);
  for (Index k = 0; k + 2 < n; ++k) {
    g.kminus(k, k + 2) = 0.5 * std::sqrt(static_cast<double>((k + 1) * (k + 2)));
  }
  g.kplus = g.kminus.adjoint();
  return g;
}

TimeDependentModel swanson_model(const SwansonCoefficients& coeffs, Index n) {
  const Su11Generators g = su11_generators(n);
  TimeDependentModel model(n);
  auto twice = [](Coefficient c) { return [c](double t) { return 2.0 * c(t); }; };
  model.add_term(g.k0, twice(coeffs.omega));
  model.add_term(g.kminus, twice(coeffs.alpha));
  model.add_term(g.kplus, twice(coeffs.beta));
  return model;
}

DeltaSamples delta_odes(const SwansonCoefficients& coeffs, const DeltaState& delta0, const std::vector<double>& grid,
                        double hbar) {
  if (grid.empty()) throw Error(ErrorKind::GridMismatch, "delta_odes: empty grid");
  auto rhs = [&](double t, const DeltaState& d) {
    const Complex w = coeffs.omega(t), a = coeffs.alpha(t), b = coeffs.beta(t);
    const Complex i2 = Complex(0.0, 2.0 / hbar);
    return DeltaState{2.0 * i2 * (b * d[1] - a * d[2]), i2 * (w * d[1] - a * d[0]), i2 * (b * d[0] - w * d[2])};
  };
  auto axpy = [](const DeltaState& x, Complex s, const DeltaState& y) {
    return DeltaState{x[0] + s * y[0], x[1] + s * y[1], x[2] + s * y[2]};
  };
  DeltaSamples out;
  out.times = grid;
  out.values.push_back(delta0);
  DeltaState d = delta0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double h = grid[k + 1] - grid[k];
    const DeltaState k1 = rhs(t, d);
    const DeltaState k2 = rhs(t + 0.5 * h, axpy(d, 0.5 * h, k1));
    const DeltaState k3 = rhs(t + 0.5 * h, axpy(d, 0.5 * h, k2));
    const DeltaState k4 = rhs(t + h, axpy(d, h, k3));
    for (int c = 0; c < 3; ++c) d[c] += (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(d[c].real()) || !std::isfinite(d[c].imag())) {
        throw Error(ErrorKind::NonFinite, "delta_odes: solution blew up at step " + std::to_string(k + 1), k + 1);
      }
      out.max_imag = std::max(out.max_imag, std::abs(d[c].imag()));
    }
    out.values.push_back(d);
  }
  for (int c = 0; c < 3; ++c) out.max_imag = std::max(out.max_imag, std::abs(delta0[c].imag()));
  return out;
}

AuxiliaryParams auxiliary_from_epsilon_mu(double epsilon, double mu) {
  const double theta2 = epsilon * epsilon - 4.0 * mu * mu;
  if (!(theta2 > 0.0)) {
    throw Error(ErrorKind::ConstraintViolation,
                "auxiliary_from_epsilon_mu: epsilon^2 - 4 mu^2 must be positive (trigonometric branch is not supported)");
  }
  AuxiliaryParams p;
  p.epsilon = epsilon;
  p.mu = mu;
  p.theta = std::sqrt(theta2);
  const double ch = std::cosh(p.theta), sh = std::sinh(p.theta);
  const double minus = ch - epsilon / p.theta * sh;
  const double plus = ch + epsilon / p.theta * sh;
  p.vartheta0 = 1.0 / (minus * minus);
  p.vartheta_plus = 2.0 * mu * sh / (p.theta * ch - epsilon * sh);
  p.vartheta_minus = p.vartheta_plus;
  p.phi = -p.vartheta_plus;
  p.chi = -plus / minus;
  return p;
}

std::array<double, 3> constraint_residuals(Complex omega, Complex alpha, Complex beta, double phi, double chi,
                                           double vartheta0, double phi_dot, double vartheta0_dot, double hbar) {
  const double wr = omega.real(), wi = omega.imag();
  const double ar = alpha.real(), ai = alpha.imag();
  const double br = beta.real(), bi = beta.imag();
  const double s = phi * phi + chi;
  std::array<double, 3> r{};
  if (phi != 0.0) {
    r[0] = std::abs(vartheta0_dot - (2.0 / hbar) * (vartheta0 / phi) * (-2.0 * phi * wi + ai + (2.0 * phi * phi + chi) * bi));
  } else {
    // Phi = 0: multiply the constraint through by Phi.
    r[0] = std::abs((2.0 / hbar) * vartheta0 * (ai + chi * bi));
  }
  r[1] = std::abs(phi_dot - (2.0 / hbar) * (-phi * wi + ai + phi * phi * bi));
  r[2] = std::max({std::abs(chi * br - ar), std::abs(s * ar - chi * phi * wr), std::abs(phi * wr - s * br)});
  return r;
}

StaticSolution static_constraint_solution(double omega, double alpha, double beta) {
  StaticSolution s;
  if (beta == 0.0) {
    if (alpha != 0.0) {
      throw Error(ErrorKind::ConstraintViolation, "static_constraint_solution: beta = 0 with alpha != 0 has no solution");
    }
    s.phi = 0.0;
    s.chi = -1.0;
    s.vartheta0 = 1.0;
    return s;
  }
  const double disc = omega * omega - 4.0 * alpha * beta;
  if (!(disc > 0.0)) {
    throw Error(ErrorKind::ComplexSpectrum, "static_constraint_solution: omega^2 - 4 alpha beta must be positive");
  }
  const double root = std::sqrt(disc);
  s.chi = alpha / beta;
  // Smaller root of beta Phi^2 - omega Phi + alpha = 0, in cancellation-free form.
  s.phi = (omega + root != 0.0) ? 2.0 * alpha / (omega + root) : (omega - root) / (2.0 * beta);
  s.vartheta0 = s.phi * s.phi - s.chi;
  if (std::abs(s.vartheta0) < 1e-12) {
    throw Error(ErrorKind::SingularTheta, "static_constraint_solution: vartheta0 vanishes");
  }
  return s;
}

namespace {

void check_aux(double phi, double chi, double vartheta0, double t) {
  if (std::abs(vartheta0) < 1e-12) {
    throw Error(ErrorKind::SingularTheta, "vartheta0 vanishes at t = " + std::to_string(t));
  }
  if (std::abs(vartheta0 - (phi * phi - chi)) > 1e-10 * std::max(1.0, std::abs(vartheta0))) {
    throw Error(ErrorKind::ConstraintViolation, "vartheta0 != Phi^2 - chi at t = " + std::to_string(t));
  }
}

// exp(c * n) for a nilpotent n, summed exactly.
Operator nilpotent_exp(const Operator& nil, double c) {
  const Index dim = nil.rows();
  Operator result = Operator::Identity(dim, dim);
  Operator term = Operator::Identity(dim, dim);
  for (Index j = 1; j < dim; ++j) {
    term = (term * nil) * (c / static_cast<double>(j));
    if (term.cwiseAbs().maxCoeff() == 0.0) break;
    result += term;
  }
  return result;
}

}  // namespace

InvariantPair build_invariant_pair(const AuxiliaryFunctions& aux, Index n, const std::vector<double>& grid) {
  const Su11Generators g = su11_generators(n);
  InvariantPair out;
  out.times = grid;
  for (Index k = 0; k < n; ++k) out.k_n.push_back(0.5 * (static_cast<double>(k) + 0.5));
  double sign = 0.0;
  for (double t : grid) {
    const double phi = aux.phi(t), chi = aux.chi(t), th = aux.vartheta0(t);
    check_aux(phi, chi, th, t);
    if (sign != 0.0 && (th > 0.0) != (sign > 0.0)) {
      throw Error(ErrorKind::SingularTheta, "vartheta0 changes sign on the grid");
    }
    sign = th;
    out.i_ph.push_back(-(1.0 / th) * ((phi * phi + chi) * g.k0 + chi * phi * g.kminus + phi * g.kplus));
    // Coefficients on (a^+a + 1/2), a^2, a^+2 and the resulting multiple of K0.
    const double d1 = -(phi * phi + chi) / (2.0 * th);
    const double d3 = -phi / (2.0 * th);
    const double factor = -(2.0 / th) * (d1 * (phi * phi + chi) - 4.0 * d3 * chi * phi);
    out.i_h.push_back(factor * g.k0);
  }
  return out;
}

DysonMap swanson_dyson_map(double phi, double vartheta0, Index n) {
  if (std::abs(vartheta0) < 1e-12) throw Error(ErrorKind::SingularTheta, "swanson_dyson_map: vartheta0 vanishes");
  const Su11Generators g = su11_generators(n);
  const Complex log_theta = std::log(Complex(vartheta0, 0.0));
  Eigen::VectorXcd scale(n), inv_scale(n);
  for (Index k = 0; k < n; ++k) {
    const double kk = g.k0(k, k).real();
    scale[k] = std::exp(log_theta * kk);
    inv_scale[k] = std::exp(-log_theta * kk);
  }
  DysonMap d;
  d.rho = nilpotent_exp(g.kplus, -phi) * scale.asDiagonal() * nilpotent_exp(g.kminus, -phi);
  d.rho_inv = nilpotent_exp(g.kminus, phi) * inv_scale.asDiagonal() * nilpotent_exp(g.kplus, phi);
  return d;
}

std::vector<StateVector> swanson_modes(const Operator& i_ph, const Operator& rho, const std::vector<double>& k_n,
                                       int levels, double tol) {
  if (levels < 1 || static_cast<std::size_t>(levels) > k_n.size()) {
    throw Error(ErrorKind::UsageError, "swanson_modes: level count out of range");
  }
  const BiorthogonalSpectrum s = eig_general(i_ph);
  std::vector<StateVector> modes;
  for (int n = 0; n < levels; ++n) {
    const double target = k_n[static_cast<std::size_t>(n)];
    Index best = 0;
    for (Index j = 1; j < s.size(); ++j) {
      if (std::abs(s.eigenvalues[j] - target) < std::abs(s.eigenvalues[best] - target)) best = j;
    }
    const double miss = std::abs(s.eigenvalues[best] - target);
    if (miss > tol) {
      throw Error(ErrorKind::NotInvariant, "swanson_modes: no eigenvalue of the invariant near k_" + std::to_string(n) +
                                               " (closest misses by " + std::to_string(miss) + ")");
    }
    StateVector v = s.right.col(best);
    const Complex overlap = rho.row(n) * v;
    if (std::abs(overlap) == 0.0) throw Error(ErrorKind::Singular, "swanson_modes: mode is orthogonal to rho^+|n>");
    modes.push_back(v / overlap);
  }
  return modes;
}

double derivative(const RealFunction& f, double t, double h) {
  return (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h);
}

GammaPhase gamma_phase(const SwansonCoefficients& coeffs, const AuxiliaryFunctions& aux, double k_n,
                       const std::vector<double>& grid, double hbar, double constraint_tol) {
  if (grid.empty()) throw Error(ErrorKind::GridMismatch, "gamma_phase: empty grid");
  GammaPhase out;
  out.times = grid;
  std::vector<double> re_integrand, im_integrand;
  for (double t : grid) {
    const Complex w = coeffs.omega(t), a = coeffs.alpha(t), b = coeffs.beta(t);
    const double phi = aux.phi(t), chi = aux.chi(t), th = aux.vartheta0(t);
    check_aux(phi, chi, th, t);
    const double phi_dot = derivative(aux.phi, t), th_dot = derivative(aux.vartheta0, t);
    const auto res = constraint_residuals(w, a, b, phi, chi, th, phi_dot, th_dot, hbar);
    out.max_constraint = std::max(out.max_constraint, res[2]);
    if (res[2] > constraint_tol) {
      throw Error(ErrorKind::ConstraintViolation,
                  "gamma_phase: algebraic constraint residual " + std::to_string(res[2]) + " at t = " + std::to_string(t));
    }
    const double s = phi * phi + chi;
    const Complex ih2(0.0, 0.5 * hbar);
    const Complex wv = (w * s - 2.0 * phi * (a + b * chi) - ih2 * (th_dot - 2.0 * phi * phi_dot)) / th;
    const Complex uv = (w * phi - a - b * phi * phi + ih2 * phi_dot) / th;
    const Complex vv = (w * chi * phi - a * phi * phi - b * chi * chi + ih2 * (th * phi_dot + phi * phi * phi_dot - phi * th_dot)) / th;
    out.w.push_back(wv);
    out.u.push_back(uv);
    out.v.push_back(vv);
    out.max_u = std::max(out.max_u, std::abs(uv));
    out.max_v = std::max(out.max_v, std::abs(vv));
    re_integrand.push_back(k_n * (2.0 / th) * (w.real() * s - 4.0 * phi * a.real()) / hbar);
    im_integrand.push_back(k_n * 2.0 * wv.imag() / hbar);
  }
  if (out.max_u > constraint_tol || out.max_v > constraint_tol) {
    throw Error(ErrorKind::ConstraintViolation, "gamma_phase: U or V does not vanish (max |U| = " + std::to_string(out.max_u) +
                                                    ", max |V| = " + std::to_string(out.max_v) + ")");
  }
  out.gamma.push_back(0.0);
  out.gamma_imag.push_back(0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    out.gamma.push_back(out.gamma.back() + 0.5 * h * (re_integrand[k] + re_integrand[k - 1]));
    out.gamma_imag.push_back(out.gamma_imag.back() + 0.5 * h * (im_integrand[k] + im_integrand[k - 1]));
  }
  return out;
}

Trajectory assemble_solution(const std::vector<Complex>& cn, const std::vector<std::vector<double>>& gammas,
                             const std::vector<std::vector<StateVector>>& modes, const std::vector<double>& times) {
  if (cn.size() != gammas.size() || cn.size() != modes.size() || cn.empty()) {
    throw Error(ErrorKind::GridMismatch, "assemble_solution: coefficient, phase and mode counts differ");
  }
  for (std::size_t n = 0; n < cn.size(); ++n) {
    if (gammas[n].size() != times.size() || modes[n].size() != times.size()) {
      throw Error(ErrorKind::GridMismatch, "assemble_solution: mode " + std::to_string(n) + " is sampled on a different grid");
    }
  }
  Trajectory tr;
  tr.times = times;
  for (std::size_t k = 0; k < times.size(); ++k) {
    StateVector psi = StateVector::Zero(modes[0][k].size());
    for (std::size_t n = 0; n < cn.size(); ++n) {
      if (modes[n][k].size() != psi.size()) throw Error(ErrorKind::GridMismatch, "assemble_solution: mode dimensions differ");
      psi += cn[n] * std::exp(Complex(0.0, gammas[n][k])) * modes[n][k];
    }
    tr.states.push_back(std::move(psi));
  }
  return tr;
}

}  // namespace nhqm
