#include "nhqm/driven_oscillator.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nhqm {

namespace {

void require_off_resonance(const OscillatorParams& p, const char* what) {
  if (std::abs(p.omega - p.omega0) <= 1e-12 * std::max(1.0, std::abs(p.omega0))) {
    throw Error(ErrorKind::ResonanceError, std::string(what) + ": drive frequency equals the natural frequency");
  }
}

double detuning(const OscillatorParams& p) { return p.omega0 * p.omega0 - p.omega * p.omega; }

Complex hermite(int n, Complex z) {
  Complex prev = 1.0, cur = 2.0 * z;
  if (n == 0) return prev;
  for (int k = 1; k < n; ++k) {
    const Complex next = 2.0 * z * cur - 2.0 * static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

double OscillatorParams::period() const { return 2.0 * std::numbers::pi / omega; }

FockOperators fock_operators(Index n, double m, double omega0, double hbar) {
  if (n < 2) throw Error(ErrorKind::UsageError, "fock_operators: truncation must be at least 2");
  FockOperators f;
  f.a = Operator::Zero(n, n);
  for (Index k = 1; k < n; ++k) f.a(k - 1, k) = std::sqrt(static_cast<double>(k));
  f.adag = f.a.adjoint();
  f.x = std::sqrt(hbar / (2.0 * m * omega0)) * (f.a + f.adag);
  f.p = Complex(0.0, std::sqrt(hbar * m * omega0 / 2.0)) * (f.adag - f.a);
  return f;
}

Operator build_hamiltonian(const OscillatorParams& params, Index n, double t) {
  return oscillator_model(params, n).at(t);
}

TimeDependentModel oscillator_model(const OscillatorParams& params, Index n) {
  const FockOperators f = fock_operators(n, params.m, params.omega0, params.hbar);
  Operator h0 = Operator::Zero(n, n);
  for (Index k = 0; k < n; ++k) h0(k, k) = params.hbar * params.omega0 * (static_cast<double>(k) + 0.5);
  TimeDependentModel model(n);
  model.add_constant(h0);
  if (params.lambda != 0.0) {
    const double lam = params.lambda, w = params.omega, ph = params.phi;
    model.add_term(f.x, [lam, w, ph](double t) { return Complex(0.0, -lam * std::cos(w * t + ph)); });
  }
  return model;
}

ClassicalSolution classical_solution(const OscillatorParams& params, double t) {
  require_off_resonance(params, "classical_solution");
  const double d = detuning(params);
  const double arg = params.omega * t + params.phi;
  return {Complex(params.lambda * std::cos(arg) / (params.m * d), 0.0),
          Complex(0.0, -params.lambda * params.omega * std::sin(arg) / d)};
}

double quasienergy_closed_form(const OscillatorParams& params, int n) {
  require_off_resonance(params, "quasienergy_closed_form");
  if (n < 0) throw Error(ErrorKind::UsageError, "quasienergy_closed_form: n must be non-negative");
  return params.hbar * params.omega0 * (n + 0.5) + params.lambda * params.lambda / (4.0 * params.m * detuning(params));
}

std::vector<Complex> floquet_mode(const OscillatorParams& params, int n, const std::vector<double>& x_grid, double t) {
  require_off_resonance(params, "floquet_mode");
  if (n < 0) throw Error(ErrorKind::UsageError, "floquet_mode: n must be non-negative");
  const double m = params.m, w0 = params.omega0, w = params.omega, lam = params.lambda, hb = params.hbar;
  const double d = detuning(params);
  const double arg = w * t + params.phi;
  const ClassicalSolution cs = classical_solution(params, t);
  const double xc = cs.x_c.real();

  const double norm = std::exp(-0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0))) * std::pow(m * w0 / (std::numbers::pi * hb), 0.25);
  const double sq = lam * std::sin(arg) / (2.0 * d);
  const double eps = quasienergy_closed_form(params, n);
  // Periodic part of the classical action.
  const double action = lam * lam / (8.0 * m * w * d) * (std::sin(2.0 * arg) - std::sin(2.0 * params.phi)) +
                        lam * lam * w / (2.0 * m * d * d) * std::sin(w * t);
  const Complex prefactor = norm * std::exp(Complex(0.0, -(w / m) * sq * sq / hb)) *
                            std::exp(Complex(0.0, -eps * t / hb)) * std::exp(Complex(0.0, -action / hb));

  std::vector<Complex> out;
  out.reserve(x_grid.size());
  const double scale = std::sqrt(m * w0 / hb);
  for (double x : x_grid) {
    const double y = x - xc;
    const Complex drift = std::exp(Complex(0.0, -1.0 / hb) * cs.p_c * y);
    const double gauss = std::exp(-0.5 * m * w0 * y * y / hb);
    out.push_back(prefactor * drift * gauss * std::hermite(static_cast<unsigned>(n), scale * y));
  }
  return out;
}

std::vector<Complex> floquet_mode_exact(const OscillatorParams& params, int n, const std::vector<double>& x_grid,
                                        double t) {
  require_off_resonance(params, "floquet_mode_exact");
  if (n < 0) throw Error(ErrorKind::UsageError, "floquet_mode_exact: n must be non-negative");
  const double m = params.m, w0 = params.omega0, w = params.omega, lam = params.lambda, hb = params.hbar;
  const double d = detuning(params);
  const double arg = w * t + params.phi;
  const Complex centre(0.0, lam * std::cos(arg) / (m * d));
  const Complex momentum(0.0, -lam * w * std::sin(arg) / d);
  // Oscillating part of S with dS/dt = P^2/2m - m w0^2 X^2/2 - f X; its mean
  // -lambda^2/(4 m d) is carried by the quasi-energy.
  const double s_osc = lam * lam * (3.0 * w * w - w0 * w0) / (8.0 * m * w * d * d) *
                       (std::sin(2.0 * arg) - std::sin(2.0 * params.phi));
  const double norm = std::exp(-0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0))) * std::pow(m * w0 / (std::numbers::pi * hb), 0.25);
  const Complex prefactor = norm * std::exp(Complex(0.0, (s_osc - quasienergy_closed_form(params, n) * t) / hb));
  const double scale = std::sqrt(m * w0 / hb);

  std::vector<Complex> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    const Complex y = x - centre;
    const Complex phase = Complex(0.0, 1.0 / hb) * momentum * y - 0.5 * m * w0 * y * y / hb;
    out.push_back(prefactor * std::exp(phase) * hermite(n, scale * y));
  }
  return out;
}

std::vector<QuasienergyMatch> match_quasienergies(const FloquetResult& fr, const OscillatorParams& params, int n_max) {
  std::vector<QuasienergyMatch> out;
  const Index dim = fr.modes.right.rows();
  for (int n = 0; n <= n_max && n < dim; ++n) {
    QuasienergyMatch q;
    q.n = n;
    for (Index j = 0; j < fr.modes.size(); ++j) {
      const double wgt = std::abs(fr.modes.right(n, j) * std::conj(fr.modes.left(n, j)));
      if (wgt > q.weight) {
        q.weight = wgt;
        q.index = j;
      }
    }
    q.strip = fr.quasienergies[q.index];
    q.closed_form = quasienergy_closed_form(params, n);
    const UnfoldedQuasienergy u = unfold_quasienergy(q.strip.real(), q.closed_form, fr.period, fr.hbar);
    q.unfolded = u.value;
    q.k = u.k;
    q.relative_error = std::abs(q.unfolded - q.closed_form) / std::abs(q.closed_form);
    out.push_back(q);
  }
  return out;
}

}  // namespace nhqm
