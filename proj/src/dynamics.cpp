#include "nhqm/dynamics.hpp"

#include <cmath>
#include <string>

namespace nhqm {

TimeDependentModel TimeDependentModel::constant(const Operator& h) {
  require_square(h, "TimeDependentModel::constant");
  TimeDependentModel m(h.rows());
  m.add_constant(h);
  return m;
}

void TimeDependentModel::add_term(Operator op, Coefficient coeff) {
  if (dim_ == 0 && basis_ops_.empty()) dim_ = op.rows();
  require_square(op, "TimeDependentModel::add_term");
  if (op.rows() != dim_) throw Error(ErrorKind::DimensionMismatch, "TimeDependentModel: basis operator dimension mismatch");
  dynamic_terms_.push_back(basis_ops_.size());
  basis_ops_.push_back(std::move(op));
  coeffs_.push_back(std::move(coeff));
  time_independent_ = false;
}

void TimeDependentModel::add_constant(Operator op, Complex value) {
  if (dim_ == 0 && basis_ops_.empty()) dim_ = op.rows();
  require_square(op, "TimeDependentModel::add_constant");
  if (op.rows() != dim_) throw Error(ErrorKind::DimensionMismatch, "TimeDependentModel: basis operator dimension mismatch");
  if (static_part_.size() == 0) static_part_ = Operator::Zero(dim_, dim_);
  static_part_ += value * op;
  basis_ops_.push_back(std::move(op));
  coeffs_.push_back([value](double) { return value; });
}

Operator TimeDependentModel::at(double t) const {
  Operator h = static_part_.size() == 0 ? Operator::Zero(dim_, dim_) : static_part_;
  for (std::size_t k : dynamic_terms_) h += coeffs_[k](t) * basis_ops_[k];
  return h;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t intervals) {
  std::vector<double> g(intervals + 1);
  const double dt = (t1 - t0) / static_cast<double>(intervals);
  for (std::size_t k = 0; k <= intervals; ++k) g[k] = t0 + static_cast<double>(k) * dt;
  g[intervals] = t1;
  return g;
}

namespace {

void require_steps(std::size_t steps, const char* what) {
  if (steps < 1) throw Error(ErrorKind::UsageError, std::string(what) + ": at least one step is required");
}

// Propagator for the step starting at t_k; reused when H does not depend on t.
class Stepper {
public:
  Stepper(const TimeDependentModel& model, double dt, double hbar) : model_(model), dt_(dt), hbar_(hbar) {
    if (model.time_independent()) fixed_ = expm(model.at(0.0), Complex(0.0, -dt / hbar));
  }
  const Operator& step(double t_k) {
    if (model_.time_independent()) return fixed_;
    current_ = expm(model_.at(t_k + 0.5 * dt_), Complex(0.0, -dt_ / hbar_));
    return current_;
  }

private:
  const TimeDependentModel& model_;
  double dt_;
  double hbar_;
  Operator fixed_;
  Operator current_;
};

}  // namespace

Trajectory integrate_schrodinger(const TimeDependentModel& model, const StateVector& psi0, double t0, double t1,
                                 std::size_t steps, double hbar, const std::optional<Operator>& eta) {
  require_steps(steps, "integrate_schrodinger");
  if (psi0.size() != model.dim()) throw Error(ErrorKind::DimensionMismatch, "integrate_schrodinger: psi0 dimension mismatch");
  if (eta && eta->rows() != model.dim()) throw Error(ErrorKind::DimensionMismatch, "integrate_schrodinger: eta dimension mismatch");
  Trajectory tr;
  tr.times = uniform_grid(t0, t1, steps);
  tr.states.reserve(steps + 1);
  tr.states.push_back(psi0);
  const double dt = (t1 - t0) / static_cast<double>(steps);
  Stepper stepper(model, dt, hbar);
  for (std::size_t k = 0; k < steps; ++k) {
    StateVector next = stepper.step(tr.times[k]) * tr.states.back();
    if (!all_finite(next)) {
      throw Error(ErrorKind::NonFinite, "integrate_schrodinger: state became non-finite at step " + std::to_string(k + 1),
                  k + 1);
    }
    tr.states.push_back(std::move(next));
  }
  if (eta) {
    tr.norms_eta.reserve(tr.states.size());
    for (const auto& s : tr.states) tr.norms_eta.push_back(s.dot(*eta * s).real());
  }
  return tr;
}

OperatorSamples evolution_operator(const TimeDependentModel& model, double t0, double t1, std::size_t steps,
                                   double hbar, std::size_t sample_every) {
  require_steps(steps, "evolution_operator");
  if (sample_every == 0) sample_every = 1;
  const auto grid = uniform_grid(t0, t1, steps);
  const double dt = (t1 - t0) / static_cast<double>(steps);
  OperatorSamples out;
  Operator u = Operator::Identity(model.dim(), model.dim());
  out.times.push_back(grid[0]);
  out.ops.push_back(u);
  Stepper stepper(model, dt, hbar);
  for (std::size_t k = 0; k < steps; ++k) {
    u = stepper.step(grid[k]) * u;
    if (!all_finite(u)) {
      throw Error(ErrorKind::NonFinite, "evolution_operator: propagator became non-finite at step " + std::to_string(k + 1),
                  k + 1);
    }
    if ((k + 1) % sample_every == 0 || k + 1 == steps) {
      out.times.push_back(grid[k + 1]);
      out.ops.push_back(u);
    }
  }
  return out;
}

namespace {

template <typename T>
std::vector<T> finite_difference(const std::vector<T>& f, double dt) {
  const std::size_t n = f.size();
  if (n < 3) throw Error(ErrorKind::GridMismatch, "differentiate: at least three samples are required");
  std::vector<T> d(n);
  const double inv2 = 1.0 / (2.0 * dt);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) * inv2;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2;
  return d;
}

double grid_step(const std::vector<double>& times) {
  if (times.size() < 2) throw Error(ErrorKind::GridMismatch, "grid has fewer than two points");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw Error(ErrorKind::GridMismatch, "grid is not uniform");
    }
  }
  return dt;
}

}  // namespace

OperatorSamples differentiate(const OperatorSamples& samples) {
  if (samples.times.size() != samples.ops.size()) throw Error(ErrorKind::GridMismatch, "differentiate: times/ops mismatch");
  const double dt = grid_step(samples.times);
  return {samples.times, finite_difference(samples.ops, dt)};
}

std::vector<StateVector> differentiate(const std::vector<StateVector>& states, double dt) {
  return finite_difference(states, dt);
}

std::vector<double> schrodinger_residual(const Trajectory& tr, const TimeDependentModel& model, double hbar) {
  const std::size_t n = tr.states.size();
  if (n != tr.times.size() || n < 5) throw Error(ErrorKind::GridMismatch, "schrodinger_residual: need at least five samples");
  const double dt = grid_step(tr.times);
  std::vector<double> out;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const StateVector d =
        (tr.states[k - 2] - 8.0 * tr.states[k - 1] + 8.0 * tr.states[k + 1] - tr.states[k + 2]) / (12.0 * dt);
    const StateVector r = Complex(0.0, hbar) * d - model.at(tr.times[k]) * tr.states[k];
    out.push_back(r.norm() / tr.states[k].norm());
  }
  return out;
}

Operator znojil_generator(const Operator& h, const Operator& rho, const Operator& rho_dot, double hbar) {
  require_same_dim(h, rho, "znojil_generator");
  require_same_dim(h, rho_dot, "znojil_generator");
  return h - Complex(0.0, hbar) * checked_inverse(rho, "znojil_generator") * rho_dot;
}

double fring_residual(const Operator& h, const Operator& eta, const Operator& eta_dot, double hbar, Index block) {
  require_same_dim(h, eta, "fring_residual");
  require_same_dim(h, eta_dot, "fring_residual");
  const Operator r = h.adjoint() * eta - eta * h - Complex(0.0, hbar) * eta_dot;
  const Index b = (block > 0 && block < h.rows()) ? block : h.rows();
  const double den = eta.topLeftCorner(b, b).norm() * (h.topLeftCorner(b, b).norm() + 1.0);
  if (den == 0.0) return 0.0;
  return r.topLeftCorner(b, b).norm() / den;
}

std::vector<double> von_neumann_residual(const OperatorSamples& i_samples, const TimeDependentModel& model,
                                         double hbar, Index block) {
  const OperatorSamples d = differentiate(i_samples);
  const Index n = model.dim();
  const Index b = (block > 0 && block < n) ? block : n;
  std::vector<double> out;
  out.reserve(i_samples.size());
  for (std::size_t k = 0; k < i_samples.size(); ++k) {
    const Operator& inv = i_samples.ops[k];
    if (inv.rows() != n || inv.cols() != n) throw Error(ErrorKind::DimensionMismatch, "von_neumann_residual: dimension mismatch");
    const Operator r = d.ops[k] - Complex(0.0, 1.0 / hbar) * commutator(inv, model.at(i_samples.times[k]));
    const double in = inv.topLeftCorner(b, b).norm();
    out.push_back(in > 0 ? r.topLeftCorner(b, b).norm() / in : r.topLeftCorner(b, b).norm());
  }
  return out;
}

OperatorSamples eta_transport(const OperatorSamples& u_samples, const Operator& eta0) {
  OperatorSamples out;
  out.times = u_samples.times;
  out.ops.reserve(u_samples.ops.size());
  for (const auto& u : u_samples.ops) {
    require_same_dim(u, eta0, "eta_transport");
    const Operator w = checked_inverse(u, "eta_transport");
    out.ops.push_back(w.adjoint() * eta0 * w);
  }
  return out;
}

GeneratorReport generator_report(const TimeDependentModel& model, const OperatorSamples& rho_samples, double hbar,
                                 Index block) {
  const OperatorSamples rho_dot = differentiate(rho_samples);
  OperatorSamples eta{rho_samples.times, {}};
  OperatorSamples eta_inv{rho_samples.times, {}};
  std::vector<Operator> rho_inv;
  for (const auto& r : rho_samples.ops) {
    rho_inv.push_back(checked_inverse(r, "generator_report"));
    eta.ops.push_back(r.adjoint() * r);
    eta_inv.ops.push_back(rho_inv.back() * rho_inv.back().adjoint());
  }
  const OperatorSamples eta_dot = differentiate(eta);
  const OperatorSamples eta_inv_dot = differentiate(eta_inv);
  const Complex ih(0.0, hbar);
  const Index n = model.dim();
  const Index b = (block > 0 && block < n) ? block : n;

  GeneratorReport rep;
  rep.times = rho_samples.times;
  for (std::size_t k = 0; k < rho_samples.size(); ++k) {
    const Operator h = model.at(rho_samples.times[k]);
    rep.h_gen.push_back(h - ih * rho_inv[k] * rho_dot.ops[k]);
    rep.fring_residual.push_back(fring_residual(h, eta.ops[k], eta_dot.ops[k], hbar, block));
    rep.mostafazadeh_term.push_back(-ih * eta.ops[k] * eta_inv_dot.ops[k]);
    const Operator similar = rho_samples.ops[k] * h * rho_inv[k];
    rep.h_dyson.push_back(similar + ih * rho_dot.ops[k] * rho_inv[k]);
    rep.h_dyson_reversed.push_back(similar - ih * rho_inv[k] * rho_dot.ops[k]);
    auto herm = [b](const Operator& m) {
      const Operator c = m.topLeftCorner(b, b);
      const double cn = c.norm();
      return cn > 0 ? (c - c.adjoint()).norm() / cn : 0.0;
    };
    rep.h_dyson_hermiticity.push_back(herm(rep.h_dyson.back()));
    rep.h_dyson_reversed_hermiticity.push_back(herm(rep.h_dyson_reversed.back()));
  }
  return rep;
}

}  // namespace nhqm
