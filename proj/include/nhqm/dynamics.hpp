#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nhqm/linalg.hpp"

namespace nhqm {

using Coefficient = std::function<Complex(double)>;

// H(t) = sum_k coeffs[k](t) * basis_ops[k].
class TimeDependentModel {
public:
  TimeDependentModel() = default;
  explicit TimeDependentModel(Index dim) : dim_(dim) {}

  static TimeDependentModel constant(const Operator& h);

  void add_term(Operator op, Coefficient coeff);
  void add_constant(Operator op, Complex value = 1.0);
  Operator at(double t) const;
  Index dim() const { return dim_; }
  // True when every coefficient is a known constant, so H(t) never changes.
  bool time_independent() const { return time_independent_; }

  const std::vector<Operator>& basis_ops() const { return basis_ops_; }
  const std::vector<Coefficient>& coeffs() const { return coeffs_; }

private:
  Index dim_ = 0;
  std::vector<Operator> basis_ops_;
  std::vector<Coefficient> coeffs_;
  std::vector<std::size_t> dynamic_terms_;
  Operator static_part_;
  bool time_independent_ = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norms_eta;
};

struct OperatorSamples {
  std::vector<double> times;
  std::vector<Operator> ops;

  std::size_t size() const { return ops.size(); }
};

std::vector<double> uniform_grid(double t0, double t1, std::size_t intervals);

// Midpoint exponential stepping psi_{k+1} = exp(-i dt H(t_k + dt/2) / hbar) psi_k.
// When `eta` is supplied the pseudo-norm <psi|eta|psi> is recorded per step.
Trajectory integrate_schrodinger(const TimeDependentModel& model, const StateVector& psi0, double t0, double t1,
                                 std::size_t steps, double hbar = 1.0,
                                 const std::optional<Operator>& eta = std::nullopt);

// U(t, t0) with the same stepping. Every `sample_every`-th step is stored, and
// the final time is always included.
OperatorSamples evolution_operator(const TimeDependentModel& model, double t0, double t1, std::size_t steps,
                                   double hbar = 1.0, std::size_t sample_every = 1);

// Centered differences on a uniform grid, second-order one-sided at the ends.
OperatorSamples differentiate(const OperatorSamples& samples);
std::vector<StateVector> differentiate(const std::vector<StateVector>& states, double dt);

// Fourth-order centered estimate of ||i hbar dPsi/dt - H Psi|| / ||Psi|| on the
// grid points that have two neighbours on each side.
std::vector<double> schrodinger_residual(const Trajectory& tr, const TimeDependentModel& model, double hbar = 1.0);

// H_gen = H - i hbar rho^-1 rho_dot.
Operator znojil_generator(const Operator& h, const Operator& rho, const Operator& rho_dot, double hbar = 1.0);

// ||H^+ eta - eta H - i hbar eta_dot|| / (||eta|| (||H|| + 1)). With `block` > 0
// only the leading block x block corner enters the norms.
double fring_residual(const Operator& h, const Operator& eta, const Operator& eta_dot, double hbar = 1.0,
                      Index block = 0);

// ||dI/dt - (i/hbar)[I, H]|| / ||I|| per sample, with centered differences.
// With `block` > 0 only the leading block x block corner is measured.
std::vector<double> von_neumann_residual(const OperatorSamples& i_samples, const TimeDependentModel& model,
                                         double hbar = 1.0, Index block = 0);

// eta(t) = [U(t)^+]^-1 eta0 U(t)^-1.
OperatorSamples eta_transport(const OperatorSamples& u_samples, const Operator& eta0);

struct GeneratorReport {
  std::vector<double> times;
  std::vector<Operator> h_gen;
  std::vector<double> fring_residual;
  std::vector<Operator> mostafazadeh_term;
  // Both operator orderings of the time-dependent Dyson relation, with the
  // relative anti-Hermitian part of each.
  std::vector<Operator> h_dyson;           // rho H rho^-1 + i hbar rho_dot rho^-1
  std::vector<Operator> h_dyson_reversed;  // rho H rho^-1 - i hbar rho^-1 rho_dot
  std::vector<double> h_dyson_hermiticity;
  std::vector<double> h_dyson_reversed_hermiticity;
};

GeneratorReport generator_report(const TimeDependentModel& model, const OperatorSamples& rho_samples,
                                 double hbar = 1.0, Index block = 0);

}  // namespace nhqm
