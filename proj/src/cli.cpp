#include "nhqm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <thread>

#include "nhqm/floquet.hpp"
#include "nhqm/metric.hpp"
#include "nhqm/model_io.hpp"

namespace nhqm {

using nlohmann::json;

namespace {

struct Options {
  std::string model_path;
  std::string out;
  std::size_t steps = 1000;
  double t0 = 0.0;
  double t1 = 10.0;
  std::optional<double> period;
  std::optional<Index> truncation;
  std::optional<double> tol;
  std::string sweep;
  std::string normalization = "unit-det";
  int levels = 4;
};

// A command yields a JSON report, a CSV table, or both.
struct Output {
  std::optional<json> report;
  std::optional<CsvTable> table;
};

ToleranceConfig tolerances(const Options& o, const LoadedModel& m) {
  ToleranceConfig cfg;
  if (o.tol) cfg.residual_tol = *o.tol;
  cfg.hbar = m.hbar;
  return cfg;
}

Output cmd_spectrum(const LoadedModel& m, const Options& o) {
  const ToleranceConfig cfg = tolerances(o, m);
  const Operator h = m.model.at(o.t0);
  const BiorthogonalSpectrum s = eig_general(h, cfg);
  const PTClassification pt = classify_pt(h, m.parity, cfg);
  json eig = json::array();
  for (Index k = 0; k < s.size(); ++k) eig.push_back(complex_to_json(s.eigenvalues[k]));
  json r{{"kind", to_string(m.kind)},
         {"t", o.t0},
         {"dimension", h.rows()},
         {"eigenvalues", eig},
         {"classification", to_string(pt.kind)},
         {"pt_residual", pt.pt_residual},
         {"eigenvector_condition", s.condition},
         {"max_residual", s.max_residual}};
  return {r, std::nullopt};
}

MetricPair build_metric(const LoadedModel& m, const Options& o, const Operator& h) {
  const ToleranceConfig cfg = tolerances(o, m);
  MetricPair mp = metric_from_spectrum(eig_general(h, cfg), cfg);
  if (o.normalization == "unit-det") return normalize_unit_determinant(mp);
  return mp;
}

Output cmd_metric(const LoadedModel& m, const Options& o) {
  const Operator h = m.model.at(o.t0);
  const MetricPair mp = build_metric(m, o, h);
  const HermitianEquivalent he = hermitian_equivalent(h, mp);
  json r{{"kind", to_string(m.kind)},
         {"t", o.t0},
         {"normalization", o.normalization},
         {"eta", matrix_to_json(mp.eta)},
         {"eta_inv", matrix_to_json(mp.eta_inv)},
         {"rho", matrix_to_json(mp.rho)},
         {"h", matrix_to_json(he.h)},
         {"pseudo_hermiticity_residual", pseudo_hermiticity_residual(h, mp.eta)},
         {"hermiticity_residual", he.transform_residual}};
  return {r, std::nullopt};
}

Output cmd_evolve(const LoadedModel& m, const Options& o) {
  std::optional<Operator> eta;
  if (m.model.time_independent()) {
    try {
      eta = build_metric(m, o, m.model.at(o.t0)).eta;
    } catch (const Error&) {
      // No metric (broken symmetry, exceptional point): report ||psi||^2.
    }
  }
  const Operator plain = identity(m.model.dim());
  const Trajectory tr = integrate_schrodinger(m.model, m.psi0, o.t0, o.t1, o.steps, m.hbar, eta ? eta : plain);
  CsvTable t;
  t.header.push_back("t");
  for (Index k = 0; k < m.model.dim(); ++k) {
    t.header.push_back("re_" + std::to_string(k));
    t.header.push_back("im_" + std::to_string(k));
  }
  t.header.push_back("pseudo_norm");
  for (std::size_t s = 0; s < tr.times.size(); ++s) {
    std::vector<std::string> row{format_double(tr.times[s])};
    for (Index k = 0; k < m.model.dim(); ++k) {
      row.push_back(format_double(tr.states[s][k].real()));
      row.push_back(format_double(tr.states[s][k].imag()));
    }
    row.push_back(format_double(tr.norms_eta[s]));
    t.rows.push_back(std::move(row));
  }
  return {std::nullopt, t};
}

Output cmd_floquet(const LoadedModel& m, const Options& o) {
  const std::optional<double> tau = o.period ? o.period : m.period();
  if (!tau) throw Error(ErrorKind::UsageError, "floquet: --period is required for this model");
  const ToleranceConfig cfg = tolerances(o, m);
  const OperatorSamples u = evolution_operator(m.model, 0.0, *tau, o.steps, m.hbar, o.steps);
  const FloquetResult fr = floquet_decompose(u, *tau, m.hbar, cfg);
  CsvTable t;
  if (m.oscillator) {
    // One row per Fock level, paired with its dominant Floquet mode.
    t.header = {"fock_level", "index", "re", "im", "stability", "unfolded", "closed_form", "relative_error"};
    for (const QuasienergyMatch& q : match_quasienergies(fr, *m.oscillator, static_cast<int>(fr.quasienergies.size()) - 1)) {
      t.rows.push_back({std::to_string(q.n), std::to_string(q.index), format_double(q.strip.real()),
                        format_double(q.strip.imag()), to_string(fr.stability), format_double(q.unfolded),
                        format_double(q.closed_form), format_double(q.relative_error)});
    }
  } else {
    t.header = {"index", "re", "im", "stability"};
    for (Index j = 0; j < fr.quasienergies.size(); ++j) {
      t.rows.push_back({std::to_string(j), format_double(fr.quasienergies[j].real()),
                        format_double(fr.quasienergies[j].imag()), to_string(fr.stability)});
    }
  }
  return {std::nullopt, t};
}

double real_part_checked(const Expression& e, double t, const char* name) {
  const Complex z = e.eval(t);
  if (std::abs(z.imag()) > 1e-14 * std::max(1.0, std::abs(z.real()))) {
    throw Error(ErrorKind::SchemaError, std::string("invariant: '") + name + "' must be real");
  }
  return z.real();
}

Output cmd_invariant(const LoadedModel& m, const Options& o) {
  if (!m.swanson) throw Error(ErrorKind::UsageError, "invariant: only swanson models are supported");
  const SwansonSetup& sw = *m.swanson;
  AuxiliaryFunctions aux;
  bool is_static = false;
  if (sw.phi) {
    const Expression phi = *sw.phi, chi = *sw.chi;
    aux.phi = [phi](double t) { return real_part_checked(phi, t, "Phi"); };
    aux.chi = [chi](double t) { return real_part_checked(chi, t, "chi"); };
    aux.vartheta0 = [phi, chi](double t) {
      const double p = real_part_checked(phi, t, "Phi");
      return p * p - real_part_checked(chi, t, "chi");
    };
  } else {
    if (sw.omega.depends_on_t() || sw.alpha.depends_on_t() || sw.beta.depends_on_t()) {
      throw Error(ErrorKind::UsageError, "invariant: time-dependent coefficients need explicit 'Phi' and 'chi'");
    }
    const Complex w = sw.omega.eval(0.0), a = sw.alpha.eval(0.0), b = sw.beta.eval(0.0);
    if (w.imag() != 0.0 || a.imag() != 0.0 || b.imag() != 0.0) {
      throw Error(ErrorKind::UsageError, "invariant: complex constant coefficients need explicit 'Phi' and 'chi'");
    }
    const StaticSolution s = static_constraint_solution(w.real(), a.real(), b.real());
    aux = AuxiliaryFunctions::constant(s.phi, s.chi, s.vartheta0);
    is_static = true;
  }

  const Index n = m.truncation;
  const Index block = n / 2;
  const int levels = static_cast<int>(std::min<Index>(o.levels, block));
  const std::vector<double> grid = uniform_grid(o.t0, o.t1, o.steps);
  const InvariantPair ip = build_invariant_pair(aux, n, grid);

  OperatorSamples i_samples{grid, ip.i_ph};
  const std::vector<double> vn = von_neumann_residual(i_samples, m.model, m.hbar, block);

  std::vector<std::vector<double>> gammas;
  double max_constraint = 0.0, max_u = 0.0, max_v = 0.0, max_gamma_imag = 0.0;
  for (int k = 0; k < levels; ++k) {
    const GammaPhase g = gamma_phase(sw.coeffs, aux, ip.k_n[static_cast<std::size_t>(k)], grid, m.hbar);
    max_constraint = std::max(max_constraint, g.max_constraint);
    max_u = std::max(max_u, g.max_u);
    max_v = std::max(max_v, g.max_v);
    for (double gi : g.gamma_imag) max_gamma_imag = std::max(max_gamma_imag, std::abs(gi));
    gammas.push_back(g.gamma);
  }

  // Assemble the state from the invariant eigenmodes and check it against H.
  std::vector<std::vector<StateVector>> modes(static_cast<std::size_t>(levels));
  double eigen_residual = 0.0;
  StateVector coeffs0;
  std::vector<StateVector> phis;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const DysonMap d = swanson_dyson_map(aux.phi(grid[s]), aux.vartheta0(grid[s]), n);
    if (s == 0) coeffs0 = d.rho * m.psi0;
    // A static invariant has the same modes at every time.
    if (s == 0 || !is_static) phis = swanson_modes(ip.i_ph[s], d.rho, ip.k_n, levels);
    for (int k = 0; k < levels; ++k) {
      const StateVector& mode = phis[static_cast<std::size_t>(k)];
      const double kn = ip.k_n[static_cast<std::size_t>(k)];
      eigen_residual = std::max(eigen_residual, (ip.i_ph[s] * mode - kn * mode).norm() / mode.norm());
      modes[static_cast<std::size_t>(k)].push_back(mode);
    }
  }
  std::vector<Complex> cn;
  for (int k = 0; k < levels; ++k) cn.push_back(coeffs0[k]);
  const Trajectory tr = assemble_solution(cn, gammas, modes, grid);
  double schrodinger = 0.0;
  if (grid.size() >= 5) {
    for (double r : schrodinger_residual(tr, m.model, m.hbar)) schrodinger = std::max(schrodinger, r);
  }

  json r{{"kind", to_string(m.kind)},
         {"static", is_static},
         {"truncation", n},
         {"block", block},
         {"levels", levels},
         {"Phi_t0", aux.phi(o.t0)},
         {"chi_t0", aux.chi(o.t0)},
         {"vartheta0_t0", aux.vartheta0(o.t0)},
         {"constraint_residual", max_constraint},
         {"max_abs_U", max_u},
         {"max_abs_V", max_v},
         {"max_abs_gamma_imag", max_gamma_imag},
         {"von_neumann_residual", *std::max_element(vn.begin(), vn.end())},
         {"eigen_residual", eigen_residual},
         {"schrodinger_residual", schrodinger}};

  CsvTable t;
  t.header.push_back("t");
  for (int k = 0; k < levels; ++k) t.header.push_back("gamma_" + std::to_string(k));
  for (std::size_t s = 0; s < grid.size(); ++s) {
    std::vector<std::string> row{format_double(grid[s])};
    for (int k = 0; k < levels; ++k) row.push_back(format_double(gammas[static_cast<std::size_t>(k)][s]));
    t.rows.push_back(std::move(row));
  }
  return {r, t};
}

using Command = Output (*)(const LoadedModel&, const Options&);

struct Sweep {
  std::string name;
  std::vector<double> values;
};

Sweep parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  const auto c1 = spec.find(':', eq == std::string::npos ? 0 : eq);
  const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
  if (eq == std::string::npos || eq == 0 || c1 == std::string::npos || c2 == std::string::npos) {
    throw Error(ErrorKind::UsageError, "--sweep expects param=start:stop:count, got '" + spec + "'");
  }
  Sweep s;
  s.name = spec.substr(0, eq);
  double start = 0.0, stop = 0.0;
  long count = 0;
  try {
    std::size_t used = 0;
    const std::string a = spec.substr(eq + 1, c1 - eq - 1), b = spec.substr(c1 + 1, c2 - c1 - 1), c = spec.substr(c2 + 1);
    start = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    stop = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    count = std::stol(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::UsageError, "--sweep expects param=start:stop:count, got '" + spec + "'");
  }
  if (count < 1) throw Error(ErrorKind::UsageError, "--sweep count must be at least 1");
  for (long k = 0; k < count; ++k) {
    s.values.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return s;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NHQM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw Error(ErrorKind::UsageError, std::string("NHQM_THREADS must be a positive integer, got '") + env + "'");
    }
    n = std::min(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs the command once per sweep value. Workers pull indices from a shared
// counter and write into their own slot, so the merged output follows the
// parameter order regardless of scheduling.
std::vector<Output> run_sweep(Command cmd, const json& doc, const Options& o, const Sweep& sweep) {
  const std::size_t jobs = sweep.values.size();
  std::vector<Output> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      try {
        const LoadedModel m = model_from_json(with_parameter(doc, sweep.name, sweep.values[k]), {o.truncation}, o.model_path);
        results[k] = cmd(m, o);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = worker_count(jobs);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < nthreads; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

Output merge_sweep(const Sweep& sweep, std::vector<Output>& parts) {
  Output out;
  if (parts.front().report) {
    json arr = json::array();
    for (std::size_t k = 0; k < parts.size(); ++k) {
      arr.push_back(json{{"parameter", sweep.name}, {"value", sweep.values[k]}, {"result", *parts[k].report}});
    }
    out.report = std::move(arr);
  }
  if (parts.front().table) {
    CsvTable t;
    t.header.push_back(sweep.name);
    const auto& h = parts.front().table->header;
    t.header.insert(t.header.end(), h.begin(), h.end());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      for (auto& row : parts[k].table->rows) {
        row.insert(row.begin(), format_double(sweep.values[k]));
        t.rows.push_back(std::move(row));
      }
    }
    out.table = std::move(t);
  }
  return out;
}

void emit(const Output& out, const Options& o) {
  if (out.report && out.table) {
    if (!o.out.empty()) write_output(o.out, out.table->to_string());
    write_output("", out.report->dump(2) + "\n");
  } else if (out.report) {
    write_output(o.out, out.report->dump(2) + "\n");
  } else if (out.table) {
    write_output(o.out, out.table->to_string());
  }
}

void execute(Command cmd, const Options& o) {
  const json doc = read_json_file(o.model_path);
  if (o.sweep.empty()) {
    emit(cmd(model_from_json(doc, {o.truncation}, o.model_path), o), o);
    return;
  }
  const Sweep sweep = parse_sweep(o.sweep);
  std::vector<Output> parts = run_sweep(cmd, doc, o, sweep);
  emit(merge_sweep(sweep, parts), o);
}

int report_error(const std::string& what, int code) {
  std::string line = what;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::cerr << "nhqm: " << line << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Non-Hermitian quantum mechanics toolkit"};
  app.require_subcommand(1);
  Options o;
  Command chosen = nullptr;

  auto add = [&](const char* name, const char* help, Command cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("model", o.model_path, "Model JSON file")->required();
    sub->add_option("--out", o.out, "Output file (default: stdout)");
    sub->add_option("--t0", o.t0, "Start time");
    sub->add_option("--truncation", o.truncation, "Fock truncation override");
    sub->add_option("--tol", o.tol, "Residual tolerance");
    sub->add_option("--sweep", o.sweep, "param=start:stop:count");
    sub->callback([&chosen, cmd] { chosen = cmd; });
    return sub;
  };
  CLI::App* spectrum = add("spectrum", "Eigenvalues and PT classification of H(t0)", cmd_spectrum);
  (void)spectrum;
  CLI::App* metric = add("metric", "Metric, Dyson map and Hermitian equivalent of H(t0)", cmd_metric);
  metric->add_option("--normalization", o.normalization, "unit-det or unit-right")
      ->check(CLI::IsMember({"unit-det", "unit-right"}));
  CLI::App* evolve = add("evolve", "Integrate the Schrodinger equation and write the trajectory", cmd_evolve);
  evolve->add_option("--t1", o.t1, "End time");
  evolve->add_option("--steps", o.steps, "Time steps")->check(CLI::PositiveNumber);
  evolve->add_option("--normalization", o.normalization, "Metric normalization for the pseudo-norm")
      ->check(CLI::IsMember({"unit-det", "unit-right"}));
  CLI::App* floquet = add("floquet", "Quasi-energies and stability over one drive period", cmd_floquet);
  floquet->add_option("--period", o.period, "Drive period (default: the model's own)");
  floquet->add_option("--steps", o.steps, "Steps per period")->check(CLI::Range(10, 100000000));
  CLI::App* invariant = add("invariant", "Swanson pseudo-invariant phases and residuals", cmd_invariant);
  invariant->add_option("--t1", o.t1, "End time");
  invariant->add_option("--steps", o.steps, "Grid intervals")->check(CLI::PositiveNumber);
  invariant->add_option("--levels", o.levels, "Number of invariant eigenmodes to report")->check(CLI::Range(1, 1000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return report_error(std::string("usage error: ") + e.what(), 2);
  }

  try {
    execute(chosen, o);
  } catch (const Error& e) {
    return report_error(e.what(), is_input_error(e.kind()) ? 2 : 3);
  } catch (const std::exception& e) {
    return report_error(std::string("internal error: ") + e.what(), 3);
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"nhqm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace nhqm
