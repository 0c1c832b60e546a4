#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nhqm/driven_oscillator.hpp"
#include "nhqm/dynamics.hpp"
#include "nhqm/expression.hpp"
#include "nhqm/swanson.hpp"
#include "nhqm/symmetry.hpp"

namespace nhqm {

enum class ModelKind { Matrix, Brachistochrone, DrivenOscillator, Swanson };

std::string_view to_string(ModelKind kind);

struct SwansonSetup {
  SwansonCoefficients coeffs;
  Expression omega, alpha, beta;
  // Present when the file supplies Phi(t) and chi(t) explicitly.
  std::optional<Expression> phi, chi;
};

struct LoadedModel {
  ModelKind kind = ModelKind::Matrix;
  std::string source;
  TimeDependentModel model;
  ParityOperator parity = ParityOperator::identity(1);
  StateVector psi0;
  double hbar = 1.0;
  Index truncation = 0;
  std::optional<OscillatorParams> oscillator;
  std::optional<SwansonSetup> swanson;

  // Natural drive period when the model has one.
  std::optional<double> period() const;
};

struct LoadOptions {
  // Overrides the Fock truncation N of oscillator and Swanson models.
  std::optional<Index> truncation;
};

// Model files are JSON objects with a "kind" field. Numeric fields also accept
// constant expression strings such as "pi/2".
//
//   matrix            H (array of arrays of expressions in t), optional
//                     parameters, parity, psi0, hbar
//   brachistochrone   r, s, theta, optional psi0, hbar
//   driven-oscillator omega0, lambda, omega, N, optional m, phi, hbar, psi0
//   swanson           omega, alpha, beta (expressions in t), N, optional
//                     hbar, Phi, chi (expressions in t), parameters, psi0
//
// Throws SchemaError naming every missing and unexpected field.
LoadedModel load_model(const std::string& path, const LoadOptions& opts = {});
LoadedModel model_from_json(const nlohmann::json& doc, const LoadOptions& opts = {}, const std::string& source = "<input>");

nlohmann::json read_json_file(const std::string& path);

// Sets a numeric model field or an entry of "parameters" on a copy of `doc`.
// Throws UsageError when the name matches neither.
nlohmann::json with_parameter(const nlohmann::json& doc, const std::string& name, double value);

// %.17g, so equal doubles always print identically.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Comma separated with LF line endings.
  std::string to_string() const;
};

nlohmann::json complex_to_json(Complex z);
nlohmann::json matrix_to_json(const Operator& m);

// Writes `content` to `path`, or to stdout when `path` is empty or "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace nhqm
