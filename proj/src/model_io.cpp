#include "nhqm/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace nhqm {

using nlohmann::json;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Matrix: return "matrix";
    case ModelKind::Brachistochrone: return "brachistochrone";
    case ModelKind::DrivenOscillator: return "driven-oscillator";
    case ModelKind::Swanson: return "swanson";
  }
  return "unknown";
}

std::optional<double> LoadedModel::period() const {
  if (oscillator) return oscillator->period();
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json matrix_to_json(const Operator& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "'" + path + "' is not valid JSON: " + e.what(), e.byte);
  }
}

namespace {

struct Schema {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const Schema& schema_for(ModelKind kind) {
  static const Schema matrix{{"H"}, {"parameters", "parity", "psi0", "hbar"}};
  static const Schema brach{{"r", "s", "theta"}, {"psi0", "hbar"}};
  static const Schema osc{{"omega0", "lambda", "omega", "N"}, {"m", "phi", "hbar", "psi0"}};
  static const Schema swanson{{"omega", "alpha", "beta", "N"}, {"hbar", "Phi", "chi", "parameters", "psi0"}};
  switch (kind) {
    case ModelKind::Matrix: return matrix;
    case ModelKind::Brachistochrone: return brach;
    case ModelKind::DrivenOscillator: return osc;
    case ModelKind::Swanson: return swanson;
  }
  return matrix;
}

ModelKind parse_kind(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaError, source + ": model must be a JSON object");
  if (!doc.contains("kind")) throw Error(ErrorKind::SchemaError, source + ": missing field(s): kind");
  if (!doc["kind"].is_string()) throw Error(ErrorKind::SchemaError, source + ": field 'kind' must be a string");
  const std::string k = doc["kind"].get<std::string>();
  if (k == "matrix") return ModelKind::Matrix;
  if (k == "brachistochrone") return ModelKind::Brachistochrone;
  if (k == "driven-oscillator") return ModelKind::DrivenOscillator;
  if (k == "swanson") return ModelKind::Swanson;
  throw Error(ErrorKind::SchemaError, source + ": unknown kind '" + k +
                                          "' (expected matrix, brachistochrone, driven-oscillator or swanson)");
}

void check_fields(const json& doc, const Schema& schema, const std::string& source) {
  std::vector<std::string> missing, extra;
  for (const auto& f : schema.required) {
    if (!doc.contains(f)) missing.push_back(f);
  }
  std::set<std::string> allowed(schema.required.begin(), schema.required.end());
  allowed.insert(schema.optional.begin(), schema.optional.end());
  allowed.insert("kind");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) extra.push_back(it.key());
  }
  if (missing.empty() && extra.empty()) return;
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  };
  std::string msg = source + ": schema error:";
  if (!missing.empty()) msg += " missing field(s): " + join(missing) + ";";
  if (!extra.empty()) msg += " unexpected field(s): " + join(extra) + ";";
  msg.pop_back();
  throw Error(ErrorKind::SchemaError, msg);
}

class FieldReader {
public:
  FieldReader(const json& doc, std::string source) : doc_(doc), source_(std::move(source)) {
    if (doc.contains("parameters")) {
      const json& p = doc["parameters"];
      if (!p.is_object()) throw Error(ErrorKind::SchemaError, source_ + ": 'parameters' must be an object");
      for (auto it = p.begin(); it != p.end(); ++it) {
        params_[it.key()] = constant(it.value(), "parameters." + it.key());
      }
    }
  }

  Expression expression(const json& v, const std::string& field) const {
    if (v.is_number()) return parse_expression(format_double(v.get<double>()));
    if (!v.is_string()) throw Error(ErrorKind::SchemaError, source_ + ": field '" + field + "' must be a number or string");
    try {
      return parse_expression(v.get<std::string>(), params_);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, source_ + ": field '" + field + "': " + e.what(), e.index());
    }
  }

  Complex constant(const json& v, const std::string& field) const {
    const Expression e = expression(v, field);
    if (e.depends_on_t()) {
      throw Error(ErrorKind::SchemaError, source_ + ": field '" + field + "' must not depend on t");
    }
    try {
      return e.eval(0.0);
    } catch (const Error& err) {
      throw Error(ErrorKind::ParseError, source_ + ": field '" + field + "': " + err.what(), err.index());
    }
  }

  double real(const std::string& field, std::optional<double> fallback = std::nullopt) const {
    if (!doc_.contains(field)) {
      if (fallback) return *fallback;
      throw Error(ErrorKind::SchemaError, source_ + ": missing field(s): " + field);
    }
    const Complex z = constant(doc_[field], field);
    if (z.imag() != 0.0) throw Error(ErrorKind::SchemaError, source_ + ": field '" + field + "' must be real");
    return z.real();
  }

  Index size(const std::string& field, const std::optional<Index>& override_value) const {
    if (override_value) return *override_value;
    const double v = real(field);
    if (v < 2.0 || v != static_cast<double>(static_cast<Index>(v))) {
      throw Error(ErrorKind::SchemaError, source_ + ": field '" + field + "' must be an integer >= 2");
    }
    return static_cast<Index>(v);
  }

  Operator matrix(const std::string& field) const {
    const json& m = doc_[field];
    if (!m.is_array() || m.empty()) throw Error(ErrorKind::SchemaError, source_ + ": '" + field + "' must be a non-empty array of rows");
    const Index n = static_cast<Index>(m.size());
    Operator out(n, n);
    for (Index i = 0; i < n; ++i) {
      const json& row = m[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n) {
        throw Error(ErrorKind::SchemaError, source_ + ": '" + field + "' must be square");
      }
      for (Index j = 0; j < n; ++j) {
        out(i, j) = constant(row[static_cast<std::size_t>(j)], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
    return out;
  }

  StateVector state(Index dim) const {
    StateVector psi = StateVector::Zero(dim);
    if (!doc_.contains("psi0")) {
      psi[0] = 1.0;
      return psi;
    }
    const json& v = doc_["psi0"];
    if (!v.is_array() || static_cast<Index>(v.size()) > dim || v.empty()) {
      throw Error(ErrorKind::SchemaError, source_ + ": 'psi0' must be an array of at most " + std::to_string(dim) + " entries");
    }
    for (std::size_t k = 0; k < v.size(); ++k) psi[static_cast<Index>(k)] = constant(v[k], "psi0[" + std::to_string(k) + "]");
    if (psi.norm() == 0.0) throw Error(ErrorKind::SchemaError, source_ + ": 'psi0' must be non-zero");
    return psi;
  }

  const json& doc() const { return doc_; }

private:
  const json& doc_;
  std::string source_;
  ParameterMap params_;
};

Coefficient as_coefficient(const Expression& e) {
  return [e](double t) { return e.eval(t); };
}

}  // namespace

LoadedModel model_from_json(const json& doc, const LoadOptions& opts, const std::string& source) {
  LoadedModel out;
  out.source = source;
  out.kind = parse_kind(doc, source);
  check_fields(doc, schema_for(out.kind), source);
  const FieldReader rd(doc, source);
  out.hbar = rd.real("hbar", 1.0);
  if (!(out.hbar > 0.0)) throw Error(ErrorKind::SchemaError, source + ": 'hbar' must be positive");

  switch (out.kind) {
    case ModelKind::Matrix: {
      const json& h = doc["H"];
      if (!h.is_array() || h.empty()) throw Error(ErrorKind::SchemaError, source + ": 'H' must be a non-empty array of rows");
      const Index n = static_cast<Index>(h.size());
      Operator fixed = Operator::Zero(n, n);
      TimeDependentModel model(n);
      for (Index i = 0; i < n; ++i) {
        const json& row = h[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n) {
          throw Error(ErrorKind::SchemaError, source + ": 'H' must be square");
        }
        for (Index j = 0; j < n; ++j) {
          const std::string name = "H[" + std::to_string(i) + "][" + std::to_string(j) + "]";
          const Expression e = rd.expression(row[static_cast<std::size_t>(j)], name);
          if (e.depends_on_t()) {
            Operator unit = Operator::Zero(n, n);
            unit(i, j) = 1.0;
            model.add_term(std::move(unit), as_coefficient(e));
          } else {
            fixed(i, j) = rd.constant(row[static_cast<std::size_t>(j)], name);
          }
        }
      }
      model.add_constant(fixed);
      out.model = std::move(model);
      out.truncation = n;
      out.parity = doc.contains("parity") ? ParityOperator(rd.matrix("parity")) : ParityOperator::exchange(n);
      if (out.parity.dim() != n) throw Error(ErrorKind::SchemaError, source + ": 'parity' must match the size of 'H'");
      break;
    }
    case ModelKind::Brachistochrone: {
      out.model = TimeDependentModel::constant(brachistochrone(rd.real("r"), rd.real("s"), rd.real("theta")));
      out.truncation = 2;
      out.parity = ParityOperator::sigma_x();
      break;
    }
    case ModelKind::DrivenOscillator: {
      OscillatorParams p;
      p.m = rd.real("m", 1.0);
      p.omega0 = rd.real("omega0");
      p.lambda = rd.real("lambda");
      p.omega = rd.real("omega");
      p.phi = rd.real("phi", 0.0);
      p.hbar = out.hbar;
      if (!(p.m > 0.0) || !(p.omega0 > 0.0) || !(p.omega > 0.0)) {
        throw Error(ErrorKind::SchemaError, source + ": 'm', 'omega0' and 'omega' must be positive");
      }
      out.truncation = rd.size("N", opts.truncation);
      out.model = oscillator_model(p, out.truncation);
      out.parity = ParityOperator::fock(out.truncation);
      out.oscillator = p;
      break;
    }
    case ModelKind::Swanson: {
      SwansonSetup s;
      s.omega = rd.expression(doc["omega"], "omega");
      s.alpha = rd.expression(doc["alpha"], "alpha");
      s.beta = rd.expression(doc["beta"], "beta");
      s.coeffs = {as_coefficient(s.omega), as_coefficient(s.alpha), as_coefficient(s.beta)};
      if (doc.contains("Phi") != doc.contains("chi")) {
        throw Error(ErrorKind::SchemaError, source + ": 'Phi' and 'chi' must be given together");
      }
      if (doc.contains("Phi")) {
        s.phi = rd.expression(doc["Phi"], "Phi");
        s.chi = rd.expression(doc["chi"], "chi");
      }
      out.truncation = rd.size("N", opts.truncation);
      if (out.truncation < 4) throw Error(ErrorKind::SchemaError, source + ": 'N' must be at least 4 for swanson models");
      out.model = swanson_model(s.coeffs, out.truncation);
      out.parity = ParityOperator::fock(out.truncation);
      out.swanson = std::move(s);
      break;
    }
  }
  out.psi0 = rd.state(out.truncation);
  return out;
}

LoadedModel load_model(const std::string& path, const LoadOptions& opts) {
  return model_from_json(read_json_file(path), opts, path);
}

json with_parameter(const json& doc, const std::string& name, double value) {
  json out = doc;
  if (out.is_object() && out.contains(name) && name != "kind" && (out[name].is_number() || out[name].is_string())) {
    out[name] = value;
    return out;
  }
  if (out.is_object() && out.contains("parameters") && out["parameters"].is_object() && out["parameters"].contains(name)) {
    out["parameters"][name] = value;
    return out;
  }
  throw Error(ErrorKind::UsageError, "sweep parameter '" + name + "' is not a field or parameter of the model");
}

}  // namespace nhqm
