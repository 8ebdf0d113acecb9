#pragma once

// Scenario configuration: YAML text <-> ScenarioConfig.
//
//   model:     omega0, chi, k, alpha: [re, im]           (omega0, chi, alpha required)
//   drive:     kind: zero | constant | cosine | tabulated  (required)
//              value | amplitude, frequency | times, values
//   mass:      kind: constant | exponential | tabulated; m0, rate | times, values
//   time:      t_end, samples_per_period, output_samples, snapshots_tau: [...]
//              (output_samples: times written by oracle, spectrum and timemap)
//   grid:      half_width (0 = |alpha| + 5), resolution
//   variances: beta: [re, im], xi_samples
//   scan:      chi: [...] (empty = model.chi only), revival_threshold
//   spectrum:  levels
//   numerics:  tol, trunc (0 = automatic)
//   output:    dir, format: csv | json

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "kerrosc/errors.hpp"
#include "kerrosc/kerr_evolution.hpp"
#include "kerrosc/time_functions.hpp"

namespace kerrosc {

struct ScenarioConfig {
  double omega0 = 1.0;
  double chi = 0.0;
  double k = 0.0;
  cplx alpha{0.0, 0.0};
  DriveSpec drive;
  MassSpec mass;

  double t_end = 8.0 * std::numbers::pi;
  int samples_per_period = 2000;
  int output_samples = 101;
  std::vector<double> snapshots_tau = {0.0, std::numbers::pi / 4.0, std::numbers::pi, 2.0 * std::numbers::pi,
                                       4.0 * std::numbers::pi, 8.0 * std::numbers::pi};

  double half_width = 0.0;
  int resolution = 201;

  cplx beta{0.5, 0.0};
  int xi_samples = 1001;

  std::vector<double> chi_scan;
  double revival_threshold = 0.9;
  int levels = 6;

  double tol = 1e-10;
  int trunc = 0;

  std::string out_dir = "out";
  std::string format = "csv";

  ModelParams model() const {
    ModelParams p;
    p.omega0 = omega0;
    p.chi = chi;
    p.drive = drive;
    p.alpha = alpha;
    return p;
  }

  FrequencySpec frequency() const { return FrequencySpec(omega0, k); }

  double window_half_width() const { return half_width > 0.0 ? half_width : std::abs(alpha) + 5.0; }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

inline const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> keys = {"model.omega0", "model.chi", "model.alpha", "drive.kind"};
  return keys;
}

inline void reject_unknown(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw config_error(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw config_error(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw config_error(key, "type mismatch");
  }
}

inline double read_number(const YAML::Node& node, const std::string& key) {
  const double v = read<double>(node, key);
  if (!std::isfinite(v)) throw config_error(key, "must be finite");
  return v;
}

inline int read_int(const YAML::Node& node, const std::string& key) { return read<int>(node, key); }

inline std::vector<double> read_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw config_error(key, "expected a list of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < node.size(); ++i) v.push_back(read_number(node[i], key));
  return v;
}

/// A complex number is written [re, im]; a bare scalar is taken as real.
inline cplx read_complex(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {read_number(node, key), 0.0};
  const auto v = read_list(node, key);
  if (v.size() != 2) throw config_error(key, "expected [re, im]");
  return {v[0], v[1]};
}

inline void need(const YAML::Node& node, const char* name, const std::string& key) {
  if (!node[name]) throw config_error(key, "required key missing");
}

inline DriveSpec parse_drive(const YAML::Node& n) {
  const auto kind = read<std::string>(n["kind"], "drive.kind");
  if (kind == "zero") {
    reject_unknown(n, "drive", {"kind"});
    return DriveSpec::zero();
  }
  if (kind == "constant") {
    reject_unknown(n, "drive", {"kind", "value"});
    need(n, "value", "drive.value");
    return DriveSpec::constant(read_number(n["value"], "drive.value"));
  }
  if (kind == "cosine") {
    reject_unknown(n, "drive", {"kind", "amplitude", "frequency"});
    const double a = n["amplitude"] ? read_number(n["amplitude"], "drive.amplitude") : 1.0;
    const double f = n["frequency"] ? read_number(n["frequency"], "drive.frequency") : 1.0;
    return DriveSpec::cosine(a, f);
  }
  if (kind == "tabulated") {
    reject_unknown(n, "drive", {"kind", "times", "values"});
    need(n, "times", "drive.times");
    need(n, "values", "drive.values");
    try {
      return DriveSpec::tabulated(read_list(n["times"], "drive.times"), read_list(n["values"], "drive.values"));
    } catch (const std::invalid_argument& e) {
      throw config_error("drive.times", e.what());
    }
  }
  throw config_error("drive.kind", "expected zero, constant, cosine or tabulated (got '" + kind + "')");
}

inline MassSpec parse_mass(const YAML::Node& n) {
  const auto kind = n["kind"] ? read<std::string>(n["kind"], "mass.kind") : std::string("constant");
  try {
    if (kind == "constant") {
      reject_unknown(n, "mass", {"kind", "m0"});
      return MassSpec::constant(n["m0"] ? read_number(n["m0"], "mass.m0") : 1.0);
    }
    if (kind == "exponential") {
      reject_unknown(n, "mass", {"kind", "m0", "rate"});
      const double m0 = n["m0"] ? read_number(n["m0"], "mass.m0") : 1.0;
      const double rate = n["rate"] ? read_number(n["rate"], "mass.rate") : 0.0;
      return MassSpec::exponential(m0, rate);
    }
    if (kind == "tabulated") {
      reject_unknown(n, "mass", {"kind", "times", "values"});
      need(n, "times", "mass.times");
      need(n, "values", "mass.values");
      return MassSpec::tabulated(read_list(n["times"], "mass.times"), read_list(n["values"], "mass.values"));
    }
  } catch (const std::invalid_argument& e) {
    throw config_error("mass", e.what());
  }
  throw config_error("mass.kind", "expected constant, exponential or tabulated (got '" + kind + "')");
}

inline void emit_complex(YAML::Emitter& out, cplx z) {
  out << YAML::Flow << YAML::BeginSeq << z.real() << z.imag() << YAML::EndSeq;
}

inline void emit_list(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace detail

/// Physical and numerical validity; each failure names its key.
inline void validate(const ScenarioConfig& c) {
  if (!(c.omega0 > 0.0)) throw config_error("model.omega0", "must be > 0");
  if (!(c.chi >= 0.0)) throw config_error("model.chi", "must be >= 0");
  if (!(c.k >= 0.0) || !(c.k < 0.5)) throw config_error("model.k", "must satisfy 0 <= k < 1/2 (Omega(t) > 0)");
  if (!(c.t_end > 0.0)) throw config_error("time.t_end", "must be > 0");
  if (c.samples_per_period < 1) throw config_error("time.samples_per_period", "must be >= 1");
  if (c.output_samples < 2) throw config_error("time.output_samples", "must be >= 2");
  for (double tau : c.snapshots_tau) {
    if (!(tau >= 0.0)) throw config_error("time.snapshots_tau", "entries must be >= 0");
  }
  if (!(c.half_width >= 0.0)) throw config_error("grid.half_width", "must be >= 0");
  if (c.resolution < 2) throw config_error("grid.resolution", "must be >= 2");
  if (c.xi_samples < 2) throw config_error("variances.xi_samples", "must be >= 2");
  for (double x : c.chi_scan) {
    if (!(x >= 0.0)) throw config_error("scan.chi", "entries must be >= 0");
  }
  if (!(c.revival_threshold > 0.0) || !(c.revival_threshold < 1.0)) {
    throw config_error("scan.revival_threshold", "must lie in (0, 1)");
  }
  if (c.levels < 1) throw config_error("spectrum.levels", "must be >= 1");
  if (!(c.tol > 0.0)) throw config_error("numerics.tol", "must be > 0");
  if (c.trunc != 0 && c.trunc < 12) throw config_error("numerics.trunc", "must be 0 (automatic) or >= 12");
  if (c.format != "csv" && c.format != "json") throw config_error("output.format", "expected csv or json");
  if (c.out_dir.empty()) throw config_error("output.dir", "must not be empty");
  try {
    c.drive.check_window(c.t_end);
  } catch (const std::invalid_argument& e) {
    throw config_error("drive.times", e.what());
  }
}

inline ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw config_error("", std::string("malformed YAML: ") + e.what());
  }
  if (root.IsNull() || (root.IsMap() && root.size() == 0)) {
    std::string msg = "empty configuration; required keys:";
    for (const auto& k : detail::required_keys()) msg += " " + k;
    throw config_error("", msg);
  }
  detail::reject_unknown(root, "",
                         {"model", "drive", "mass", "time", "grid", "variances", "scan", "spectrum", "numerics",
                          "output"});
  std::vector<std::string> missing;
  const auto model = root["model"];
  const auto drive = root["drive"];
  for (const char* k : {"omega0", "chi", "alpha"}) {
    if (!model || !model.IsMap() || !model[k]) missing.push_back(std::string("model.") + k);
  }
  if (!drive || !drive.IsMap() || !drive["kind"]) missing.push_back("drive.kind");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& k : missing) msg += " " + k;
    throw config_error(missing.front(), msg);
  }

  ScenarioConfig c;
  detail::reject_unknown(model, "model", {"omega0", "chi", "k", "alpha"});
  c.omega0 = detail::read_number(model["omega0"], "model.omega0");
  c.chi = detail::read_number(model["chi"], "model.chi");
  if (model["k"]) c.k = detail::read_number(model["k"], "model.k");
  c.alpha = detail::read_complex(model["alpha"], "model.alpha");
  c.drive = detail::parse_drive(drive);
  if (const auto m = root["mass"]) {
    c.mass = detail::parse_mass(m);
  }
  if (const auto t = root["time"]) {
    detail::reject_unknown(t, "time", {"t_end", "samples_per_period", "output_samples", "snapshots_tau"});
    if (t["t_end"]) c.t_end = detail::read_number(t["t_end"], "time.t_end");
    if (t["samples_per_period"]) c.samples_per_period = detail::read_int(t["samples_per_period"], "time.samples_per_period");
    if (t["output_samples"]) c.output_samples = detail::read_int(t["output_samples"], "time.output_samples");
    if (t["snapshots_tau"]) c.snapshots_tau = detail::read_list(t["snapshots_tau"], "time.snapshots_tau");
  }
  if (const auto g = root["grid"]) {
    detail::reject_unknown(g, "grid", {"half_width", "resolution"});
    if (g["half_width"]) c.half_width = detail::read_number(g["half_width"], "grid.half_width");
    if (g["resolution"]) c.resolution = detail::read_int(g["resolution"], "grid.resolution");
  }
  if (const auto v = root["variances"]) {
    detail::reject_unknown(v, "variances", {"beta", "xi_samples"});
    if (v["beta"]) c.beta = detail::read_complex(v["beta"], "variances.beta");
    if (v["xi_samples"]) c.xi_samples = detail::read_int(v["xi_samples"], "variances.xi_samples");
  }
  if (const auto s = root["scan"]) {
    detail::reject_unknown(s, "scan", {"chi", "revival_threshold"});
    if (s["chi"]) c.chi_scan = detail::read_list(s["chi"], "scan.chi");
    if (s["revival_threshold"]) c.revival_threshold = detail::read_number(s["revival_threshold"], "scan.revival_threshold");
  }
  if (const auto s = root["spectrum"]) {
    detail::reject_unknown(s, "spectrum", {"levels"});
    if (s["levels"]) c.levels = detail::read_int(s["levels"], "spectrum.levels");
  }
  if (const auto n = root["numerics"]) {
    detail::reject_unknown(n, "numerics", {"tol", "trunc"});
    if (n["tol"]) c.tol = detail::read_number(n["tol"], "numerics.tol");
    if (n["trunc"]) c.trunc = detail::read_int(n["trunc"], "numerics.trunc");
  }
  if (const auto o = root["output"]) {
    detail::reject_unknown(o, "output", {"dir", "format"});
    if (o["dir"]) c.out_dir = detail::read<std::string>(o["dir"], "output.dir");
    if (o["format"]) c.format = detail::read<std::string>(o["format"], "output.format");
  }
  validate(c);
  return c;
}

/// Full config with every default written out; parse_config(emit_config(c)) == c.
inline std::string emit_config(const ScenarioConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "omega0" << YAML::Value << c.omega0;
  out << YAML::Key << "chi" << YAML::Value << c.chi;
  out << YAML::Key << "k" << YAML::Value << c.k;
  out << YAML::Key << "alpha" << YAML::Value;
  detail::emit_complex(out, c.alpha);
  out << YAML::EndMap;

  out << YAML::Key << "drive" << YAML::Value << YAML::BeginMap;
  std::visit(
      [&out](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, DriveSpec::Zero>) {
          out << YAML::Key << "kind" << YAML::Value << "zero";
        } else if constexpr (std::is_same_v<D, DriveSpec::Constant>) {
          out << YAML::Key << "kind" << YAML::Value << "constant";
          out << YAML::Key << "value" << YAML::Value << d.value;
        } else if constexpr (std::is_same_v<D, DriveSpec::Cosine>) {
          out << YAML::Key << "kind" << YAML::Value << "cosine";
          out << YAML::Key << "amplitude" << YAML::Value << d.amplitude;
          out << YAML::Key << "frequency" << YAML::Value << d.frequency;
        } else {
          out << YAML::Key << "kind" << YAML::Value << "tabulated";
          out << YAML::Key << "times" << YAML::Value;
          detail::emit_list(out, d.times());
          out << YAML::Key << "values" << YAML::Value;
          detail::emit_list(out, d.values());
        }
      },
      c.drive.kind());
  out << YAML::EndMap;

  out << YAML::Key << "mass" << YAML::Value << YAML::BeginMap;
  std::visit(
      [&out](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MassSpec::Constant>) {
          out << YAML::Key << "kind" << YAML::Value << "constant";
          out << YAML::Key << "m0" << YAML::Value << m.m0;
        } else if constexpr (std::is_same_v<M, MassSpec::Exponential>) {
          out << YAML::Key << "kind" << YAML::Value << "exponential";
          out << YAML::Key << "m0" << YAML::Value << m.m0;
          out << YAML::Key << "rate" << YAML::Value << m.rate;
        } else {
          out << YAML::Key << "kind" << YAML::Value << "tabulated";
          out << YAML::Key << "times" << YAML::Value;
          detail::emit_list(out, m.times());
          out << YAML::Key << "values" << YAML::Value;
          detail::emit_list(out, m.values());
        }
      },
      c.mass.kind());
  out << YAML::EndMap;

  out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t_end" << YAML::Value << c.t_end;
  out << YAML::Key << "samples_per_period" << YAML::Value << c.samples_per_period;
  out << YAML::Key << "output_samples" << YAML::Value << c.output_samples;
  out << YAML::Key << "snapshots_tau" << YAML::Value;
  detail::emit_list(out, c.snapshots_tau);
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "half_width" << YAML::Value << c.half_width;
  out << YAML::Key << "resolution" << YAML::Value << c.resolution;
  out << YAML::EndMap;

  out << YAML::Key << "variances" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "beta" << YAML::Value;
  detail::emit_complex(out, c.beta);
  out << YAML::Key << "xi_samples" << YAML::Value << c.xi_samples;
  out << YAML::EndMap;

  out << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "chi" << YAML::Value;
  detail::emit_list(out, c.chi_scan);
  out << YAML::Key << "revival_threshold" << YAML::Value << c.revival_threshold;
  out << YAML::EndMap;

  out << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "levels" << YAML::Value << c.levels;
  out << YAML::EndMap;

  out << YAML::Key << "numerics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol" << YAML::Value << c.tol;
  out << YAML::Key << "trunc" << YAML::Value << c.trunc;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << c.out_dir;
  out << YAML::Key << "format" << YAML::Value << c.format;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace kerrosc
