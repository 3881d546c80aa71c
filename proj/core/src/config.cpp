#include "coevo/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace coevo {

ConfigError::ConfigError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::size_t line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : static_cast<std::size_t>(n.Mark().line) + 1; }

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& section) {
  if (!map.IsMap()) throw ConfigError("section '" + section + "' must be a mapping", line_of(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'", line_of(kv.first));
  }
}

template <class T>
T get(const YAML::Node& n, const std::string& name) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + name + "'", line_of(n));
  }
}

template <class T>
std::vector<T> get_list(const YAML::Node& n, const std::string& name) {
  if (n.IsScalar()) return {get<T>(n, name)};
  if (!n.IsSequence()) throw ConfigError("'" + name + "' must be a value or a list", line_of(n));
  std::vector<T> out;
  for (const auto& v : n) out.push_back(get<T>(v, name));
  return out;
}

FourierFunction parse_fourier(const YAML::Node& n, const std::string& name) {
  if (n.IsScalar()) {
    const auto s = n.as<std::string>();
    if (s == "sin") return FourierFunction::sin2pi();
    if (s == "cos") return FourierFunction::cos2pi();
    if (s == "neg_sin_squared") return FourierFunction::neg_sin_squared();
    return FourierFunction::constant(get<double>(n, name));
  }
  check_keys(n, {"c0", "terms"}, name);
  double c0 = n["c0"] ? get<double>(n["c0"], name + ".c0") : 0.0;
  std::vector<FourierTerm> terms;
  if (n["terms"]) {
    if (!n["terms"].IsSequence()) throw ConfigError("'" + name + ".terms' must be a list of [k, sin, cos]", line_of(n["terms"]));
    for (const auto& t : n["terms"]) {
      if (!t.IsSequence() || t.size() != 3) throw ConfigError("each term of '" + name + "' is [k, sin, cos]", line_of(t));
      terms.push_back({get<int>(t[0], name), get<double>(t[1], name), get<double>(t[2], name)});
    }
  }
  try {
    return FourierFunction(c0, std::move(terms));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + ": " + e.what(), line_of(n));
  }
}

void emit_fourier(YAML::Emitter& out, const FourierFunction& f) {
  out << YAML::BeginMap << YAML::Key << "c0" << YAML::Value << f.c0() << YAML::Key << "terms" << YAML::Value
      << YAML::BeginSeq;
  for (const auto& t : f.terms()) out << YAML::Flow << YAML::BeginSeq << t.k << t.a << t.b << YAML::EndSeq;
  out << YAML::EndSeq << YAML::EndMap;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping", line_of(root));
  check_keys(root, {"example", "model", "initial", "run", "output"}, "");
  Example ex = Example::ring;
  if (root["example"]) {
    try {
      ex = parse_example(get<std::string>(root["example"], "example"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), line_of(root["example"]));
    }
  }
  ExperimentConfig c = default_config(ex);

  if (const auto s = root["model"]) {
    check_keys(s, {"epsilon", "g", "h", "omega"}, "model");
    if (s["epsilon"]) c.epsilon = get<double>(s["epsilon"], "model.epsilon");
    if (s["g"]) c.g = parse_fourier(s["g"], "model.g");
    if (s["h"]) c.h = parse_fourier(s["h"], "model.h");
    if (const auto o = s["omega"]) {
      if (o.IsScalar()) {
        c.omega_mean = get<double>(o, "model.omega");
        c.omega_amplitude = 0.0;
      } else {
        check_keys(o, {"mean", "amplitude"}, "model.omega");
        if (o["mean"]) c.omega_mean = get<double>(o["mean"], "model.omega.mean");
        if (o["amplitude"]) c.omega_amplitude = get<double>(o["amplitude"], "model.omega.amplitude");
      }
    }
  }
  if (const auto s = root["initial"]) {
    check_keys(s, {"mode", "nu0", "offset", "amplitude", "seed"}, "initial");
    if (s["mode"]) {
      c.initial_mode = get<std::string>(s["mode"], "initial.mode");
      if (c.initial_mode != "quantile" && c.initial_mode != "random")
        throw ConfigError("initial.mode must be quantile or random", line_of(s["mode"]));
    }
    if (s["nu0"]) {
      try {
        c.nu0.kind = parse_nu0_kind(get<std::string>(s["nu0"], "initial.nu0"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), line_of(s["nu0"]));
      }
    }
    if (s["offset"]) c.nu0.offset = get<double>(s["offset"], "initial.offset");
    if (s["amplitude"]) c.nu0.amplitude = get<double>(s["amplitude"], "initial.amplitude");
    if (s["seed"]) c.seed = get<std::uint64_t>(s["seed"], "initial.seed");
  }
  if (const auto s = root["run"]) {
    check_keys(s, {"N", "m", "n", "T", "T_fraction", "dt", "tol", "max_iter", "M_eval", "times", "reference", "M_phi"}, "run");
    if (s["N"]) c.N = get_list<std::size_t>(s["N"], "run.N");
    if (s["m"]) c.m = get_list<std::size_t>(s["m"], "run.m");
    if (s["n"]) c.n = get_list<std::size_t>(s["n"], "run.n");
    if (s["m"] && !s["N"]) c.N.clear();
    if (s["T"]) c.T = get<double>(s["T"], "run.T");
    if (s["T_fraction"]) c.T_fraction = get<double>(s["T_fraction"], "run.T_fraction");
    if (s["dt"]) c.dt = get<double>(s["dt"], "run.dt");
    if (s["tol"]) c.tol = get<double>(s["tol"], "run.tol");
    if (s["max_iter"]) c.max_iter = get<std::size_t>(s["max_iter"], "run.max_iter");
    if (s["M_eval"]) c.M_eval = get<std::size_t>(s["M_eval"], "run.M_eval");
    if (s["times"]) c.times = get_list<double>(s["times"], "run.times");
    if (s["M_phi"]) c.M_phi = get<std::size_t>(s["M_phi"], "run.M_phi");
    if (const auto r = s["reference"]) {
      check_keys(r, {"m", "n"}, "run.reference");
      if (r["m"]) c.ref_m = get<std::size_t>(r["m"], "run.reference.m");
      if (r["n"]) c.ref_n = get<std::size_t>(r["n"], "run.reference.n");
    }
  }
  if (const auto s = root["output"]) {
    check_keys(s, {"dir", "every"}, "output");
    if (s["dir"]) c.output_dir = get<std::string>(s["dir"], "output.dir");
    if (s["every"]) c.output_every = get<std::size_t>(s["every"], "output.every");
  }
  try {
    return normalized(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

ExperimentConfig default_config(Example e) {
  ExperimentConfig c;
  c.example = e;
  if (e == Example::tree || e == Example::dense)
    c.N = {7, 15, 31, 63};
  else
    c.N = {16, 64, 256};
  return c;
}

ModelSpec model_of(const ExperimentConfig& c) {
  const auto p = make_preset(c.example);
  ModelSpec s;
  s.epsilon = c.epsilon;
  s.g = c.g ? *c.g : p.g;
  s.h = c.h ? *c.h : p.h;
  s.omega = c.omega_amplitude == 0.0
                ? OmegaSpec::constant(c.omega_mean)
                : OmegaSpec::separable(FourierFunction::constant(1.0), FourierFunction(c.omega_mean, {{1, 0.0, c.omega_amplitude}}));
  return s;
}

ExperimentConfig normalized(ExperimentConfig c) {
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) throw std::invalid_argument("epsilon must be positive");
  if (c.example == Example::custom && (!c.g || !c.h)) throw std::invalid_argument("the custom example needs model.g and model.h");
  const auto model = model_of(c);
  model.validate();
  const double Tstar = preset_horizon(c.epsilon);
  if (!(c.T > 0.0)) {
    if (!(c.T_fraction > 0.0)) throw std::invalid_argument("T_fraction must be positive");
    c.T = c.T_fraction * Tstar;
  }
  c.T_fraction = c.T / Tstar;
  if (model.h.positive_part_sup() > 0.0) {
    const auto p = make_preset(c.example);
    const double horizon = positivity_horizon(p.a_floor, 1.0, model.h, c.epsilon);
    if (c.T > horizon * (1.0 + 1e-12))
      throw std::invalid_argument("T = " + std::to_string(c.T) + " exceeds the positivity horizon " + std::to_string(horizon));
  }
  if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double steps = std::ceil(c.T / c.dt * (1.0 - 1e-12));
  c.dt = c.T / steps;
  if (!(c.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (c.max_iter == 0) throw std::invalid_argument("max_iter must be at least 1");
  if (c.M_eval < 2) throw std::invalid_argument("M_eval must be at least 2");
  if (c.m.size() != c.n.size()) throw std::invalid_argument("run.m and run.n must have the same length");
  if (c.N.empty() && c.m.empty()) throw std::invalid_argument("no levels: give run.N or run.m/run.n");
  for (auto N : c.N) {
    if (N < 2) throw std::invalid_argument("every N must be at least 2");
    if (c.example == Example::tree || c.example == Example::dense) require_tree_size(N);
  }
  for (std::size_t k = 0; k < c.m.size(); ++k)
    if (c.m[k] == 0 || c.n[k] == 0) throw std::invalid_argument("lattice levels need m, n >= 1");
  if (c.ref_m == 0 || c.ref_n == 0) throw std::invalid_argument("reference m and n must be at least 1");
  if (c.M_phi < 2) throw std::invalid_argument("M_phi must be at least 2");
  for (double t : c.times)
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("report times are fractions of T in [0, 1]");
  if (c.output_every == 0) c.output_every = 1;
  if (c.nu0.kind == Nu0Spec::Kind::wave && std::abs(c.nu0.amplitude) > 1.0)
    throw std::invalid_argument("wave nu0 needs |amplitude| <= 1");
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, static_cast<std::size_t>(e.mark.line) + 1);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  return from_yaml(root);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string emit_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "example" << YAML::Value << to_string(c.example);
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "epsilon" << YAML::Value << c.epsilon;
  if (c.g) {
    out << YAML::Key << "g" << YAML::Value;
    emit_fourier(out, *c.g);
  }
  if (c.h) {
    out << YAML::Key << "h" << YAML::Value;
    emit_fourier(out, *c.h);
  }
  out << YAML::Key << "omega" << YAML::Value << YAML::BeginMap << YAML::Key << "mean" << YAML::Value << c.omega_mean
      << YAML::Key << "amplitude" << YAML::Value << c.omega_amplitude << YAML::EndMap;
  out << YAML::EndMap;
  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << c.initial_mode;
  out << YAML::Key << "nu0" << YAML::Value << to_string(c.nu0.kind);
  out << YAML::Key << "offset" << YAML::Value << c.nu0.offset;
  out << YAML::Key << "amplitude" << YAML::Value << c.nu0.amplitude;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::EndMap;
  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "N" << YAML::Value << YAML::Flow << c.N;
  out << YAML::Key << "m" << YAML::Value << YAML::Flow << c.m;
  out << YAML::Key << "n" << YAML::Value << YAML::Flow << c.n;
  out << YAML::Key << "T" << YAML::Value << c.T;
  out << YAML::Key << "dt" << YAML::Value << c.dt;
  out << YAML::Key << "tol" << YAML::Value << c.tol;
  out << YAML::Key << "max_iter" << YAML::Value << c.max_iter;
  out << YAML::Key << "M_eval" << YAML::Value << c.M_eval;
  out << YAML::Key << "times" << YAML::Value << YAML::Flow << c.times;
  out << YAML::Key << "reference" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "m" << YAML::Value
      << c.ref_m << YAML::Key << "n" << YAML::Value << c.ref_n << YAML::EndMap;
  out << YAML::Key << "M_phi" << YAML::Value << c.M_phi;
  out << YAML::EndMap;
  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value << c.output_dir
      << YAML::Key << "every" << YAML::Value << c.output_every << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace coevo
