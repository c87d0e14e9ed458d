// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "superlab/errors.hpp"

namespace superlab {

using nlohmann::json;

namespace {

const std::set<std::string> kSections{"model", "sim", "experiment", "output"};
const std::set<std::string> kModelKeys{"preset", "beta", "a", "b", "c", "d", "c1", "c2",
                                       "atoms", "initial_mass", "initial_position"};
const std::set<std::string> kSimKeys{"epsilon", "max_particles", "seed", "observation_times",
                                     "scheme"};
const std::set<std::string> kExperimentKeys{"name",     "paths",            "workers",
                                            "observables", "burn_in", "quadrature_order",
                                            "oracle_points"};
const std::set<std::string> kOutputKeys{"dir", "svg"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("section '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + where + "." + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad type for '" + where + "." + key + "'");
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

Point point(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  Point p;
  for (const auto& e : v) p.push_back(number(e, what));
  return p;
}

std::size_t count(const json& obj, const char* key, const std::string& where, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("'" + where + "." + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"validate", "moments", "martingale", "slln",
                                              "registry-dump", "oracle-export"};
  return names;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, kSections, "config");
  ExperimentConfig cfg;

  if (!root.contains("model")) throw ConfigError("missing section 'model'");
  const json& model = root.at("model");
  reject_unknown(model, kModelKeys, "model");
  cfg.preset = get<std::string>(model, "preset", "model", "");
  if (cfg.preset.empty()) throw ConfigError("'model.preset' is required");
  auto& p = cfg.params;
  p.beta = get(model, "beta", "model", p.beta);
  p.a = get(model, "a", "model", p.a);
  p.b = get(model, "b", "model", p.b);
  p.c = get(model, "c", "model", p.c);
  p.d = get(model, "d", "model", p.d);
  p.c1 = get(model, "c1", "model", p.c1);
  p.c2 = get(model, "c2", "model", p.c2);
  p.initial_mass = get(model, "initial_mass", "model", p.initial_mass);
  if (model.contains("atoms")) {
    const auto& atoms = model.at("atoms");
    if (!atoms.is_array()) throw ConfigError("'model.atoms' must be an array of [weight, jump]");
    for (const auto& a : atoms) {
      if (!a.is_array() || a.size() != 2) throw ConfigError("'model.atoms' entries are [weight, jump]");
      p.atoms.emplace_back(number(a[0], "atom weight"), number(a[1], "atom jump"));
    }
  }
  if (model.contains("initial_position")) {
    p.initial_position = point(model.at("initial_position"), "'model.initial_position'");
  }

  if (root.contains("sim")) {
    const json& sim = root.at("sim");
    reject_unknown(sim, kSimKeys, "sim");
    cfg.sim.epsilon = get(sim, "epsilon", "sim", cfg.sim.epsilon);
    cfg.sim.max_particles = count(sim, "max_particles", "sim", cfg.sim.max_particles);
    cfg.sim.seed = count(sim, "seed", "sim", cfg.sim.seed);
    if (sim.contains("observation_times")) {
      cfg.sim.observation_times = point(sim.at("observation_times"), "'sim.observation_times'");
    }
    cfg.sim.scheme = parse_scheme(get<std::string>(sim, "scheme", "sim", "auto"));
  }
  if (cfg.sim.observation_times.empty()) cfg.sim.observation_times = {0.5, 1.0, 2.0};

  if (root.contains("experiment")) {
    const json& ex = root.at("experiment");
    reject_unknown(ex, kExperimentKeys, "experiment");
    cfg.experiment = get(ex, "name", "experiment", cfg.experiment);
    cfg.n_paths = count(ex, "paths", "experiment", cfg.n_paths);
    cfg.workers = static_cast<unsigned>(count(ex, "workers", "experiment", cfg.workers));
    cfg.observables = get(ex, "observables", "experiment", cfg.observables);
    cfg.burn_in = get(ex, "burn_in", "experiment", cfg.burn_in);
    cfg.quad.order = static_cast<int>(count(ex, "quadrature_order", "experiment", 64));
    if (ex.contains("oracle_points")) {
      const auto& pts = ex.at("oracle_points");
      if (!pts.is_array()) throw ConfigError("'experiment.oracle_points' must be an array of points");
      for (const auto& q : pts) cfg.oracle_points.push_back(point(q, "oracle point"));
    }
  }
  if (std::find(experiment_names().begin(), experiment_names().end(), cfg.experiment) ==
      experiment_names().end()) {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }
  if (cfg.quad.order < 2) throw ConfigError("'experiment.quadrature_order' must be at least 2");
  if (cfg.oracle_points.empty()) cfg.oracle_points.push_back(Point(static_cast<std::size_t>(p.d), 0.0));

  if (root.contains("output")) {
    const json& out = root.at("output");
    reject_unknown(out, kOutputKeys, "output");
    cfg.out_dir = get(out, "dir", "output", cfg.out_dir);
    cfg.svg = get(out, "svg", "output", cfg.svg);
  }

  cfg.sim.validate();
  parse_observables(cfg.observables, p.d);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  json atoms = json::array();
  for (const auto& [w, y] : p.atoms) atoms.push_back({w, y});
  json pts = json::array();
  for (const auto& q : cfg.oracle_points) pts.push_back(q);
  json root = {
      {"model",
       {{"preset", cfg.preset},
        {"beta", p.beta},
        {"a", p.a},
        {"b", p.b},
        {"c", p.c},
        {"d", p.d},
        {"c1", p.c1},
        {"c2", p.c2},
        {"atoms", atoms},
        {"initial_mass", p.initial_mass},
        {"initial_position", p.initial_position}}},
      {"sim",
       {{"epsilon", cfg.sim.epsilon},
        {"max_particles", cfg.sim.max_particles},
        {"seed", cfg.sim.seed},
        {"observation_times", cfg.sim.observation_times},
        {"scheme", to_string(cfg.sim.scheme)}}},
      // workers and output.dir are left out: results do not depend on them.
      {"experiment",
       {{"name", cfg.experiment},
        {"paths", cfg.n_paths},
        {"observables", cfg.observables},
        {"burn_in", cfg.burn_in},
        {"quadrature_order", cfg.quad.order},
        {"oracle_points", pts}}},
      {"output", {{"svg", cfg.svg}}}};
  return root.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(canonical_config(cfg))); }

std::string model_hash(const ModelSpec& spec) { return hex64(fnv1a64(spec.describe())); }

ModelSpec build_model(const ExperimentConfig& cfg) {
  auto params = cfg.params;
  if (params.initial_position.empty()) params.initial_position.assign(static_cast<std::size_t>(params.d), 0.0);
  return model_preset(cfg.preset, params);
}

namespace {

double parse_double(std::string_view s, const std::string& token) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError("bad number '" + std::string(s) + "' in observable '" + token + "'");
  }
  return v;
}

ObservableToken parse_token(const std::string& token, int d) {
  ObservableToken t;
  const auto colon = token.find(':');
  t.kind = token.substr(0, colon);
  if (t.kind.size() >= 2 && t.kind[0] == 'x' && colon == std::string::npos) {
    int axis = -1;
    const auto digits = std::string_view(t.kind).substr(1);
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), axis);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
      throw ConfigError("coordinate observable '" + token + "' needs an integer axis x1..x" + std::to_string(d));
    }
    --axis;
    if (axis < 0 || axis >= d) throw ConfigError("coordinate observable '" + token + "' out of range");
    t.kind = "coordinate";
    t.axis = axis;
    return t;
  }
  static const std::set<std::string> bare{"mass", "phi0"};
  static const std::set<std::string> keyed{"ball", "gaussian", "resolvent"};
  if (bare.contains(t.kind)) {
    if (colon != std::string::npos) throw ConfigError("observable '" + t.kind + "' takes no arguments");
    return t;
  }
  if (!keyed.contains(t.kind)) throw ConfigError("unknown observable '" + token + "'");
  std::set<std::string> seen;
  std::string_view rest = colon == std::string::npos ? std::string_view{} : std::string_view(token).substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value in observable '" + token + "'");
    const std::string key(item.substr(0, eq));
    const double v = parse_double(item.substr(eq + 1), token);
    seen.insert(key);
    if (key == "q" && t.kind == "resolvent") t.q = v;
    else if (key == "amp" && t.kind != "ball") t.amp = v;
    else if (key == "rate" && t.kind != "ball") t.rate = v;
    else if (key == "r" && t.kind == "ball") t.radius = v;
    else if (key == "x") t.center = v;
    else throw ConfigError("unknown argument '" + key + "' in observable '" + token + "'");
  }
  if (t.kind == "resolvent" && !seen.contains("q")) throw ConfigError("resolvent observable needs q");
  if (t.kind != "ball" && !(t.rate > 0.0)) throw ConfigError("observable rate must be positive");
  if (t.kind == "ball" && !(t.radius > 0.0)) throw ConfigError("ball radius must be positive");
  return t;
}

}  // namespace

std::vector<ObservableToken> parse_observables(const std::vector<std::string>& tokens, int d) {
  std::vector<ObservableToken> out;
  for (const auto& tok : tokens) {
    if (tok == "default") {
      for (const char* s : {"ball:r=1", "gaussian:amp=1,rate=1", "phi0"}) out.push_back(parse_token(s, d));
    } else if (tok == "c0") {
      for (const char* s : {"gaussian:amp=1,rate=1", "gaussian:amp=1,rate=0.25,x=0.5",
                            "gaussian:amp=2,rate=4,x=-1"}) {
        out.push_back(parse_token(s, d));
      }
    } else {
      out.push_back(parse_token(tok, d));
    }
  }
  return out;
}

}  // namespace superlab
