#pragma once

// Experiment configuration: one JSON document with a section per module.
// Every key is optional; missing keys take the built-in defaults, unknown keys
// are rejected so typos do not silently fall back to defaults.
//
//   {
//     "economics":     { "alpha", "a_g", "b_g", "c_g", "elasticity_slope", "lambda_ref", "penalty_weight" },
//     "microgrids":    [ { "id", "series", "omega": <number | 24 numbers>,
//                          "storage": null | { "capacity_max", "capacity_min", "ramp_max", "initial_level" } } ],
//     "learner":       { "alpha", "gamma", "epsilon_start", "epsilon_end", "epsilon_decay", "episodes", "seed" },
//     "scalarization": { "kind": "linear" | "chebyshev", "weights": [4], "utopian_margin", "normalize" },
//     "sweep":         { "grid", "threads" },
//     "data":          { "path": null | "<csv>", "synth_seed" },
//     "output":        { "dir" }
//   }

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "mgmorl/environment.hpp"
#include "mgmorl/errors.hpp"
#include "mgmorl/learner.hpp"

namespace mgmorl {

struct RunConfig {
  SystemConfig system = SystemConfig::defaults();
  LearnerParams learner = default_learner();
  ScalarizationKind kind = ScalarizationKind::linear;
  ObjectiveArray weights{0.25, 0.25, 0.25, 0.25};
  double utopian_margin = 1.0;
  std::optional<bool> normalize;  // unset: on for chebyshev, off for linear
  int grid = 5;
  unsigned threads = 0;
  std::optional<std::string> data_path;
  std::uint64_t synth_seed = 42;
  std::string output_dir = "out";

  /// The day is deterministic per seed, so a full-step learning rate is exact.
  static LearnerParams default_learner() {
    LearnerParams p;
    p.alpha = 1.0;
    return p;
  }

  ScalarizationSpec scalarization() const {
    ScalarizationSpec s = kind == ScalarizationKind::linear ? ScalarizationSpec::linear(weights)
                                                            : ScalarizationSpec::chebyshev(weights, utopian_margin);
    if (normalize) s.normalize = *normalize;
    return s;
  }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline double get_number(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v.get<double>();
}

inline long long get_integer(const json& obj, const char* key, const std::string& path, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return v.get<long long>();
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace detail

/// Checks every type invariant, naming the offending field.
inline void validate(const RunConfig& c) {
  using detail::require;
  const auto& e = c.system.economics;
  require(e.alpha > 0.0, "economics.alpha", "must be > 0");
  require(e.a_g > 0.0, "economics.a_g", "must be > 0");
  require(e.b_g >= 0.0, "economics.b_g", "must be >= 0");
  require(e.c_g >= 0.0, "economics.c_g", "must be >= 0");
  require(e.elasticity_slope >= 0.0, "economics.elasticity_slope", "must be >= 0");
  require(e.lambda_ref > 0.0, "economics.lambda_ref", "must be > 0");
  require(e.penalty_weight >= 0.0, "economics.penalty_weight", "must be >= 0");

  require(!c.system.microgrids.empty(), "microgrids", "at least one microgrid required");
  std::set<int> ids;
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.system.microgrids.size(); ++i) {
    const auto& mg = c.system.microgrids[i];
    const std::string path = "microgrids[" + std::to_string(i) + "]";
    require(ids.insert(mg.id).second, path + ".id", "duplicate id " + std::to_string(mg.id));
    require(!mg.series.empty(), path + ".series", "must not be empty");
    require(mg.series.find(',') == std::string::npos, path + ".series", "must not contain ','");
    require(names.insert(mg.series).second, path + ".series", "duplicate series '" + mg.series + "'");
    for (std::size_t h = 0; h < kHoursPerDay; ++h)
      require(mg.omega[h] > 0.0, path + ".omega[" + std::to_string(h) + "]", "must be > 0");
    if (mg.storage) {
      const auto& st = *mg.storage;
      const std::string sp = path + ".storage";
      require(st.capacity_min >= 0.0, sp + ".capacity_min", "must be >= 0");
      require(st.capacity_min < st.capacity_max, sp + ".capacity_max", "must exceed capacity_min");
      require(st.ramp_max > 0.0 && st.ramp_max <= st.capacity_max, sp + ".ramp_max", "must be in (0, capacity_max]");
      require(st.initial_level >= st.capacity_min && st.initial_level <= st.capacity_max, sp + ".initial_level",
              "must lie in [capacity_min, capacity_max]");
    }
  }

  const auto& l = c.learner;
  require(l.alpha > 0.0 && l.alpha <= 1.0, "learner.alpha", "must be in (0, 1]");
  require(l.gamma >= 0.0 && l.gamma < 1.0, "learner.gamma", "must be in [0, 1)");
  require(l.epsilon_start >= 0.0 && l.epsilon_start <= 1.0, "learner.epsilon_start", "must be in [0, 1]");
  require(l.epsilon_end >= 0.0 && l.epsilon_end <= l.epsilon_start, "learner.epsilon_end",
          "must be in [0, epsilon_start]");
  require(l.epsilon_decay > 0.0 && l.epsilon_decay <= 1.0, "learner.epsilon_decay", "must be in (0, 1]");

  double sum = 0.0;
  for (std::size_t n = 0; n < kNumObjectives; ++n) {
    require(c.weights[n] >= 0.0, "scalarization.weights[" + std::to_string(n) + "]", "must be >= 0");
    sum += c.weights[n];
  }
  require(std::abs(sum - 1.0) <= 1e-9, "scalarization.weights", "must sum to 1");
  require(c.utopian_margin >= 0.0, "scalarization.utopian_margin", "must be >= 0");
  require(c.grid >= 1, "sweep.grid", "must be >= 1");
  require(!c.output_dir.empty(), "output.dir", "must not be empty");
}

inline RunConfig parse_config(const nlohmann::json& doc) {
  using namespace detail;
  RunConfig c;
  reject_unknown(doc, "", {"economics", "microgrids", "learner", "scalarization", "sweep", "data", "output"});

  if (doc.contains("economics")) {
    const auto& e = doc.at("economics");
    reject_unknown(e, "economics", {"alpha", "a_g", "b_g", "c_g", "elasticity_slope", "lambda_ref", "penalty_weight"});
    auto& p = c.system.economics;
    p.alpha = get_number(e, "alpha", "economics", p.alpha);
    p.a_g = get_number(e, "a_g", "economics", p.a_g);
    p.b_g = get_number(e, "b_g", "economics", p.b_g);
    p.c_g = get_number(e, "c_g", "economics", p.c_g);
    p.elasticity_slope = get_number(e, "elasticity_slope", "economics", p.elasticity_slope);
    p.lambda_ref = get_number(e, "lambda_ref", "economics", p.lambda_ref);
    p.penalty_weight = get_number(e, "penalty_weight", "economics", p.penalty_weight);
  }

  if (doc.contains("microgrids")) {
    const auto& list = doc.at("microgrids");
    if (!list.is_array()) throw ConfigError("microgrids", "expected an array");
    c.system.microgrids.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& m = list[i];
      const std::string path = "microgrids[" + std::to_string(i) + "]";
      reject_unknown(m, path, {"id", "series", "omega", "storage"});
      MicrogridSpec mg;
      mg.id = static_cast<int>(get_integer(m, "id", path, static_cast<long long>(i) + 1));
      mg.series = "mg" + std::to_string(mg.id);
      if (m.contains("series")) {
        if (!m.at("series").is_string()) throw ConfigError(path + ".series", "expected a string");
        mg.series = m.at("series").get<std::string>();
      }
      mg.omega.fill(5.0);
      if (m.contains("omega")) {
        const auto& o = m.at("omega");
        if (o.is_number()) {
          mg.omega.fill(o.get<double>());
        } else if (o.is_array() && o.size() == kHoursPerDay) {
          for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            if (!o[h].is_number()) throw ConfigError(path + ".omega[" + std::to_string(h) + "]", "expected a number");
            mg.omega[h] = o[h].get<double>();
          }
        } else {
          throw ConfigError(path + ".omega", "expected a number or an array of 24 numbers");
        }
      }
      if (m.contains("storage") && !m.at("storage").is_null()) {
        const auto& s = m.at("storage");
        const std::string sp = path + ".storage";
        reject_unknown(s, sp, {"capacity_max", "capacity_min", "ramp_max", "initial_level"});
        if (!s.contains("capacity_max")) throw ConfigError(sp + ".capacity_max", "required");
        StorageSpec st = StorageSpec::with_defaults(get_number(s, "capacity_max", sp, 0.0));
        st.capacity_min = get_number(s, "capacity_min", sp, st.capacity_min);
        st.ramp_max = get_number(s, "ramp_max", sp, st.ramp_max);
        st.initial_level = get_number(s, "initial_level", sp, st.initial_level);
        mg.storage = st;
      }
      c.system.microgrids.push_back(std::move(mg));
    }
  }

  if (doc.contains("learner")) {
    const auto& l = doc.at("learner");
    reject_unknown(l, "learner", {"alpha", "gamma", "epsilon_start", "epsilon_end", "epsilon_decay", "episodes", "seed"});
    auto& p = c.learner;
    p.alpha = get_number(l, "alpha", "learner", p.alpha);
    p.gamma = get_number(l, "gamma", "learner", p.gamma);
    p.epsilon_start = get_number(l, "epsilon_start", "learner", p.epsilon_start);
    p.epsilon_end = get_number(l, "epsilon_end", "learner", p.epsilon_end);
    p.epsilon_decay = get_number(l, "epsilon_decay", "learner", p.epsilon_decay);
    const auto episodes = get_integer(l, "episodes", "learner", static_cast<long long>(p.episodes));
    require(episodes >= 0, "learner.episodes", "must be >= 0");
    p.episodes = static_cast<std::size_t>(episodes);
    const auto seed = get_integer(l, "seed", "learner", static_cast<long long>(p.seed));
    require(seed >= 0, "learner.seed", "must be >= 0");
    p.seed = static_cast<std::uint64_t>(seed);
  }

  if (doc.contains("scalarization")) {
    const auto& s = doc.at("scalarization");
    reject_unknown(s, "scalarization", {"kind", "weights", "utopian_margin", "normalize"});
    if (s.contains("kind")) {
      const auto& k = s.at("kind");
      if (k == "linear") c.kind = ScalarizationKind::linear;
      else if (k == "chebyshev") c.kind = ScalarizationKind::chebyshev;
      else throw ConfigError("scalarization.kind", "expected \"linear\" or \"chebyshev\"");
    }
    if (s.contains("weights")) {
      const auto& w = s.at("weights");
      if (!w.is_array() || w.size() != kNumObjectives)
        throw ConfigError("scalarization.weights", "expected an array of 4 numbers");
      for (std::size_t n = 0; n < kNumObjectives; ++n) {
        if (!w[n].is_number()) throw ConfigError("scalarization.weights[" + std::to_string(n) + "]", "expected a number");
        c.weights[n] = w[n].get<double>();
      }
    }
    c.utopian_margin = get_number(s, "utopian_margin", "scalarization", c.utopian_margin);
    if (s.contains("normalize")) {
      if (!s.at("normalize").is_boolean()) throw ConfigError("scalarization.normalize", "expected true or false");
      c.normalize = s.at("normalize").get<bool>();
    }
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    reject_unknown(s, "sweep", {"grid", "threads"});
    c.grid = static_cast<int>(get_integer(s, "grid", "sweep", c.grid));
    const auto threads = get_integer(s, "threads", "sweep", c.threads);
    require(threads >= 0, "sweep.threads", "must be >= 0");
    c.threads = static_cast<unsigned>(threads);
  }

  if (doc.contains("data")) {
    const auto& d = doc.at("data");
    reject_unknown(d, "data", {"path", "synth_seed"});
    if (d.contains("path") && !d.at("path").is_null()) {
      if (!d.at("path").is_string()) throw ConfigError("data.path", "expected a string or null");
      c.data_path = d.at("path").get<std::string>();
    }
    const auto seed = get_integer(d, "synth_seed", "data", static_cast<long long>(c.synth_seed));
    require(seed >= 0, "data.synth_seed", "must be >= 0");
    c.synth_seed = static_cast<std::uint64_t>(seed);
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    reject_unknown(o, "output", {"dir"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("output.dir", "expected a string");
      c.output_dir = o.at("dir").get<std::string>();
    }
  }

  validate(c);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(doc);
}

/// The fully resolved configuration, suitable for feeding back to parse_config.
inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  const auto& e = c.system.economics;
  json doc;
  doc["economics"] = {{"alpha", e.alpha},          {"a_g", e.a_g},
                      {"b_g", e.b_g},              {"c_g", e.c_g},
                      {"elasticity_slope", e.elasticity_slope}, {"lambda_ref", e.lambda_ref},
                      {"penalty_weight", e.penalty_weight}};
  json mgs = json::array();
  for (const auto& mg : c.system.microgrids) {
    json m = {{"id", mg.id}, {"series", mg.series}, {"omega", mg.omega}};
    if (mg.storage) {
      m["storage"] = {{"capacity_max", mg.storage->capacity_max},
                      {"capacity_min", mg.storage->capacity_min},
                      {"ramp_max", mg.storage->ramp_max},
                      {"initial_level", mg.storage->initial_level}};
    } else {
      m["storage"] = nullptr;
    }
    mgs.push_back(std::move(m));
  }
  doc["microgrids"] = std::move(mgs);
  const auto& l = c.learner;
  doc["learner"] = {{"alpha", l.alpha},
                    {"gamma", l.gamma},
                    {"epsilon_start", l.epsilon_start},
                    {"epsilon_end", l.epsilon_end},
                    {"epsilon_decay", l.epsilon_decay},
                    {"episodes", l.episodes},
                    {"seed", l.seed}};
  doc["scalarization"] = {{"kind", to_string(c.kind)}, {"weights", c.weights}, {"utopian_margin", c.utopian_margin}};
  if (c.normalize) doc["scalarization"]["normalize"] = *c.normalize;
  doc["sweep"] = {{"grid", c.grid}, {"threads", c.threads}};
  doc["data"] = {{"path", c.data_path ? json(*c.data_path) : json(nullptr)}, {"synth_seed", c.synth_seed}};
  doc["output"] = {{"dir", c.output_dir}};
  return doc;
}

}  // namespace mgmorl
