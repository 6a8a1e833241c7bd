#pragma once

// Day-ahead multi-microgrid MDP. The learner observes (hour, aggregate SoC bin)
// and picks (price level, storage command); the simulator tracks exact storage
// levels and emits the four-component reward for every hourly step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mgmorl/csv.hpp"
#include "mgmorl/errors.hpp"
#include "mgmorl/model.hpp"

namespace mgmorl {

inline constexpr std::size_t kNumSocLevels = 8;
inline constexpr std::size_t kNumPriceLevels = 8;
inline constexpr std::size_t kNumStorageCmds = 3;
inline constexpr std::size_t kNumStates = kHoursPerDay * kNumSocLevels;       // 192
inline constexpr std::size_t kNumActions = kNumPriceLevels * kNumStorageCmds;  // 24

inline constexpr double kSocFloor = 0.3;
inline constexpr double kSocBinWidth = (1.0 - kSocFloor) / kNumSocLevels;  // 0.0875

inline constexpr double price_of_level(std::size_t level) { return 1.5 + 0.5 * static_cast<double>(level); }

enum class StorageCmd : std::uint8_t { charge = 0, discharge = 1, idle = 2 };

inline const char* to_string(StorageCmd c) {
  switch (c) {
    case StorageCmd::charge: return "charge";
    case StorageCmd::discharge: return "discharge";
    case StorageCmd::idle: return "idle";
  }
  return "?";
}

inline StorageCmd storage_cmd_from_string(std::string_view s) {
  if (s == "charge") return StorageCmd::charge;
  if (s == "discharge") return StorageCmd::discharge;
  if (s == "idle") return StorageCmd::idle;
  throw DataError("unknown storage command '" + std::string(s) + "'");
}

struct EnvState {
  std::size_t tod = 0;
  std::size_t soc_level = 0;

  constexpr std::size_t index() const { return tod * kNumSocLevels + soc_level; }
  static constexpr EnvState from_index(std::size_t i) { return {i / kNumSocLevels, i % kNumSocLevels}; }
  friend constexpr bool operator==(const EnvState&, const EnvState&) = default;
};

struct EnvAction {
  std::size_t price_level = 0;
  StorageCmd storage_cmd = StorageCmd::charge;

  constexpr std::size_t index() const {
    return price_level * kNumStorageCmds + static_cast<std::size_t>(storage_cmd);
  }
  static constexpr EnvAction from_index(std::size_t i) {
    return {i / kNumStorageCmds, static_cast<StorageCmd>(i % kNumStorageCmds)};
  }
  constexpr double price() const { return price_of_level(price_level); }
  friend constexpr bool operator==(const EnvAction&, const EnvAction&) = default;
};

/// All actions, price-major, then charge/discharge/idle.
inline std::vector<EnvAction> action_space() {
  std::vector<EnvAction> out;
  out.reserve(kNumActions);
  for (std::size_t i = 0; i < kNumActions; ++i) out.push_back(EnvAction::from_index(i));
  return out;
}

struct SystemConfig {
  std::vector<MicrogridSpec> microgrids;
  EconomicParams economics;

  /// Storage specs of the storage-equipped microgrids, in microgrid order.
  std::vector<StorageSpec> storages() const {
    std::vector<StorageSpec> out;
    for (const auto& mg : microgrids)
      if (mg.storage) out.push_back(*mg.storage);
    return out;
  }

  std::vector<double> initial_levels() const {
    std::vector<double> out;
    for (const auto& mg : microgrids)
      if (mg.storage) out.push_back(mg.storage->initial_level);
    return out;
  }

  /// Three microgrids, storages of 200 and 250 kWh on the first two.
  static SystemConfig defaults() {
    SystemConfig c;
    for (int id = 1; id <= 3; ++id) {
      MicrogridSpec mg;
      mg.id = id;
      mg.series = "mg" + std::to_string(id);
      mg.omega.fill(5.0);
      if (id == 1) mg.storage = StorageSpec::with_defaults(200.0);
      if (id == 2) mg.storage = StorageSpec::with_defaults(250.0);
      c.microgrids.push_back(mg);
    }
    return c;
  }
};

/// Aggregate SoC bin: fraction of total capacity over [30%, 100%] in 8 bins.
inline std::size_t soc_to_level(std::span<const double> levels, std::span<const StorageSpec> specs) {
  if (levels.size() != specs.size())
    throw InvalidInput("soc_to_level: one level per storage required");
  constexpr double tol = 1e-9;
  double stored = 0.0;
  double capacity = 0.0;
  for (std::size_t n = 0; n < specs.size(); ++n) {
    if (levels[n] < specs[n].capacity_min - tol || levels[n] > specs[n].capacity_max + tol)
      throw InvalidInput("soc_to_level: level " + std::to_string(levels[n]) + " of storage " +
                         std::to_string(n) + " outside its bounds");
    stored += levels[n];
    capacity += specs[n].capacity_max;
  }
  if (capacity <= 0.0) return 0;
  const double frac = stored / capacity;
  // The small offset keeps exact bin edges (e.g. 0.3875) from rounding down.
  const double bin = std::floor((frac - kSocFloor) / kSocBinWidth + 1e-9);
  return static_cast<std::size_t>(std::clamp(bin, 0.0, static_cast<double>(kNumSocLevels - 1)));
}

struct MicrogridSeries {
  std::string name;
  HourlySeries baseload{};
  HourlySeries renewable{};
};

struct TimeSeriesDay {
  std::vector<MicrogridSeries> microgrids;

  const MicrogridSeries& find(const std::string& name) const {
    for (const auto& m : microgrids)
      if (m.name == name) return m;
    throw DataError("time series has no entry for microgrid '" + name + "'");
  }
};

/// Exact simulator state: the observation plus the continuous storage levels.
struct PhysicalState {
  EnvState obs;
  std::vector<double> levels;  // one per storage-equipped microgrid
};

struct StepInfo {
  double lambda = 0.0;
  std::vector<double> demands;      // per microgrid
  std::vector<double> renewables;   // per microgrid
  std::vector<double> delta_s;      // per microgrid, 0 without storage
  std::vector<double> grid_powers;  // per microgrid
  double grid_total = 0.0;
  std::vector<double> levels;  // post-step, per storage
  double penalty = 0.0;
};

struct EnvTransition {
  PhysicalState next;
  ObjectiveVector reward;
  StepInfo info;
  bool terminal = false;
};

inline PhysicalState initial_state(const SystemConfig& config) {
  PhysicalState s;
  s.levels = config.initial_levels();
  s.obs = {0, soc_to_level(s.levels, config.storages())};
  return s;
}

/// One hourly step. Storage moves by +-ramp_max (or 0), clipped into
/// [capacity_min, capacity_max], so the penalty term stays zero on trajectories.
inline EnvTransition step(const PhysicalState& state, EnvAction action, const TimeSeriesDay& day,
                          const SystemConfig& config) {
  if (state.obs.tod >= kHoursPerDay || state.obs.soc_level >= kNumSocLevels)
    throw InvalidInput("step: state out of range");
  if (action.price_level >= kNumPriceLevels) throw InvalidInput("step: action out of range");

  const std::size_t hour = state.obs.tod;
  const auto storages = config.storages();
  if (state.levels.size() != storages.size())
    throw InvalidInput("step: one storage level per storage required");

  EnvTransition tr;
  StepInfo& info = tr.info;
  info.lambda = action.price();

  const std::size_t n_mg = config.microgrids.size();
  info.demands.resize(n_mg);
  info.renewables.resize(n_mg);
  info.delta_s.assign(n_mg, 0.0);
  info.grid_powers.resize(n_mg);
  info.levels = state.levels;

  std::size_t k = 0;
  for (std::size_t n = 0; n < n_mg; ++n) {
    const auto& mg = config.microgrids[n];
    const auto& series = day.find(mg.series);
    info.demands[n] = demand(info.lambda, series.baseload[hour], config.economics);
    info.renewables[n] = series.renewable[hour];
    if (mg.storage) {
      const auto& st = *mg.storage;
      double target = state.levels[k];
      if (action.storage_cmd == StorageCmd::charge) target += st.ramp_max;
      if (action.storage_cmd == StorageCmd::discharge) target -= st.ramp_max;
      target = std::clamp(target, st.capacity_min, st.capacity_max);
      info.delta_s[n] = target - state.levels[k];
      info.levels[k] = target;
      ++k;
    }
    info.grid_powers[n] = grid_power(info.demands[n], info.renewables[n], info.delta_s[n]);
    info.grid_total += info.grid_powers[n];
  }

  info.penalty = constraint_penalty(info.levels, state.levels, storages);
  tr.reward = objective_vector(
      welfare(info.demands, info.lambda, config.microgrids, hour, config.economics),
      stored_energy_objective(info.levels), grid_profit(info.lambda, info.grid_total, config.economics),
      config.economics.penalty_weight * info.penalty);

  tr.next.levels = info.levels;
  tr.next.obs = {(hour + 1) % kHoursPerDay, soc_to_level(info.levels, storages)};
  tr.terminal = hour + 1 == kHoursPerDay;
  return tr;
}

/// Deterministic state -> action map over all 192 states.
class Policy {
 public:
  Policy() = default;
  explicit Policy(EnvAction fill) { actions_.fill(fill); }

  EnvAction operator()(EnvState s) const { return actions_.at(s.index()); }
  EnvAction& operator[](std::size_t state_index) { return actions_.at(state_index); }
  const EnvAction& operator[](std::size_t state_index) const { return actions_.at(state_index); }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::array<EnvAction, kNumStates> actions_{};
};

struct StepRecord {
  EnvState state;
  EnvAction action;
  StepInfo info;
  ObjectiveVector reward;
};

struct Rollout {
  ObjectiveVector total;
  std::vector<StepRecord> trajectory;
};

/// Undiscounted one-day episode from hour 0 and the configured initial levels.
inline Rollout rollout(const Policy& policy, const TimeSeriesDay& day, const SystemConfig& config) {
  Rollout out;
  out.trajectory.reserve(kHoursPerDay);
  PhysicalState s = initial_state(config);
  for (std::size_t t = 0; t < kHoursPerDay; ++t) {
    const EnvAction a = policy(s.obs);
    auto tr = step(s, a, day, config);
    out.total += tr.reward;
    out.trajectory.push_back({s.obs, a, std::move(tr.info), tr.reward});
    s = std::move(tr.next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time-series files: header `hour,mg1_baseload,mg1_renewable,...`, 24 rows.

inline TimeSeriesDay parse_timeseries(std::istream& in, const std::string& source = "<stream>") {
  const auto table = csv::read(in);
  if (table.header.empty() || table.header[0] != "hour")
    throw DataError(source + ": first column must be 'hour'");
  if ((table.header.size() - 1) % 2 != 0 || table.header.size() < 3)
    throw DataError(source + ": expected baseload/renewable column pairs after 'hour'");

  TimeSeriesDay day;
  for (std::size_t c = 1; c < table.header.size(); c += 2) {
    const auto& b = table.header[c];
    const auto& r = table.header[c + 1];
    const std::string suffix_b = "_baseload", suffix_r = "_renewable";
    if (b.size() <= suffix_b.size() || b.compare(b.size() - suffix_b.size(), suffix_b.size(), suffix_b) != 0)
      throw DataError(source + ": column " + std::to_string(c + 1) + " ('" + b + "') must end in _baseload");
    const std::string name = b.substr(0, b.size() - suffix_b.size());
    if (r != name + suffix_r)
      throw DataError(source + ": column " + std::to_string(c + 2) + " must be '" + name + suffix_r + "'");
    day.microgrids.push_back({name, {}, {}});
  }

  if (table.rows.size() != kHoursPerDay) {
    throw DataError(source + ": series '" + day.microgrids.front().name + "' has " +
                    std::to_string(table.rows.size()) + " rows, expected 24");
  }
  for (std::size_t row = 0; row < kHoursPerDay; ++row) {
    const auto& fields = table.rows[row];
    const std::string where = source + " row " + std::to_string(row + 1);
    if (csv::parse_int(fields[0], where + " column 1") != static_cast<long long>(row))
      throw DataError(where + " column 1: hours must run 0..23 in order");
    for (std::size_t m = 0; m < day.microgrids.size(); ++m) {
      for (int kind = 0; kind < 2; ++kind) {
        const std::size_t col = 1 + 2 * m + kind;
        const std::string cell = where + " column " + std::to_string(col + 1) + " (" + table.header[col] + ")";
        const double v = csv::parse_double(fields[col], cell);
        if (!(v >= 0.0) || !std::isfinite(v)) throw DataError(cell + ": value must be finite and >= 0");
        (kind == 0 ? day.microgrids[m].baseload : day.microgrids[m].renewable)[row] = v;
      }
    }
  }
  return day;
}

inline TimeSeriesDay load_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open time-series file '" + path + "'");
  return parse_timeseries(in, path);
}

inline std::string format_timeseries(const TimeSeriesDay& day) {
  std::ostringstream out;
  std::vector<std::string> header{"hour"};
  for (const auto& m : day.microgrids) {
    header.push_back(m.name + "_baseload");
    header.push_back(m.name + "_renewable");
  }
  csv::write_row(out, header);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    std::vector<std::string> row{std::to_string(h)};
    for (const auto& m : day.microgrids) {
      row.push_back(csv::fmt(m.baseload[h]));
      row.push_back(csv::fmt(m.renewable[h]));
    }
    csv::write_row(out, row);
  }
  return out.str();
}

/// Synthetic campus-like day: evening demand peak, midday solar, nothing
/// generated before 06:00 or after 19:00. Values are rounded to 0.01 kWh so
/// they survive the 6-digit CSV format unchanged.
inline TimeSeriesDay synth_day(std::uint64_t seed, const SystemConfig& config) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
  constexpr double pi = 3.14159265358979323846;

  TimeSeriesDay day;
  for (const auto& mg : config.microgrids) {
    MicrogridSeries s;
    s.name = mg.series;
    const double base = 25.0 + 15.0 * unit(rng);
    const double evening = 15.0 + 15.0 * unit(rng);
    const double morning = 5.0 + 5.0 * unit(rng);
    const double solar_peak = 20.0 + 30.0 * unit(rng);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      const double t = static_cast<double>(h);
      const double load = base + evening * std::exp(-0.5 * std::pow((t - 19.0) / 2.0, 2)) +
                          morning * std::exp(-0.5 * std::pow((t - 8.0) / 1.5, 2));
      s.baseload[h] = round2(load * (0.95 + 0.1 * unit(rng)));
      const double sun = (h >= 6 && h <= 19) ? std::sin(pi * (t - 6.0) / 13.0) : 0.0;
      s.renewable[h] = round2(std::max(0.0, solar_peak * sun * (0.85 + 0.15 * unit(rng))));
    }
    day.microgrids.push_back(std::move(s));
  }
  return day;
}

}  // namespace mgmorl
