#pragma once

// CSV exporters for training and sweep results, plus the matching readers.

#include <sstream>
#include <string>
#include <vector>

#include "mgmorl/csv.hpp"
#include "mgmorl/environment.hpp"
#include "mgmorl/learner.hpp"
#include "mgmorl/pareto.hpp"

namespace mgmorl {

// --- convergence log: episode,scalarized_return,Fw,Fs,Fg,Fa ----------------

inline std::string format_convergence(const std::vector<EpisodeLog>& log) {
  std::ostringstream out;
  csv::write_row(out, {"episode", "scalarized_return", "Fw", "Fs", "Fg", "Fa"});
  for (const auto& e : log)
    csv::write_row(out, {std::to_string(e.episode), csv::fmt(e.scalarized_return), csv::fmt(e.total.w),
                         csv::fmt(e.total.s), csv::fmt(e.total.g), csv::fmt(e.total.a)});
  return out.str();
}

inline std::vector<EpisodeLog> parse_convergence(std::istream& in) {
  const auto t = csv::read(in);
  const std::size_t ep = t.column("episode"), sr = t.column("scalarized_return"), fw = t.column("Fw"),
                    fs = t.column("Fs"), fg = t.column("Fg"), fa = t.column("Fa");
  std::vector<EpisodeLog> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "convergence row " + std::to_string(r + 1);
    EpisodeLog e;
    e.episode = static_cast<std::size_t>(csv::parse_int(row[ep], where));
    e.scalarized_return = csv::parse_double(row[sr], where);
    e.total = {csv::parse_double(row[fw], where), csv::parse_double(row[fs], where),
               csv::parse_double(row[fg], where), csv::parse_double(row[fa], where)};
    out.push_back(e);
  }
  return out;
}

// --- greedy policy: state,tod,soc_level,action,price_level,price,storage_cmd -

inline std::string format_policy(const Policy& policy) {
  std::ostringstream out;
  csv::write_row(out, {"state", "tod", "soc_level", "action", "price_level", "price", "storage_cmd"});
  for (std::size_t s = 0; s < kNumStates; ++s) {
    const auto st = EnvState::from_index(s);
    const auto a = policy[s];
    csv::write_row(out, {std::to_string(s), std::to_string(st.tod), std::to_string(st.soc_level),
                         std::to_string(a.index()), std::to_string(a.price_level), csv::fmt(a.price()),
                         to_string(a.storage_cmd)});
  }
  return out.str();
}

inline Policy parse_policy(std::istream& in) {
  const auto t = csv::read(in);
  if (t.rows.size() != kNumStates) throw DataError("policy: expected 192 rows");
  const std::size_t sc = t.column("state"), pc = t.column("price_level"), cc = t.column("storage_cmd");
  Policy p;
  std::vector<bool> seen(kNumStates, false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = "policy row " + std::to_string(r + 1);
    const auto s = csv::parse_int(t.rows[r][sc], where);
    const auto level = csv::parse_int(t.rows[r][pc], where);
    if (s < 0 || s >= static_cast<long long>(kNumStates) || seen[s]) throw DataError(where + ": bad state index");
    if (level < 0 || level >= static_cast<long long>(kNumPriceLevels)) throw DataError(where + ": bad price level");
    seen[s] = true;
    p[s] = {static_cast<std::size_t>(level), storage_cmd_from_string(t.rows[r][cc])};
  }
  return p;
}

// --- 24-hour trajectory ------------------------------------------------------

inline std::string format_trajectory(const Rollout& ro, const SystemConfig& config) {
  std::vector<std::string> header{"hour", "soc_level", "price_level", "price", "storage_cmd",
                                  "Fw", "Fs", "Fg", "Fa", "grid_total"};
  for (const auto& mg : config.microgrids)
    for (const char* col : {"_demand", "_renewable", "_delta_s", "_grid"}) header.push_back(mg.series + col);
  for (const auto& mg : config.microgrids)
    if (mg.storage) header.push_back(mg.series + "_level");
  header.push_back("soc_fraction");

  double capacity = 0.0;
  for (const auto& st : config.storages()) capacity += st.capacity_max;

  std::ostringstream out;
  csv::write_row(out, header);
  for (const auto& rec : ro.trajectory) {
    const auto& i = rec.info;
    std::vector<std::string> row{std::to_string(rec.state.tod), std::to_string(rec.state.soc_level),
                                 std::to_string(rec.action.price_level), csv::fmt(i.lambda),
                                 to_string(rec.action.storage_cmd), csv::fmt(rec.reward.w), csv::fmt(rec.reward.s),
                                 csv::fmt(rec.reward.g), csv::fmt(rec.reward.a), csv::fmt(i.grid_total)};
    for (std::size_t n = 0; n < config.microgrids.size(); ++n) {
      row.push_back(csv::fmt(i.demands[n]));
      row.push_back(csv::fmt(i.renewables[n]));
      row.push_back(csv::fmt(i.delta_s[n]));
      row.push_back(csv::fmt(i.grid_powers[n]));
    }
    double stored = 0.0;
    for (double v : i.levels) {
      row.push_back(csv::fmt(v));
      stored += v;
    }
    row.push_back(csv::fmt(capacity > 0.0 ? stored / capacity : 0.0));
    csv::write_row(out, row);
  }
  return out.str();
}

/// Trajectory rows as a validated table: 24 rows, numeric except storage_cmd.
inline csv::Table parse_trajectory(std::istream& in) {
  auto t = csv::read(in);
  if (t.rows.size() != kHoursPerDay) throw DataError("trajectory: expected 24 rows");
  const std::size_t cmd = t.column("storage_cmd");
  t.column("price");
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      const std::string where = "trajectory row " + std::to_string(r + 1) + " column " + t.header[c];
      if (c == cmd) storage_cmd_from_string(t.rows[r][c]);
      else csv::parse_double(t.rows[r][c], where);
    }
  return t;
}

// --- archive: weight_w,weight_s,weight_g,weight_a,Fw,Fs,Fg,Fa,is_fair_point --

struct ArchiveRow {
  ObjectiveArray weights{};
  ObjectiveVector ret;
  bool is_fair_point = false;
};

inline std::string format_archive(const ParetoArchive& archive) {
  const std::size_t fair = archive.entries.empty() ? 0 : fair_index(archive);
  std::ostringstream out;
  csv::write_row(out, {"weight_w", "weight_s", "weight_g", "weight_a", "Fw", "Fs", "Fg", "Fa", "is_fair_point"});
  for (std::size_t k = 0; k < archive.entries.size(); ++k) {
    const auto& e = archive.entries[k];
    csv::write_row(out, {csv::fmt(e.weights[0]), csv::fmt(e.weights[1]), csv::fmt(e.weights[2]),
                         csv::fmt(e.weights[3]), csv::fmt(e.ret.w), csv::fmt(e.ret.s), csv::fmt(e.ret.g),
                         csv::fmt(e.ret.a), k == fair ? "true" : "false"});
  }
  return out.str();
}

inline std::vector<ArchiveRow> parse_archive(std::istream& in) {
  const auto t = csv::read(in);
  const char* names[] = {"weight_w", "weight_s", "weight_g", "weight_a", "Fw", "Fs", "Fg", "Fa"};
  std::size_t cols[8];
  for (int i = 0; i < 8; ++i) cols[i] = t.column(names[i]);
  const std::size_t flag = t.column("is_fair_point");
  std::vector<ArchiveRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = "archive row " + std::to_string(r + 1);
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = csv::parse_double(t.rows[r][cols[i]], where);
    const auto& f = t.rows[r][flag];
    if (f != "true" && f != "false") throw DataError(where + ": is_fair_point must be true or false");
    out.push_back({{v[0], v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7]}, f == "true"});
  }
  return out;
}

}  // namespace mgmorl
