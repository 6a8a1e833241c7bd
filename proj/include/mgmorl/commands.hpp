#pragma once

// Batch commands behind the command-line tool. Each writes its files into
// the configured output directory and reports a short summary on `log`.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mgmorl/config.hpp"
#include "mgmorl/environment.hpp"
#include "mgmorl/export.hpp"
#include "mgmorl/learner.hpp"
#include "mgmorl/pareto.hpp"

namespace mgmorl {

namespace fs = std::filesystem;

/// Loads the configured time series, or synthesizes one; checks every
/// microgrid has a series.
inline TimeSeriesDay resolve_day(const RunConfig& c) {
  TimeSeriesDay day = c.data_path ? load_timeseries(*c.data_path) : synth_day(c.synth_seed, c.system);
  for (const auto& mg : c.system.microgrids) day.find(mg.series);
  return day;
}

inline fs::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

struct TrainOutputs {
  fs::path convergence;
  fs::path policy;
  fs::path trajectory;
  TrainResult result;
  Rollout rollout;
};

inline TrainOutputs cmd_train(const RunConfig& c, std::ostream& log) {
  validate(c);
  const auto day = resolve_day(c);
  auto result = train(c.system, day, c.scalarization(), c.learner);
  auto ro = rollout(result.policy, day, c.system);

  const auto dir = prepare_output_dir(c.output_dir);
  TrainOutputs out{dir / "convergence.csv", dir / "policy.csv", dir / "trajectory.csv", std::move(result), std::move(ro)};
  csv::write_file((dir / "config.json").string(), to_json(c).dump(2) + "\n");
  csv::write_file(out.convergence.string(), format_convergence(out.result.log));
  csv::write_file(out.policy.string(), format_policy(out.result.policy));
  csv::write_file(out.trajectory.string(), format_trajectory(out.rollout, c.system));

  const auto& t = out.rollout.total;
  log << "trained " << c.learner.episodes << " episodes (" << to_string(c.kind) << ", weights "
      << csv::fmt(c.weights[0]) << "," << csv::fmt(c.weights[1]) << "," << csv::fmt(c.weights[2]) << ","
      << csv::fmt(c.weights[3]) << ")\n"
      << "greedy return: Fw=" << csv::fmt(t.w) << " Fs=" << csv::fmt(t.s) << " Fg=" << csv::fmt(t.g)
      << " Fa=" << csv::fmt(t.a) << "\n"
      << "wrote " << out.convergence.string() << ", " << out.policy.string() << ", " << out.trajectory.string() << "\n";
  return out;
}

struct SweepOutputs {
  fs::path archive_csv;
  std::vector<fs::path> trajectories;  // one per archive entry
  SweepResult result;
  std::size_t fair = 0;
};

inline SweepOutputs cmd_sweep(const RunConfig& c, std::ostream& log) {
  validate(c);
  const auto day = resolve_day(c);
  auto result = sweep(c.system, day, c.kind, c.grid, c.learner, c.utopian_margin, c.normalize, c.threads);

  const auto dir = prepare_output_dir(c.output_dir);
  const auto traj_dir = dir / "trajectories";
  std::error_code ec;
  fs::remove_all(traj_dir, ec);  // stale entries from a larger earlier sweep
  prepare_output_dir(traj_dir.string());

  SweepOutputs out;
  out.archive_csv = dir / "archive.csv";
  out.fair = fair_index(result.archive);
  csv::write_file((dir / "config.json").string(), to_json(c).dump(2) + "\n");
  csv::write_file(out.archive_csv.string(), format_archive(result.archive));
  for (std::size_t k = 0; k < result.archive.entries.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "entry_%03zu.csv", k);
    out.trajectories.push_back(traj_dir / name);
    csv::write_file(out.trajectories.back().string(),
                    format_trajectory(result.archive.entries[k].rollout, c.system));
  }

  const auto& f = result.archive.entries[out.fair];
  log << "sweep: " << result.runs.size() << " runs (" << to_string(c.kind) << ", grid " << c.grid
      << "), archive size " << result.archive.entries.size() << "\n"
      << "fair point: entry " << out.fair << " weights " << csv::fmt(f.weights[0]) << "," << csv::fmt(f.weights[1])
      << "," << csv::fmt(f.weights[2]) << "," << csv::fmt(f.weights[3]) << " Fw=" << csv::fmt(f.ret.w)
      << " Fs=" << csv::fmt(f.ret.s) << " Fg=" << csv::fmt(f.ret.g) << " Fa=" << csv::fmt(f.ret.a) << "\n"
      << "wrote " << out.archive_csv.string() << " and " << out.trajectories.size() << " trajectory files\n";
  out.result = std::move(result);
  return out;
}

inline fs::path cmd_synth(std::uint64_t seed, const RunConfig& c, std::ostream& log) {
  validate(c);
  const auto dir = prepare_output_dir(c.output_dir);
  const auto path = dir / "timeseries.csv";
  csv::write_file(path.string(), format_timeseries(synth_day(seed, c.system)));
  log << "wrote " << path.string() << " (seed " << seed << ")\n";
  return path;
}

}  // namespace mgmorl
