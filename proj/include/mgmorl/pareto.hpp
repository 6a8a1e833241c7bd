#pragma once

// Approximate Pareto front: one scalarized training run per simplex weight
// vector, non-dominated filtering of the greedy-policy returns, and max-min
// selection of a fair operating point.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "mgmorl/environment.hpp"
#include "mgmorl/errors.hpp"
#include "mgmorl/learner.hpp"
#include "mgmorl/model.hpp"

namespace mgmorl {

/// u dominates v in (w, s, g, -a) maximization order.
inline bool dominates(const ObjectiveVector& u, const ObjectiveVector& v) {
  const auto mu = u.maximization_form();
  const auto mv = v.maximization_form();
  bool strictly = false;
  for (std::size_t n = 0; n < kNumObjectives; ++n) {
    if (mu[n] < mv[n]) return false;
    if (mu[n] > mv[n]) strictly = true;
  }
  return strictly;
}

/// Indices of the maximal points, in input order.
inline std::vector<std::size_t> non_dominated_indices(std::span<const ObjectiveVector> points) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j)
      dominated = j != i && dominates(points[j], points[i]);
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

inline std::vector<ObjectiveVector> non_dominated_filter(std::span<const ObjectiveVector> points) {
  std::vector<ObjectiveVector> out;
  for (auto i : non_dominated_indices(points)) out.push_back(points[i]);
  return out;
}

/// All (i, j, k, l) / H with i + j + k + l = H; C(H+3, 3) vectors, the
/// F_w basis vector first.
inline std::vector<ObjectiveArray> weight_grid(int granularity) {
  if (granularity < 1) throw InvalidInput("weight_grid: granularity must be >= 1");
  const int h = granularity;
  const double inv = 1.0 / h;
  std::vector<ObjectiveArray> out;
  for (int i = h; i >= 0; --i)
    for (int j = h - i; j >= 0; --j)
      for (int k = h - i - j; k >= 0; --k) {
        const int l = h - i - j - k;
        out.push_back({i * inv, j * inv, k * inv, l * inv});
      }
  return out;
}

struct ArchiveEntry {
  ObjectiveArray weights{};
  ScalarizationKind kind = ScalarizationKind::linear;
  std::uint64_t seed = 0;
  ObjectiveVector ret;  // undiscounted greedy-policy return
  Policy policy;
  Rollout rollout;
};

struct ParetoArchive {
  std::vector<ArchiveEntry> entries;

  static ParetoArchive from_runs(const std::vector<ArchiveEntry>& runs) {
    std::vector<ObjectiveVector> rets;
    for (const auto& r : runs) rets.push_back(r.ret);
    ParetoArchive a;
    for (auto i : non_dominated_indices(rets)) a.entries.push_back(runs[i]);
    return a;
  }
};

struct SweepResult {
  std::vector<ArchiveEntry> runs;  // every weight vector, unfiltered, grid order
  ParetoArchive archive;
};

/// Trains and evaluates one policy per weight vector. Run k uses seed
/// params.seed + k. Runs are independent; `threads` = 0 picks the hardware
/// concurrency. The result does not depend on the thread count.
inline SweepResult sweep(const SystemConfig& config, const TimeSeriesDay& day, ScalarizationKind kind,
                         int granularity, const LearnerParams& params, double utopian_margin = 1.0,
                         std::optional<bool> normalize = std::nullopt, unsigned threads = 0) {
  const auto grid = weight_grid(granularity);
  std::vector<ArchiveEntry> runs(grid.size());

  const auto run_one = [&](std::size_t k) {
    ScalarizationSpec spec = kind == ScalarizationKind::linear
                                 ? ScalarizationSpec::linear(grid[k])
                                 : ScalarizationSpec::chebyshev(grid[k], utopian_margin);
    if (normalize) spec.normalize = *normalize;
    LearnerParams p = params;
    p.seed = params.seed + k;
    auto trained = train(config, day, spec, p);
    auto ro = rollout(trained.policy, day, config);
    runs[k] = {grid[k], kind, p.seed, ro.total, trained.policy, std::move(ro)};
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  if (threads <= 1) {
    for (std::size_t k = 0; k < grid.size(); ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
          try {
            run_one(k);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  SweepResult out;
  out.archive = ParetoArchive::from_runs(runs);
  out.runs = std::move(runs);
  return out;
}

/// Per-objective min-max scaling over a point set, in maximization form.
/// Constant objectives scale to 1.
inline std::vector<ObjectiveArray> normalize_points(std::span<const ObjectiveVector> points) {
  ObjectiveArray lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    const auto m = p.maximization_form();
    for (std::size_t n = 0; n < kNumObjectives; ++n) {
      lo[n] = std::min(lo[n], m[n]);
      hi[n] = std::max(hi[n], m[n]);
    }
  }
  std::vector<ObjectiveArray> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const auto m = p.maximization_form();
    ObjectiveArray x;
    for (std::size_t n = 0; n < kNumObjectives; ++n)
      x[n] = hi[n] > lo[n] ? (m[n] - lo[n]) / (hi[n] - lo[n]) : 1.0;
    out.push_back(x);
  }
  return out;
}

/// Index of the point maximizing its smallest normalized objective; ties by
/// largest normalized sum, then lowest index.
inline std::size_t fair_index(std::span<const ObjectiveVector> points) {
  if (points.empty()) throw InvalidInput("fair_point: archive is empty");
  const auto norm = normalize_points(points);
  std::size_t best = 0;
  double best_min = -1.0;
  double best_sum = -1.0;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const double mn = *std::min_element(norm[i].begin(), norm[i].end());
    double sum = 0.0;
    for (double x : norm[i]) sum += x;
    if (mn > best_min || (mn == best_min && sum > best_sum)) {
      best = i;
      best_min = mn;
      best_sum = sum;
    }
  }
  return best;
}

inline std::size_t fair_index(const ParetoArchive& archive) {
  std::vector<ObjectiveVector> rets;
  for (const auto& e : archive.entries) rets.push_back(e.ret);
  return fair_index(rets);
}

inline const ArchiveEntry& fair_point(const ParetoArchive& archive) {
  return archive.entries.at(fair_index(archive));
}

}  // namespace mgmorl
