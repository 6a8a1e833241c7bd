#pragma once

// Vector-valued tabular Q-learning with scalarized epsilon-greedy action
// selection. Each objective keeps its own Q component; a scalarization
// (weighted sum or weighted Chebyshev distance to a utopian point) collapses
// the vector only when an action has to be chosen.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "mgmorl/environment.hpp"
#include "mgmorl/errors.hpp"
#include "mgmorl/model.hpp"

namespace mgmorl {

/// Dense Q[state][action][objective].
class VectorQTable {
 public:
  VectorQTable(std::size_t num_states = kNumStates, std::size_t num_actions = kNumActions,
               double init = 0.0)
      : num_states_(num_states),
        num_actions_(num_actions),
        q_(num_states * num_actions * kNumObjectives, init) {}

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  std::span<double, kNumObjectives> operator()(std::size_t s, std::size_t a) {
    return std::span<double, kNumObjectives>(q_.data() + offset(s, a), kNumObjectives);
  }
  std::span<const double, kNumObjectives> operator()(std::size_t s, std::size_t a) const {
    return std::span<const double, kNumObjectives>(q_.data() + offset(s, a), kNumObjectives);
  }

  ObjectiveArray values(std::size_t s, std::size_t a) const {
    ObjectiveArray out;
    std::copy_n(q_.data() + offset(s, a), kNumObjectives, out.begin());
    return out;
  }

  const std::vector<double>& raw() const { return q_; }

  friend bool operator==(const VectorQTable&, const VectorQTable&) = default;

 private:
  std::size_t offset(std::size_t s, std::size_t a) const {
    if (s >= num_states_ || a >= num_actions_) throw InvalidInput("VectorQTable: index out of range");
    return (s * num_actions_ + a) * kNumObjectives;
  }

  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<double> q_;
};

enum class ScalarizationKind { linear, chebyshev };

inline const char* to_string(ScalarizationKind k) {
  return k == ScalarizationKind::linear ? "linear" : "chebyshev";
}

struct ScalarizationSpec {
  ScalarizationKind kind = ScalarizationKind::linear;
  ObjectiveArray weights{0.25, 0.25, 0.25, 0.25};
  ObjectiveArray utopian{};    // chebyshev only
  double utopian_margin = 1.0;  // tau
  bool normalize = false;       // running min-max scaling of Q before scalarizing

  static ScalarizationSpec linear(const ObjectiveArray& w) {
    return {ScalarizationKind::linear, w, {}, 1.0, false};
  }
  static ScalarizationSpec chebyshev(const ObjectiveArray& w, double tau = 1.0) {
    return {ScalarizationKind::chebyshev, w, {}, tau, true};
  }
};

inline void validate_weights(const ObjectiveArray& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw InvalidInput("weights must be non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("weights must sum to 1");
}

inline double linear_scalarize(std::span<const double, kNumObjectives> q, const ObjectiveArray& w) {
  validate_weights(w);
  double sum = 0.0;
  for (std::size_t n = 0; n < kNumObjectives; ++n) sum += w[n] * q[n];
  return sum;
}

/// Weighted Chebyshev distance max_n w_n |q_n - z*_n|; smaller is better.
inline double chebyshev_scalarize(std::span<const double, kNumObjectives> q, const ScalarizationSpec& spec) {
  if (spec.kind != ScalarizationKind::chebyshev)
    throw InvalidInput("chebyshev_scalarize: spec is not chebyshev");
  double worst = 0.0;
  for (std::size_t n = 0; n < kNumObjectives; ++n)
    worst = std::max(worst, spec.weights[n] * std::abs(q[n] - spec.utopian[n]));
  return worst;
}

/// Weighted L_p distance (sum_n (w_n |q_n - z*_n|)^p)^(1/p). The weight sits
/// inside the power so that p -> infinity gives the Chebyshev distance.
inline double lp_scalarize(std::span<const double, kNumObjectives> q, const ScalarizationSpec& spec, double p) {
  if (!(p >= 1.0)) throw InvalidInput("lp_scalarize: p must be >= 1");
  ObjectiveArray terms;
  for (std::size_t n = 0; n < kNumObjectives; ++n) terms[n] = spec.weights[n] * std::abs(q[n] - spec.utopian[n]);
  // Factor out the largest term so large p does not underflow/overflow.
  const double scale = *std::max_element(terms.begin(), terms.end());
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double t : terms) sum += std::pow(t / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

/// z*_n = max(z*_n, observed_n + tau). No-op for linear specs.
inline ScalarizationSpec update_utopian(ScalarizationSpec spec, const ObjectiveArray& observed) {
  if (spec.kind != ScalarizationKind::chebyshev) return spec;
  for (std::size_t n = 0; n < kNumObjectives; ++n)
    spec.utopian[n] = std::max(spec.utopian[n], observed[n] + spec.utopian_margin);
  return spec;
}

/// Running per-objective range of Q values; degenerate ranges map to 1.
class QRange {
 public:
  QRange() {
    lo_.fill(std::numeric_limits<double>::infinity());
    hi_.fill(-std::numeric_limits<double>::infinity());
  }

  void observe(std::span<const double, kNumObjectives> q) {
    for (std::size_t n = 0; n < kNumObjectives; ++n) {
      lo_[n] = std::min(lo_[n], q[n]);
      hi_[n] = std::max(hi_[n], q[n]);
    }
  }

  ObjectiveArray normalize(std::span<const double, kNumObjectives> q) const {
    ObjectiveArray out;
    for (std::size_t n = 0; n < kNumObjectives; ++n)
      out[n] = hi_[n] > lo_[n] ? (q[n] - lo_[n]) / (hi_[n] - lo_[n]) : 1.0;
    return out;
  }

 private:
  ObjectiveArray lo_;
  ObjectiveArray hi_;
};

/// Action-selection state: the spec (including its evolving utopian point)
/// and, when enabled, the Q normalization range.
class Scalarizer {
 public:
  explicit Scalarizer(ScalarizationSpec spec) : spec_(spec) { validate_weights(spec_.weights); }

  const ScalarizationSpec& spec() const { return spec_; }

  /// Folds a freshly written Q vector into the normalization range and z*.
  void observe(std::span<const double, kNumObjectives> q) {
    if (spec_.kind != ScalarizationKind::chebyshev) return;
    if (spec_.normalize) {
      range_.observe(q);
      spec_ = update_utopian(spec_, range_.normalize(q));
    } else {
      ObjectiveArray v;
      std::copy(q.begin(), q.end(), v.begin());
      spec_ = update_utopian(spec_, v);
    }
  }

  double score(std::span<const double, kNumObjectives> q) const {
    if (spec_.kind == ScalarizationKind::linear) {
      double sum = 0.0;
      for (std::size_t n = 0; n < kNumObjectives; ++n) sum += spec_.weights[n] * q[n];
      return sum;
    }
    if (spec_.normalize) return chebyshev_scalarize(range_.normalize(q), spec_);
    return chebyshev_scalarize(q, spec_);
  }

  /// Linear scores are maximized, Chebyshev distances minimized.
  bool better(double lhs, double rhs) const {
    return spec_.kind == ScalarizationKind::linear ? lhs > rhs : lhs < rhs;
  }

 private:
  ScalarizationSpec spec_;
  QRange range_;
};

/// Best action under the scalarization; ties go to the lowest action index.
inline std::size_t greedy_action(const VectorQTable& table, std::size_t state, const Scalarizer& sc) {
  std::size_t best = 0;
  double best_score = sc.score(table(state, 0));
  for (std::size_t a = 1; a < table.num_actions(); ++a) {
    const double v = sc.score(table(state, a));
    if (sc.better(v, best_score)) {
      best = a;
      best_score = v;
    }
  }
  return best;
}

inline std::size_t scalarized_epsilon_greedy(std::size_t state, const VectorQTable& table,
                                             const Scalarizer& sc, double epsilon,
                                             std::mt19937_64& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must be in [0, 1]");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (epsilon > 0.0 && coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, table.num_actions() - 1);
    return pick(rng);
  }
  return greedy_action(table, state, sc);
}

inline EnvAction scalarized_epsilon_greedy(EnvState state, const VectorQTable& table, const Scalarizer& sc,
                                           double epsilon, std::mt19937_64& rng) {
  return EnvAction::from_index(scalarized_epsilon_greedy(state.index(), table, sc, epsilon, rng));
}

struct LearnerParams {
  double alpha = 0.1;  // learning rate
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay = 0.999;  // multiplicative, per episode
  std::size_t episodes = 5000;
  std::uint64_t seed = 1;
};

inline void validate(const LearnerParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw InvalidInput("alpha must be in (0, 1]");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw InvalidInput("gamma must be in [0, 1)");
  if (!(p.epsilon_start >= 0.0 && p.epsilon_start <= 1.0)) throw InvalidInput("epsilon_start must be in [0, 1]");
  if (!(p.epsilon_end >= 0.0 && p.epsilon_end <= 1.0)) throw InvalidInput("epsilon_end must be in [0, 1]");
  if (!(p.epsilon_decay > 0.0 && p.epsilon_decay <= 1.0)) throw InvalidInput("epsilon_decay must be in (0, 1]");
  if (p.epsilon_end > p.epsilon_start) throw InvalidInput("epsilon_end must not exceed epsilon_start");
}

/// Per-objective TD update toward r_n + gamma * Q_n(s', a'); terminal
/// transitions do not bootstrap. `alpha` is taken as given so that alpha = 0
/// is a valid no-op.
inline void q_update(VectorQTable& table, std::size_t s, std::size_t a, const ObjectiveArray& reward,
                     std::size_t s_next, std::size_t a_next, double alpha, double gamma,
                     bool terminal = false) {
  const auto next = table.values(s_next, a_next);
  auto q = table(s, a);
  for (std::size_t n = 0; n < kNumObjectives; ++n) {
    const double target = reward[n] + (terminal ? 0.0 : gamma * next[n]);
    q[n] += alpha * (target - q[n]);
  }
}

inline void q_update(VectorQTable& table, EnvState s, EnvAction a, const ObjectiveVector& reward,
                     EnvState s_next, EnvAction a_next, const LearnerParams& params, bool terminal = false) {
  q_update(table, s.index(), a.index(), reward.maximization_form(), s_next.index(), a_next.index(),
           params.alpha, params.gamma, terminal);
}

struct EpisodeLog {
  std::size_t episode = 0;
  double scalarized_return = 0.0;  // weighted sum of (w, s, g, -a) returns
  ObjectiveVector total;
};

struct TrainResult {
  VectorQTable table;
  Policy policy;
  std::vector<EpisodeLog> log;
  ScalarizationSpec final_spec;  // carries the learned utopian point
};

inline double weighted_return(const ObjectiveVector& v, const ObjectiveArray& w) {
  const auto m = v.maximization_form();
  double sum = 0.0;
  for (std::size_t n = 0; n < kNumObjectives; ++n) sum += w[n] * m[n];
  return sum;
}

inline Policy greedy_policy(const VectorQTable& table, const Scalarizer& sc) {
  Policy p;
  for (std::size_t s = 0; s < kNumStates; ++s) p[s] = EnvAction::from_index(greedy_action(table, s, sc));
  return p;
}

/// Episodic multi-objective Q-learning on one day. The bootstrap action a'
/// is the scalarized greedy action at s'.
inline TrainResult train(const SystemConfig& config, const TimeSeriesDay& day, const ScalarizationSpec& spec,
                         const LearnerParams& params) {
  validate(params);
  VectorQTable table;
  Scalarizer sc(spec);
  sc.observe(table(0, 0));

  std::mt19937_64 rng(params.seed);
  std::vector<EpisodeLog> log;
  log.reserve(params.episodes);
  double epsilon = params.epsilon_start;

  for (std::size_t ep = 0; ep < params.episodes; ++ep) {
    PhysicalState s = initial_state(config);
    ObjectiveVector total;
    bool terminal = false;
    while (!terminal) {
      const EnvAction a = scalarized_epsilon_greedy(s.obs, table, sc, epsilon, rng);
      auto tr = step(s, a, day, config);
      terminal = tr.terminal;
      const EnvAction a_next = EnvAction::from_index(greedy_action(table, tr.next.obs.index(), sc));
      q_update(table, s.obs, a, tr.reward, tr.next.obs, a_next, params, terminal);
      sc.observe(table(s.obs.index(), a.index()));
      total += tr.reward;
      s = std::move(tr.next);
    }
    log.push_back({ep, weighted_return(total, spec.weights), total});
    epsilon = std::max(params.epsilon_end, epsilon * params.epsilon_decay);
  }

  Policy policy = greedy_policy(table, sc);
  return {std::move(table), policy, std::move(log), sc.spec()};
}

}  // namespace mgmorl
