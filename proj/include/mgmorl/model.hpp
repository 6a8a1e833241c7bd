#pragma once

// Economic and physical formulas of the multi-microgrid market: price-elastic
// demand, user welfare, grid balance, generation cost/profit, stored energy
// and the storage constraint penalty. Everything here is a pure function.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgmorl/errors.hpp"

namespace mgmorl {

inline constexpr std::size_t kHoursPerDay = 24;
inline constexpr std::size_t kNumObjectives = 4;

using HourlySeries = std::array<double, kHoursPerDay>;
using ObjectiveArray = std::array<double, kNumObjectives>;

struct StorageSpec {
  double capacity_max = 0.0;   // kWh
  double capacity_min = 0.0;   // kWh, emergency floor
  double ramp_max = 0.0;       // kWh per step, both directions
  double initial_level = 0.0;  // kWh

  /// Capacity-relative defaults: floor 30%, ramp 10%, start 50%.
  static StorageSpec with_defaults(double capacity) {
    return {capacity, 0.3 * capacity, 0.1 * capacity, 0.5 * capacity};
  }
};

struct MicrogridSpec {
  int id = 0;
  std::optional<StorageSpec> storage;
  HourlySeries omega{};  // utility coefficient per hour of day
  std::string series;    // column prefix in the time-series file, e.g. "mg1"
};

struct EconomicParams {
  double alpha = 0.05;  // utility curvature
  double a_g = 0.005;
  double b_g = 1.0;
  double c_g = 10.0;
  double elasticity_slope = 0.5;
  double lambda_ref = 3.0;
  double penalty_weight = 1.0;  // scales the constraint penalty in step rewards
};

/// Objective values in reward form: w, s and g are "more is better",
/// `a` is a non-negative penalty and enters dominance as -a.
struct ObjectiveVector {
  double w = 0.0;
  double s = 0.0;
  double g = 0.0;
  double a = 0.0;

  /// (w, s, g, -a): every component maximized.
  constexpr ObjectiveArray maximization_form() const { return {w, s, g, -a}; }

  ObjectiveVector& operator+=(const ObjectiveVector& o) {
    w += o.w;
    s += o.s;
    g += o.g;
    a += o.a;
    return *this;
  }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

inline void validate(const StorageSpec& st) {
  if (!(st.capacity_min >= 0.0 && st.capacity_min < st.capacity_max))
    throw InvalidInput("storage: require 0 <= capacity_min < capacity_max");
  if (!(st.ramp_max > 0.0 && st.ramp_max <= st.capacity_max))
    throw InvalidInput("storage: require 0 < ramp_max <= capacity_max");
  if (!(st.initial_level >= st.capacity_min && st.initial_level <= st.capacity_max))
    throw InvalidInput("storage: initial_level outside [capacity_min, capacity_max]");
}

inline void validate(const EconomicParams& p) {
  if (!(p.alpha > 0.0)) throw InvalidInput("alpha must be > 0");
  if (!(p.a_g > 0.0)) throw InvalidInput("a_g must be > 0");
  if (!(p.b_g >= 0.0)) throw InvalidInput("b_g must be >= 0");
  if (!(p.c_g >= 0.0)) throw InvalidInput("c_g must be >= 0");
  if (!(p.elasticity_slope >= 0.0)) throw InvalidInput("elasticity_slope must be >= 0");
  if (!(p.lambda_ref > 0.0)) throw InvalidInput("lambda_ref must be > 0");
  if (!(p.penalty_weight >= 0.0)) throw InvalidInput("penalty_weight must be >= 0");
}

/// Relative demand response h(lambda), linear in the relative price
/// deviation and clamped to +-50%.
inline double elasticity(double lambda, const EconomicParams& p) {
  const double h = -p.elasticity_slope * (lambda - p.lambda_ref) / p.lambda_ref;
  return std::clamp(h, -0.5, 0.5);
}

/// Price-responsive demand (1 + h(lambda)) * baseload.
inline double demand(double lambda, double baseload, const EconomicParams& p) {
  if (!(lambda > 0.0)) throw InvalidInput("demand: lambda must be > 0");
  if (!(baseload >= 0.0)) throw InvalidInput("demand: baseload must be >= 0");
  return (1.0 + elasticity(lambda, p)) * baseload;
}

/// Quadratic utility with a flat continuation past the satiation point omega/alpha.
inline double user_utility(double p_d, double omega, double alpha) {
  if (!(p_d >= 0.0)) throw InvalidInput("user_utility: p_d must be >= 0");
  if (!(omega > 0.0) || !(alpha > 0.0))
    throw InvalidInput("user_utility: omega and alpha must be > 0");
  if (p_d <= omega / alpha) return omega * p_d - 0.5 * alpha * p_d * p_d;
  return omega * omega / (2.0 * alpha);
}

inline double user_cost(double lambda, double p_d) {
  if (!(lambda > 0.0)) throw InvalidInput("user_cost: lambda must be > 0");
  if (!(p_d >= 0.0)) throw InvalidInput("user_cost: p_d must be >= 0");
  return lambda * p_d;
}

/// Aggregate consumer welfare sum_n (f_u(p_dn, omega_n(hour)) - lambda * p_dn).
inline double welfare(std::span<const double> demands, double lambda,
                      std::span<const MicrogridSpec> specs, std::size_t hour,
                      const EconomicParams& p) {
  if (demands.size() != specs.size())
    throw InvalidInput("welfare: one demand per microgrid required");
  if (hour >= kHoursPerDay) throw InvalidInput("welfare: hour out of range");
  double total = 0.0;
  for (std::size_t n = 0; n < demands.size(); ++n)
    total += user_utility(demands[n], specs[n].omega[hour], p.alpha) - user_cost(lambda, demands[n]);
  return total;
}

/// Consumption at which marginal utility equals the price.
inline double welfare_optimal_demand(double lambda, double omega, double alpha) {
  if (!(lambda > 0.0)) throw InvalidInput("welfare_optimal_demand: lambda must be > 0");
  return std::max(0.0, (omega - lambda) / alpha);
}

/// Grid import of one microgrid; negative means export. Charging (delta_s > 0) adds load.
inline double grid_power(double demand_kwh, double renewable, double delta_s) {
  if (!(demand_kwh >= 0.0)) throw InvalidInput("grid_power: demand must be >= 0");
  if (!(renewable >= 0.0)) throw InvalidInput("grid_power: renewable must be >= 0");
  return demand_kwh + delta_s - renewable;
}

inline double generation_cost(double p_g, const EconomicParams& p) {
  return p.a_g * p_g * p_g + p.b_g * p_g + p.c_g;
}

/// Grid operator profit; applied verbatim for negative (export) totals.
inline double grid_profit(double lambda, double p_g_total, const EconomicParams& p) {
  if (!(lambda > 0.0)) throw InvalidInput("grid_profit: lambda must be > 0");
  return lambda * p_g_total - generation_cost(p_g_total, p);
}

inline double stored_energy_objective(std::span<const double> levels) {
  double total = 0.0;
  for (double v : levels) total += v;
  return total;
}

/// Summed ramp, ceiling and floor violations; zero exactly on the feasible set.
inline double constraint_penalty(std::span<const double> levels_now,
                                 std::span<const double> levels_prev,
                                 std::span<const StorageSpec> specs) {
  if (levels_now.size() != levels_prev.size() || levels_now.size() != specs.size())
    throw InvalidInput("constraint_penalty: level and spec lists differ in length");
  double total = 0.0;
  for (std::size_t n = 0; n < specs.size(); ++n) {
    const double now = levels_now[n];
    total += std::max(std::abs(now - levels_prev[n]) - specs[n].ramp_max, 0.0);
    total += std::max(now - specs[n].capacity_max, 0.0);
    total += std::max(specs[n].capacity_min - now, 0.0);
  }
  return total;
}

inline ObjectiveVector objective_vector(double welfare_value, double stored, double profit,
                                        double penalty) {
  if (!(penalty >= 0.0)) throw InvalidInput("objective_vector: penalty must be >= 0");
  return {welfare_value, stored, profit, penalty};
}

}  // namespace mgmorl
