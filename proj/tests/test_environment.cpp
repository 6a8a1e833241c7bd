#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mgmorl/environment.hpp"

using namespace mgmorl;

namespace {

TimeSeriesDay flat_day(const SystemConfig& c, double baseload, double renewable) {
  TimeSeriesDay d;
  for (const auto& mg : c.microgrids) {
    MicrogridSeries s;
    s.name = mg.series;
    s.baseload.fill(baseload);
    s.renewable.fill(renewable);
    d.microgrids.push_back(s);
  }
  return d;
}

// Bin by enumeration instead of floor division.
std::size_t soc_bin_oracle(double frac) {
  std::size_t k = 0;
  for (std::size_t b = 0; b < kNumSocLevels; ++b)
    if (frac >= 0.3 + 0.0875 * static_cast<double>(b) - 1e-12) k = b;
  return k;
}

Policy random_policy(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
  Policy p;
  for (std::size_t s = 0; s < kNumStates; ++s) p[s] = EnvAction::from_index(pick(rng));
  return p;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(ActionSpace, ShapeAndOrder) {
  const auto actions = action_space();
  ASSERT_EQ(actions.size(), 24u);
  EXPECT_EQ(actions.front(), (EnvAction{0, StorageCmd::charge}));
  EXPECT_DOUBLE_EQ(actions.front().price(), 1.5);
  EXPECT_EQ(actions[1].storage_cmd, StorageCmd::discharge);
  EXPECT_EQ(actions[2].storage_cmd, StorageCmd::idle);
  std::set<std::size_t> idx;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    EXPECT_EQ(actions[i].index(), i);
    idx.insert(actions[i].index());
    EXPECT_GE(actions[i].price(), 1.5);
    EXPECT_LE(actions[i].price(), 5.0);
  }
  EXPECT_EQ(idx.size(), 24u);
  EXPECT_DOUBLE_EQ(price_of_level(7), 5.0);
}

TEST(EnvState, FlatIndexBijection) {
  std::set<std::size_t> seen;
  for (std::size_t t = 0; t < 24; ++t)
    for (std::size_t k = 0; k < 8; ++k) {
      const EnvState s{t, k};
      EXPECT_EQ(s.index(), t * 8 + k);
      EXPECT_EQ(EnvState::from_index(s.index()), s);
      seen.insert(s.index());
    }
  EXPECT_EQ(seen.size(), kNumStates);
  EXPECT_EQ(*seen.rbegin(), 191u);
}

TEST(SocToLevel, Examples) {
  const auto specs = SystemConfig::defaults().storages();
  EXPECT_EQ(soc_to_level(std::vector<double>{60, 75}, specs), 0u);
  EXPECT_EQ(soc_to_level(std::vector<double>{200, 250}, specs), 7u);
  EXPECT_EQ(soc_to_level(std::vector<double>{100, 125}, specs), 2u);
  EXPECT_EQ(soc_bin_oracle(0.5), 2u);
  EXPECT_THROW(soc_to_level(std::vector<double>{201, 125}, specs), InvalidInput);
  EXPECT_THROW(soc_to_level(std::vector<double>{59, 125}, specs), InvalidInput);
  EXPECT_THROW(soc_to_level(std::vector<double>{100}, specs), InvalidInput);
}

TEST(SocToLevel, MatchesEnumerationOracle) {
  const auto specs = SystemConfig::defaults().storages();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = 60 + u(rng) * 140, b = 75 + u(rng) * 175;
    EXPECT_EQ(soc_to_level(std::vector<double>{a, b}, specs), soc_bin_oracle((a + b) / 450.0));
  }
}

TEST(Step, IdleAtReferencePriceIsNeutral) {
  auto c = SystemConfig::defaults();
  c.economics.elasticity_slope = 0.0;
  c.economics.lambda_ref = 3.0;
  const auto day = flat_day(c, 40.0, 10.0);
  const auto s0 = initial_state(c);
  const auto tr = step(s0, {3, StorageCmd::idle}, day, c);  // price 3.0
  for (double d : tr.info.demands) EXPECT_DOUBLE_EQ(d, 40.0);
  EXPECT_DOUBLE_EQ(tr.reward.a, 0.0);
  EXPECT_EQ(tr.next.levels, s0.levels);
  EXPECT_EQ(tr.next.obs, (EnvState{1, s0.obs.soc_level}));
  EXPECT_FALSE(tr.terminal);
}

TEST(Step, ChargeAtCeilingIsClipped) {
  auto c = SystemConfig::defaults();
  for (auto& mg : c.microgrids)
    if (mg.storage) mg.storage->initial_level = mg.storage->capacity_max;
  const auto day = flat_day(c, 40.0, 10.0);
  const auto s0 = initial_state(c);
  const auto tr = step(s0, {0, StorageCmd::charge}, day, c);
  EXPECT_EQ(tr.next.levels, s0.levels);
  for (double ds : tr.info.delta_s) EXPECT_DOUBLE_EQ(ds, 0.0);
  EXPECT_DOUBLE_EQ(tr.reward.a, 0.0);
  EXPECT_DOUBLE_EQ(tr.reward.s, 450.0);
}

TEST(Step, FullRateChargeFromHalf) {
  const auto c = SystemConfig::defaults();
  const auto day = flat_day(c, 40.0, 10.0);
  const auto tr = step(initial_state(c), {2, StorageCmd::charge}, day, c);
  EXPECT_EQ(tr.next.levels, (std::vector<double>{120, 150}));
  EXPECT_DOUBLE_EQ((120.0 + 150.0) / 450.0, 0.6);
  EXPECT_EQ(tr.next.obs.soc_level, 3u);
  EXPECT_DOUBLE_EQ(tr.reward.s, 270.0);
  // per-microgrid balance p_g + p_r = p_d + delta_s
  for (std::size_t n = 0; n < 3; ++n)
    EXPECT_NEAR(tr.info.grid_powers[n] + tr.info.renewables[n], tr.info.demands[n] + tr.info.delta_s[n], 1e-9);
  EXPECT_DOUBLE_EQ(tr.info.delta_s[0], 20.0);
  EXPECT_DOUBLE_EQ(tr.info.delta_s[1], 25.0);
  EXPECT_DOUBLE_EQ(tr.info.delta_s[2], 0.0);
}

TEST(Step, TerminalAfterLastHour) {
  const auto c = SystemConfig::defaults();
  const auto day = flat_day(c, 40.0, 10.0);
  auto s = initial_state(c);
  s.obs.tod = 23;
  const auto tr = step(s, {0, StorageCmd::idle}, day, c);
  EXPECT_TRUE(tr.terminal);
  EXPECT_EQ(tr.next.obs.tod, 0u);
}

TEST(Step, DeterministicAndMonotoneInPrice) {
  const auto c = SystemConfig::defaults();
  const auto day = synth_day(9, c);
  auto s = initial_state(c);
  s.obs.tod = 18;
  const auto a = step(s, {4, StorageCmd::discharge}, day, c);
  const auto b = step(s, {4, StorageCmd::discharge}, day, c);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_EQ(a.next.levels, b.next.levels);
  for (std::size_t p = 1; p < kNumPriceLevels; ++p) {
    const auto lo = step(s, {p - 1, StorageCmd::idle}, day, c);
    const auto hi = step(s, {p, StorageCmd::idle}, day, c);
    for (std::size_t n = 0; n < 3; ++n) EXPECT_LE(hi.info.demands[n], lo.info.demands[n]);
  }
}

TEST(Step, MissingSeriesIsDataError) {
  const auto c = SystemConfig::defaults();
  auto day = flat_day(c, 40.0, 10.0);
  day.microgrids.pop_back();
  EXPECT_THROW(step(initial_state(c), {0, StorageCmd::idle}, day, c), DataError);
}

TEST(Rollout, DegenerateDay) {
  auto c = SystemConfig::defaults();
  const auto day = flat_day(c, 0.0, 0.0);
  const auto ro = rollout(Policy(EnvAction{5, StorageCmd::idle}), day, c);
  EXPECT_EQ(ro.trajectory.size(), 24u);
  EXPECT_DOUBLE_EQ(ro.total.w, 0.0);
  EXPECT_DOUBLE_EQ(ro.total.s, 24 * 225.0);
  EXPECT_DOUBLE_EQ(ro.total.g, -24 * c.economics.c_g);
  EXPECT_DOUBLE_EQ(ro.total.a, 0.0);
}

TEST(Rollout, RandomPoliciesStayFeasible) {
  const auto c = SystemConfig::defaults();
  const auto specs = c.storages();
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto day = synth_day(100 + trial, c);
    const auto ro = rollout(random_policy(rng), day, c);
    ASSERT_EQ(ro.trajectory.size(), 24u);
    EXPECT_DOUBLE_EQ(ro.total.a, 0.0);
    std::vector<double> prev = c.initial_levels();
    for (const auto& rec : ro.trajectory) {
      EXPECT_GE(rec.info.lambda, 1.5);
      EXPECT_LE(rec.info.lambda, 5.0);
      EXPECT_DOUBLE_EQ(rec.info.penalty, 0.0);
      EXPECT_DOUBLE_EQ(constraint_penalty(rec.info.levels, prev, specs), 0.0);
      prev = rec.info.levels;
    }
  }
}

TEST(TimeSeries, LoadWellFormed) {
  const auto c = SystemConfig::defaults();
  const auto day = synth_day(3, c);
  const auto path = write_temp("mgmorl_ts_ok.csv", format_timeseries(day));
  const auto loaded = load_timeseries(path);
  ASSERT_EQ(loaded.microgrids.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(loaded.microgrids[m].name, day.microgrids[m].name);
    EXPECT_EQ(loaded.microgrids[m].baseload, day.microgrids[m].baseload);
    EXPECT_EQ(loaded.microgrids[m].renewable, day.microgrids[m].renewable);
  }
}

TEST(TimeSeries, RejectsShortFile) {
  std::ostringstream s;
  s << "hour,mg1_baseload,mg1_renewable\n";
  for (int h = 0; h < 23; ++h) s << h << ",10,0\n";
  std::istringstream in(s.str());
  try {
    parse_timeseries(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("mg1"), std::string::npos) << e.what();
  }
}

TEST(TimeSeries, RejectsNegativeRenewable) {
  std::ostringstream s;
  s << "hour,mg1_baseload,mg1_renewable\n";
  for (int h = 0; h < 24; ++h) s << h << ",10," << (h == 12 ? "-1" : "0") << "\n";
  std::istringstream in(s.str());
  try {
    parse_timeseries(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 13"), std::string::npos) << msg;
    EXPECT_NE(msg.find("mg1_renewable"), std::string::npos) << msg;
  }
}

TEST(TimeSeries, RejectsBadHeaderAndHours) {
  std::istringstream bad_header("time,mg1_baseload,mg1_renewable\n0,1,1\n");
  EXPECT_THROW(parse_timeseries(bad_header), DataError);
  std::ostringstream s;
  s << "hour,mg1_baseload,mg1_renewable\n";
  for (int h = 0; h < 24; ++h) s << (h == 5 ? 6 : h) << ",10,0\n";
  std::istringstream in(s.str());
  EXPECT_THROW(parse_timeseries(in), DataError);
  EXPECT_THROW(load_timeseries("/nonexistent/mgmorl.csv"), IoError);
}

TEST(SynthDay, DeterministicNonnegativeDarkAtNight) {
  const auto c = SystemConfig::defaults();
  const auto a = synth_day(17, c), b = synth_day(17, c), other = synth_day(18, c);
  ASSERT_EQ(a.microgrids.size(), 3u);
  bool differs = false;
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(a.microgrids[m].baseload, b.microgrids[m].baseload);
    EXPECT_EQ(a.microgrids[m].renewable, b.microgrids[m].renewable);
    differs = differs || a.microgrids[m].baseload != other.microgrids[m].baseload;
    EXPECT_EQ(a.microgrids[m].renewable[0], 0.0);
    for (std::size_t h = 0; h < 24; ++h) {
      EXPECT_GE(a.microgrids[m].baseload[h], 0.0);
      EXPECT_GE(a.microgrids[m].renewable[h], 0.0);
      if (h < 6 || h > 19) {
        EXPECT_EQ(a.microgrids[m].renewable[h], 0.0);
      }
    }
  }
  EXPECT_TRUE(differs);
}
