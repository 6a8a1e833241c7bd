#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mgmorl/config.hpp"
#include "mgmorl/export.hpp"

using namespace mgmorl;
using nlohmann::json;

namespace {

std::string failing_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(Config, DefaultsMatchReferenceScenario) {
  const auto c = parse_config(json::object());
  ASSERT_EQ(c.system.microgrids.size(), 3u);
  const auto st = c.system.storages();
  ASSERT_EQ(st.size(), 2u);
  EXPECT_DOUBLE_EQ(st[0].capacity_max, 200.0);
  EXPECT_DOUBLE_EQ(st[1].capacity_max, 250.0);
  EXPECT_DOUBLE_EQ(st[0].ramp_max, 20.0);
  EXPECT_DOUBLE_EQ(st[1].ramp_max, 25.0);
  EXPECT_DOUBLE_EQ(st[0].capacity_min, 60.0);
  EXPECT_DOUBLE_EQ(st[1].initial_level, 125.0);
  EXPECT_EQ(c.learner.episodes, 5000u);
  EXPECT_DOUBLE_EQ(c.learner.gamma, 0.9);
  EXPECT_EQ(c.grid, 5);
  EXPECT_EQ(c.kind, ScalarizationKind::linear);
  EXPECT_FALSE(c.scalarization().normalize);
}

TEST(Config, ResolvedDocumentRoundTrips) {
  auto doc = json::parse(R"({
    "economics": {"alpha": 0.07, "c_g": 3},
    "microgrids": [{"id": 4, "series": "north", "omega": 6.5,
                    "storage": {"capacity_max": 100, "ramp_max": 15}},
                   {"id": 9, "omega": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24]}],
    "learner": {"episodes": 12, "seed": 5},
    "scalarization": {"kind": "chebyshev", "weights": [0.1, 0.2, 0.3, 0.4], "normalize": false},
    "sweep": {"grid": 2},
    "data": {"path": "day.csv"},
    "output": {"dir": "results"}
  })");
  const auto c = parse_config(doc);
  EXPECT_EQ(c.system.microgrids[0].series, "north");
  EXPECT_EQ(c.system.microgrids[1].series, "mg9");
  EXPECT_DOUBLE_EQ(c.system.microgrids[0].storage->capacity_min, 30.0);
  EXPECT_DOUBLE_EQ(c.system.microgrids[0].storage->ramp_max, 15.0);
  EXPECT_DOUBLE_EQ(c.system.microgrids[1].omega[23], 24.0);
  EXPECT_FALSE(c.system.microgrids[1].storage);
  EXPECT_EQ(c.kind, ScalarizationKind::chebyshev);
  EXPECT_FALSE(c.scalarization().normalize);
  EXPECT_EQ(*c.data_path, "day.csv");

  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, ValidationNamesTheField) {
  auto with = [](const char* text) { return json::parse(text); };
  EXPECT_EQ(failing_field(with(R"({"scalarization": {"weights": [0.5, 0.5, 0.5, 0]}})")), "scalarization.weights");
  EXPECT_EQ(failing_field(with(R"({"scalarization": {"weights": [1.5, -0.5, 0, 0]}})")), "scalarization.weights[1]");
  EXPECT_EQ(failing_field(with(R"({"scalarization": {"kind": "cubic"}})")), "scalarization.kind");
  EXPECT_EQ(failing_field(with(R"({"economics": {"a_g": 0}})")), "economics.a_g");
  EXPECT_EQ(failing_field(with(R"({"economics": {"alpha": -1}})")), "economics.alpha");
  EXPECT_EQ(failing_field(with(R"({"economics": {"b_g": -1}})")), "economics.b_g");
  EXPECT_EQ(failing_field(with(R"({"economics": {"lambda_ref": 0}})")), "economics.lambda_ref");
  EXPECT_EQ(failing_field(with(R"({"economics": {"elasticity_slope": -0.1}})")), "economics.elasticity_slope");
  EXPECT_EQ(failing_field(with(R"({"economics": {"gamma": 1}})")), "economics.gamma");
  EXPECT_EQ(failing_field(with(R"({"learner": {"gamma": 1.0}})")), "learner.gamma");
  EXPECT_EQ(failing_field(with(R"({"learner": {"alpha": 0}})")), "learner.alpha");
  EXPECT_EQ(failing_field(with(R"({"learner": {"epsilon_end": 0.5, "epsilon_start": 0.1}})")), "learner.epsilon_end");
  EXPECT_EQ(failing_field(with(R"({"learner": {"episodes": -3}})")), "learner.episodes");
  EXPECT_EQ(failing_field(with(R"({"sweep": {"grid": 0}})")), "sweep.grid");
  EXPECT_EQ(failing_field(with(R"({"microgrids": [{"omega": 0}]})")), "microgrids[0].omega[0]");
  EXPECT_EQ(failing_field(with(R"({"microgrids": [{"id": 1}, {"id": 1}]})")), "microgrids[1].id");
  EXPECT_EQ(failing_field(with(R"({"microgrids": [{"storage": {"capacity_max": 100, "ramp_max": 150}}]})")),
            "microgrids[0].storage.ramp_max");
  EXPECT_EQ(failing_field(with(R"({"microgrids": [{"storage": {"capacity_max": 100, "capacity_min": 100}}]})")),
            "microgrids[0].storage.capacity_max");
  EXPECT_EQ(failing_field(with(R"({"microgrids": [{"storage": {"capacity_max": 100, "initial_level": 10}}]})")),
            "microgrids[0].storage.initial_level");
  EXPECT_EQ(failing_field(with(R"({"microgrids": [{"storage": {"ramp_max": 10}}]})")),
            "microgrids[0].storage.capacity_max");
  EXPECT_EQ(failing_field(with(R"({"microgrids": []})")), "microgrids");
}

TEST(Config, LoadReportsIoAndParseErrors) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
  const auto path = std::filesystem::temp_directory_path() / "mgmorl_bad_config.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(Export, ConvergenceRoundTrip) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1000.0);
  std::vector<EpisodeLog> log;
  for (std::size_t i = 0; i < 50; ++i) log.push_back({i, g(rng), {g(rng), g(rng), g(rng), std::abs(g(rng))}});
  std::istringstream in(format_convergence(log));
  const auto back = parse_convergence(in);
  ASSERT_EQ(back.size(), log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(back[i].episode, i);
    // 6 significant digits
    EXPECT_NEAR(back[i].scalarized_return, log[i].scalarized_return, 1e-5 * std::abs(log[i].scalarized_return));
    EXPECT_NEAR(back[i].total.g, log[i].total.g, 1e-5 * std::abs(log[i].total.g));
  }
  std::istringstream again(format_convergence(back));
  EXPECT_EQ(format_convergence(parse_convergence(again)), format_convergence(back));
}

TEST(Export, PolicyRoundTrip) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
  Policy p;
  for (std::size_t s = 0; s < kNumStates; ++s) p[s] = EnvAction::from_index(pick(rng));
  std::istringstream in(format_policy(p));
  EXPECT_EQ(parse_policy(in), p);
}

TEST(Export, TrajectoryAndArchiveParse) {
  const auto c = SystemConfig::defaults();
  const auto day = synth_day(1, c);
  const auto ro = rollout(Policy(EnvAction{3, StorageCmd::charge}), day, c);
  std::istringstream traj(format_trajectory(ro, c));
  const auto t = parse_trajectory(traj);
  EXPECT_EQ(t.rows.size(), 24u);
  EXPECT_EQ(t.rows[0][t.column("price")], "3");
  EXPECT_EQ(t.rows[23][t.column("mg2_level")], "250");
  EXPECT_EQ(t.rows[0][t.column("soc_fraction")], "0.6");

  ParetoArchive archive;
  archive.entries.push_back({{1, 0, 0, 0}, ScalarizationKind::linear, 1, {10, 0, 0, 0}, {}, {}});
  archive.entries.push_back({{0, 1, 0, 0}, ScalarizationKind::linear, 2, {0, 10, 0, 0}, {}, {}});
  archive.entries.push_back({{0.6, 0.2, 0.2, 0}, ScalarizationKind::linear, 3, {6, 6, 0, 0}, {}, {}});
  std::istringstream arch(format_archive(archive));
  const auto rows = parse_archive(arch);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].is_fair_point);
  EXPECT_TRUE(rows[2].is_fair_point);
  EXPECT_EQ(rows[2].weights, (ObjectiveArray{0.6, 0.2, 0.2, 0}));
  EXPECT_EQ(rows[1].ret, (ObjectiveVector{0, 10, 0, 0}));
}

TEST(Export, MalformedInputsAreDataErrors) {
  std::istringstream short_policy("state,tod,soc_level,action,price_level,price,storage_cmd\n0,0,0,0,0,1.5,charge\n");
  EXPECT_THROW(parse_policy(short_policy), DataError);
  std::istringstream bad_flag("weight_w,weight_s,weight_g,weight_a,Fw,Fs,Fg,Fa,is_fair_point\n1,0,0,0,1,1,1,0,maybe\n");
  EXPECT_THROW(parse_archive(bad_flag), DataError);
  std::istringstream ragged("episode,scalarized_return,Fw,Fs,Fg,Fa\n0,1,2\n");
  EXPECT_THROW(parse_convergence(ragged), DataError);
}
