#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "omnisafe/acceptance.hpp"
#include "omnisafe/prediction.hpp"
#include "omnisafe/simulate.hpp"

namespace omnisafe {
namespace {

Scenario parse(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is);
}

std::string bundled(const std::string& name) {
  return std::string(OMNISAFE_SCENARIO_DIR) + "/" + name + ".scn";
}

std::string jsonl(const RunLog& log) {
  std::ostringstream os;
  write_jsonl(os, log);
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

int code_of(const std::string& text) {
  try {
    run_scenario(parse(text));
  } catch (const std::exception& e) {
    return exit_code_for(e);
  }
  return 0;
}

TEST(Scenario, ExitCodes) {
  EXPECT_EQ(code_of("sim.duration 3\n"), 2);
  EXPECT_EQ(code_of("sim.duration = 1\nsim.duration = 2\n"), 2);
  EXPECT_EQ(code_of("sim.duration = abc\n"), 2);
  EXPECT_EQ(code_of("sim.bogus = 1\n"), 3);
  EXPECT_EQ(code_of("sim.dt = -1\n"), 3);
  EXPECT_EQ(code_of("object.a.position = 0,0\nobject.a.sigma_d = 1\n"), 3);
  EXPECT_EQ(code_of("name = ok\n# comment\n\nsim.duration = 0.01\n"), 0);
  EXPECT_EQ(exit_code_for(NumericalError("x")), 4);
}

TEST(Scenario, DivergenceIsNumericalFailure) {
  EXPECT_EQ(code_of("sim.duration = 1\nsim.dt = 0.01\nplan.kind = line\nplan.velocity = 1,0\n"
                    "control.kp = 1e12\ncontrol.kd = 1e9\n"),
            4);
}

TEST(Scenario, BundledFilesLoad) {
  for (const char* n : {"empty", "motionless-collision", "impact", "wall-following",
                        "ball-intervention", "arm-intervention"}) {
    EXPECT_NO_THROW(load_scenario(bundled(n)).validate()) << n;
  }
  EXPECT_THROW(load_scenario(bundled("missing")), ParseError);
}

TEST(RunScenario, EmptyScriptKeepsInitialState) {
  const SimResult r = run_scenario(load_scenario(bundled("empty")));
  EXPECT_EQ(r.summary.final_state.q(), r.summary.initial_state.q());
  EXPECT_EQ(r.summary.final_state.qdot(), r.summary.initial_state.qdot());
}

TEST(RunScenario, DeterministicBytes) {
  const Scenario s = load_scenario(bundled("impact"));
  EXPECT_EQ(jsonl(run_scenario(s).log), jsonl(run_scenario(s).log));
  Scenario noisy = parse("sim.duration = 0.5\nsensing.torque_noise = 0.01\nsim.seed = 4\n");
  const std::string a = jsonl(run_scenario(noisy).log);
  EXPECT_EQ(a, jsonl(run_scenario(noisy).log));
  noisy.seed = 5;
  EXPECT_NE(a, jsonl(run_scenario(noisy).log));
}

TEST(RunScenario, MotionlessCollisionEscapesHalfMetre) {
  const SimResult r = run_scenario(load_scenario(bundled("motionless-collision")));
  ASSERT_TRUE(r.summary.escape_onset);
  EXPECT_NEAR(r.summary.final_displacement, 0.5, 0.01);
}

TEST(RunScenario, BallInterventionTriggersAtPredictedTick) {
  const SimResult r = run_scenario(load_scenario(bundled("ball-intervention")));
  ASSERT_TRUE(r.summary.trigger_tick);
  ASSERT_TRUE(r.summary.predicted_tick);
  EXPECT_LE(std::abs(*r.summary.trigger_tick - *r.summary.predicted_tick), 1);
  ASSERT_GE(r.summary.modes.size(), 2u);
  EXPECT_EQ(r.summary.modes[1], AgentMode::kIntervention);
}

TEST(RunScenario, TimestampsMonotone) {
  const SimResult r = run_scenario(load_scenario(bundled("ball-intervention")));
  for (std::size_t i = 1; i < r.log.records().size(); ++i) {
    EXPECT_LE(r.log.records()[i - 1].t, r.log.records()[i].t);
  }
  RunLog log("x", 1);
  log.add(1.0, "event", {std::string("a"), std::string("b")});
  EXPECT_THROW(log.add(0.5, "event", {std::string("a"), std::string("b")}), InputError);
  EXPECT_THROW(log.add(2.0, "event", {std::string("a")}), InputError);
  EXPECT_THROW(log.add(2.0, "wrench", {NAN, 0.0, 0.0, 0.0}), NumericalError);
}

Vec3 final_pose(double dt) {
  Scenario s = parse(R"(
sim.duration = 2
plan.kind = circle
plan.center = 0,0
plan.radius = 0.5
plan.speed = 0.4
base.pose = 0.6,0,0.2
event.p.type = push
event.p.t0 = 0.5
event.p.duration = 0.2
event.p.point = 0.1,0.1
event.p.force = -20,5
)");
  s.dt = dt;
  return run_scenario(s).summary.final_state.pose;
}

TEST(RunScenario, FirstOrderStepConvergence) {
  const Vec3 a = final_pose(4e-3), b = final_pose(2e-3), c = final_pose(1e-3);
  const double d1 = (a - b).norm(), d2 = (b - c).norm();
  EXPECT_GT(d2, 0.0);
  EXPECT_LT(d1, 4.0 * d2);
}

TEST(RunScenario, StreamsSplitByLabel) {
  const std::string two = R"(
base.enabled = false
sim.duration = 0.5
object.a.position = 0,0
object.a.velocity = 1,0
object.b.position = 3,0
)";
  const RunLog small = run_scenario(parse(two)).log;
  const RunLog big = run_scenario(parse(two + "object.c.position = 0,5\n")).log;
  auto of = [](const RunLog& log, const std::string& name) {
    std::vector<Record> out;
    for (const Record& r : log.of_kind("object")) {
      if (as_string(r.values[0]) == name) out.push_back(r);
    }
    return out;
  };
  EXPECT_EQ(of(small, "a"), of(big, "a"));
  EXPECT_EQ(of(small, "b"), of(big, "b"));
}

TEST(RunScenario, ReestimationMatchesLiveDetection) {
  Scenario s = load_scenario(bundled("motionless-collision"));
  s.log_every = 1;
  s.duration = 2;
  const SimResult r = run_scenario(s);
  const RunLog re = reestimate(s, r.log);
  ASSERT_TRUE(r.summary.detection);
  std::optional<double> t;
  for (const Record& e : re.of_kind("event")) {
    if (as_string(e.values[0]) == "detect") t = e.t;
  }
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, *r.summary.detection);
  EXPECT_EQ(re.of_kind("wrench"), r.log.of_kind("wrench"));
}

TEST(EmitOutputs, EmptyLogHeaderOnly) {
  const auto dir = std::filesystem::temp_directory_path() / "omnisafe_empty_log";
  std::filesystem::remove_all(dir);
  const RunLog log("empty", 1);
  for (const std::string& f : emit_outputs(log, LogFormat::kCsv, dir.string())) {
    if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
    const std::string body = slurp(f);
    EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 1) << f;
  }
  const auto files = emit_outputs(log, LogFormat::kJsonl, dir.string());
  ASSERT_EQ(files.size(), 1u);
  const std::string body = slurp(files[0]);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 1);
  std::filesystem::remove_all(dir);
}

TEST(EmitOutputs, JsonlRoundTrip) {
  const RunLog log = run_scenario(load_scenario(bundled("ball-intervention"))).log;
  std::istringstream is(jsonl(log));
  EXPECT_EQ(read_jsonl(is), log);
  std::istringstream bad("{\"schema\":\"omnisafe.runlog\",\"version\":99}\n");
  EXPECT_THROW(read_jsonl(bad), InputError);
}

TEST(EmitOutputs, RiskCsvMatchesPredictionEmitter) {
  const Scenario s = load_scenario(bundled("ball-intervention"));
  const std::vector<PairRisk> risks = predict_initial(s);
  std::ostringstream direct;
  write_risk_csv(direct, risks);
  RunLog log(s.name, s.seed);
  log_risks(log, 0.0, risks);
  std::ostringstream via_log;
  write_csv(via_log, log, "risk");
  EXPECT_EQ(direct.str(), via_log.str());
  EXPECT_GT(risks[0].p_ac.size(), 10u);
}

TEST(Verify, InjectedFaultFailsOnlyRollerFriction) {
  VerifyOptions opt;
  opt.faults = {"roller-friction"};
  const VerifyReport r = verify_suite(opt);
  for (const CriterionResult& c : r.results) {
    if (c.skipped) continue;
    EXPECT_EQ(c.pass, c.id != "roller-friction") << c.id << ": " << c.detail;
  }
  EXPECT_FALSE(r.all_pass());
  EXPECT_THROW(verify_suite({Tier::kFast, {"nonsense"}}), InputError);
}

}  // namespace
}  // namespace omnisafe
