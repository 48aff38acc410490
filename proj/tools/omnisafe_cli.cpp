#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "omnisafe/acceptance.hpp"
#include "omnisafe/prediction.hpp"
#include "omnisafe/simulate.hpp"

namespace {

using namespace omnisafe;

// OMNISAFE_LOG: quiet, error, info (default) or debug.
int log_level() {
  const char* env = std::getenv("OMNISAFE_LOG");
  const std::string v = env ? env : "info";
  if (v == "quiet") return 0;
  if (v == "error") return 1;
  if (v == "debug") return 3;
  return 2;
}

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= 2) std::cerr << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

template <typename... Args>
void debug(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= 3) std::cerr << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c, bool needs_scenario = true) {
  auto* opt = app->add_option("--scenario", c.scenario, "scenario file");
  if (needs_scenario) opt->required();
  app->add_option("--seed", c.seed, "override sim.seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--format", c.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
}

Scenario load(const Common& c) {
  Scenario s = load_scenario(c.scenario);
  if (c.seed) s.seed = *c.seed;
  s.validate();
  return s;
}

void report_written(const std::vector<std::string>& files) {
  for (const std::string& f : files) debug("wrote {}", f);
  info("{} file(s) written", files.size());
}

int cmd_simulate(const Common& c) {
  const Scenario s = load(c);
  const SimResult r = run_scenario(s);
  const SimSummary& m = r.summary;
  info("{}: {} records, final pose ({}, {}, {})", s.name, r.log.records().size(),
       m.final_state.pose(0), m.final_state.pose(1), m.final_state.pose(2));
  if (m.detection) info("detection at t = {}", *m.detection);
  if (m.escape_onset) info("escape displacement {} m", m.final_displacement);
  if (m.trigger_tick) info("intervention at tick {}", *m.trigger_tick);
  if (m.predicted_tick) info("brute-force predicted tick {}", *m.predicted_tick);
  if (m.wall_fit && !m.wall_fit->vertical) info("wall slope estimate {}", m.wall_fit->slope);
  report_written(emit_outputs(r.log, parse_format(c.format), c.out));
  return 0;
}

int cmd_estimate(const Common& c, const std::string& log_path) {
  const Scenario s = load(c);
  std::ifstream f(log_path, std::ios::binary);
  if (!f) throw InputError("cannot open log '" + log_path + "'");
  const RunLog in = read_jsonl(f);
  const RunLog out = reestimate(s, in);
  info("{} wrench samples, {} detection(s)", out.of_kind("wrench").size(),
       out.of_kind("event").size());
  report_written(emit_outputs(out, parse_format(c.format), c.out));
  return 0;
}

int cmd_predict(const Common& c) {
  const Scenario s = load(c);
  const std::vector<PairRisk> risks = predict_initial(s);
  std::filesystem::create_directories(c.out);
  if (c.format == "csv") {
    const std::string path = (std::filesystem::path(c.out) / "risk.csv").string();
    std::ofstream f(path, std::ios::binary);
    write_risk_csv(f, risks);
    debug("wrote {}", path);
  } else {
    RunLog log(s.name, s.seed);
    log_risks(log, 0.0, risks);
    report_written(emit_outputs(log, LogFormat::kJsonl, c.out));
  }
  for (const PairRisk& r : risks) {
    info("pair {}-{}: p_ac(threshold) = {}{}", r.i, r.j,
         r.p_ac[s.prediction.config.threshold_step()],
         r.k_c ? fmt::format(", crosses eta at step {}", *r.k_c) : std::string());
  }
  return 0;
}

int cmd_learn(const Common& c) {
  const Scenario s = load(c);
  Scenario learn = s;
  learn.planner.roadmap.clear();
  learn.planner.constrained_roadmap.clear();
  const PlannerRoadmaps rm = planner_roadmaps(learn);
  std::filesystem::create_directories(c.out);
  for (const auto& [name, r] :
       {std::pair{"unconstrained.roadmap", &rm.unconstrained},
        std::pair{"constrained.roadmap", &rm.constrained}}) {
    const std::string path = (std::filesystem::path(c.out) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    save_roadmap(f, *r);
    info("{}: {} nodes", path, r->nodes().size());
  }
  return 0;
}

int cmd_plan(const Common& c) {
  const Scenario s = load(c);
  if (!s.planner.enabled) throw InputError("plan: planner.enabled must be true");
  const std::vector<PairRisk> risks = predict_initial(s);
  std::vector<std::pair<int, int>> pairs;
  std::vector<ObjectState> states;
  for (const PairRisk& r : risks) pairs.emplace_back(r.i, r.j);
  for (const ObjectSpec& o : s.objects) states.push_back({o.position, o.velocity});
  const auto [i, j] = select_imminent_pair(pairs, states);
  const int mover = s.objects[i].velocity.norm() >= s.objects[j].velocity.norm() ? i : j;
  const int other = mover == i ? j : i;
  const ObjectSpec& m = s.objects[mover];
  const std::optional<double> tca = closest_approach(m.position, m.velocity,
                                                     s.objects[other].position,
                                                     s.objects[other].velocity);
  const ObjectSweep sweep{m.position, m.velocity, m.radius,
                          tca ? std::max(*tca, 1e-6) : s.prediction.config.t_threshold};
  const PlannerRoadmaps rm = planner_roadmaps(s);
  PlannerOptions popt;
  popt.connect_candidates = s.planner.connect_candidates;
  popt.goal_tolerance = s.planner.goal_tolerance;
  const KinematicChain& chain = rm.unconstrained.chain();
  const Decision d = decide_and_plan(rm.constrained, rm.unconstrained, chain.home,
                                     AgentMode::kIdle, nullptr, sweep, popt);
  RunLog log(s.name, s.seed);
  log.add(0.0, "plan",
          {to_string(d.branch), std::int64_t{d.link},
           std::int64_t(d.plan ? d.plan->path.size() : 0),
           std::int64_t{d.constraint_violated ? 1 : 0}});
  if (d.plan) {
    const Vec3 goal = end_effector(chain, chain.home);
    for (const VecX& q : d.plan->path) {
      std::string joined;
      for (Eigen::Index k = 0; k < q.size(); ++k) joined += fmt::format("{}{}", k ? " " : "", q(k));
      log.add(0.0, "arm", {joined, (end_effector(chain, q) - goal).norm()});
    }
  }
  info("branch {}, link {}, {} waypoint(s)", to_string(d.branch), d.link,
       d.plan ? d.plan->path.size() : 0);
  report_written(emit_outputs(log, parse_format(c.format), c.out));
  return 0;
}

int cmd_verify(const std::string& tier, const std::vector<std::string>& faults,
               const std::string& report) {
  VerifyOptions opt;
  opt.tier = parse_tier(tier);
  for (const std::string& f : faults) opt.faults.insert(f);
  const VerifyReport r = verify_suite(opt);
  for (const CriterionResult& c : r.results) std::cout << report_line(c) << '\n';
  if (!report.empty()) {
    std::ofstream f(report, std::ios::binary);
    if (!f) throw InputError("cannot write '" + report + "'");
    write_report_json(f, r);
  }
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Omnidirectional base safety simulator"};
  app.require_subcommand(1);

  Common sim, est, pred, learn, plan;
  std::string log_path;
  std::string tier = "fast";
  std::vector<std::string> faults;
  std::string report;

  auto* s_sim = app.add_subcommand("simulate", "run a scenario and write its log");
  add_common(s_sim, sim);
  auto* s_est = app.add_subcommand("estimate", "re-run wrench estimation over a jsonl log");
  add_common(s_est, est);
  s_est->add_option("--log", log_path, "runlog.jsonl from simulate")->required();
  auto* s_pred = app.add_subcommand("predict", "collision risk from the initial object states");
  add_common(s_pred, pred);
  auto* s_learn = app.add_subcommand("learn", "learn and save both roadmaps");
  add_common(s_learn, learn);
  auto* s_plan = app.add_subcommand("plan", "one intervention decision from the home pose");
  add_common(s_plan, plan);
  auto* s_ver = app.add_subcommand("verify", "run the acceptance criteria");
  s_ver->add_option("--tier", tier, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  s_ver->add_option("--inject-fault", faults, "perturb a model constant")
      ->check(CLI::IsMember(known_faults()));
  s_ver->add_option("--report", report, "write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*s_sim) return cmd_simulate(sim);
    if (*s_est) return cmd_estimate(est, log_path);
    if (*s_pred) return cmd_predict(pred);
    if (*s_learn) return cmd_learn(learn);
    if (*s_plan) return cmd_plan(plan);
    if (*s_ver) return cmd_verify(tier, faults, report);
  } catch (const std::exception& e) {
    if (log_level() >= 1) std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
