#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "omnisafe/acceptance.hpp"
#include "omnisafe/prediction.hpp"
#include "omnisafe/reaction.hpp"
#include "omnisafe/simulate.hpp"

namespace py = pybind11;
using namespace omnisafe;

namespace {

py::object value_to_py(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return py::float_(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return py::int_(*i);
  return py::str(std::get<std::string>(v));
}

py::list records(const RunLog& log, const std::string& kind) {
  const KindSchema& s = schema_for(kind);
  py::list out;
  for (const Record& r : log.of_kind(kind)) {
    py::dict d;
    d["t"] = r.t;
    for (std::size_t c = 0; c < s.columns.size(); ++c) d[s.columns[c].c_str()] = value_to_py(r.values[c]);
    out.append(d);
  }
  return out;
}

py::dict summary_dict(const SimSummary& m) {
  py::dict d;
  d["initial_pose"] = m.initial_state.pose;
  d["final_pose"] = m.final_state.pose;
  d["final_velocity"] = m.final_state.pose_dot;
  d["first_impact"] = m.first_impact;
  d["detection"] = m.detection;
  d["escape_onset"] = m.escape_onset;
  d["final_displacement"] = m.final_displacement;
  d["wall_slope"] = m.wall_fit && !m.wall_fit->vertical ? py::cast(m.wall_fit->slope) : py::none();
  d["wall_contact_steps"] = m.wall_contact_steps;
  d["max_wall_normal_velocity"] = m.max_wall_normal_velocity;
  d["max_rolling_residual"] = m.max_rolling_residual;
  d["trigger_tick"] = m.trigger_tick;
  d["predicted_tick"] = m.predicted_tick;
  py::list modes;
  for (AgentMode a : m.modes) modes.append(to_string(a));
  d["modes"] = modes;
  py::list branches;
  for (DecisionBranch b : m.branches) branches.append(to_string(b));
  d["branches"] = branches;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Omnidirectional base safety simulator";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("duration", &Scenario::duration)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("log_every", &Scenario::log_every)
      .def("steps", &Scenario::steps)
      .def("validate", &Scenario::validate);

  m.def(
      "parse_scenario",
      [](const std::string& text) {
        std::istringstream is(text);
        return parse_scenario(is, "<python>");
      },
      py::arg("text"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  py::class_<SimResult>(m, "SimResult")
      .def_property_readonly("summary", [](const SimResult& r) { return summary_dict(r.summary); })
      .def("records", [](const SimResult& r, const std::string& kind) { return records(r.log, kind); },
           py::arg("kind"))
      .def("jsonl", [](const SimResult& r) {
        std::ostringstream os;
        write_jsonl(os, r.log);
        return os.str();
      })
      .def("csv", [](const SimResult& r, const std::string& kind) {
        std::ostringstream os;
        write_csv(os, r.log, kind);
        return os.str();
      }, py::arg("kind"))
      .def("emit", [](const SimResult& r, const std::string& format, const std::string& dir) {
        return emit_outputs(r.log, parse_format(format), dir);
      }, py::arg("format"), py::arg("dir"));

  m.def("run_scenario", &run_scenario, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());

  m.def("risk_csv", [](const Scenario& s) {
    std::ostringstream os;
    write_risk_csv(os, predict_initial(s));
    return os.str();
  });

  m.def("instantaneous_cp", &instantaneous_cp, py::arg("mu_i"), py::arg("sigma_i"),
        py::arg("mu_j"), py::arg("sigma_j"), py::arg("omega"));
  m.def("closed_form_1d", &closed_form_1d, py::arg("dmu"), py::arg("var"), py::arg("omega"));
  m.def(
      "escape_trajectory",
      [](double mass, double damping, const Vec2& force, const Vec3& x0, double t) {
        AdmittanceParams a;
        a.mass = mass;
        a.damping = damping;
        return escape_trajectory(a, force, x0, t);
      },
      py::arg("mass"), py::arg("damping"), py::arg("force"), py::arg("x0"), py::arg("t"));

  m.def(
      "verify",
      [](const std::string& tier, const std::vector<std::string>& faults) {
        VerifyOptions opt;
        opt.tier = parse_tier(tier);
        opt.faults.insert(faults.begin(), faults.end());
        VerifyReport r;
        {
          py::gil_scoped_release release;
          r = verify_suite(opt);
        }
        py::list out;
        for (const CriterionResult& c : r.results) {
          py::dict d;
          d["id"] = c.id;
          d["name"] = c.name;
          d["status"] = c.skipped ? "skip" : c.pass ? "pass" : "fail";
          d["seconds"] = c.seconds;
          d["detail"] = c.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("tier") = "fast", py::arg("faults") = std::vector<std::string>{});
}
