#include "omnisafe/runlog.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include <nlohmann/json.hpp>

#include "omnisafe/linalg.hpp"

namespace omnisafe {

namespace {

constexpr const char* kSchemaName = "omnisafe.runlog";

std::string format_value(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return fmt::format("{}", *d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return fmt::format("{}", *i);
  return std::get<std::string>(v);
}

nlohmann::json to_json(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

Value from_json(const nlohmann::json& j) {
  if (j.is_number_float()) return j.get<double>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw InputError("runlog: unsupported value " + j.dump());
}

}  // namespace

const std::vector<KindSchema>& runlog_schemas() {
  static const std::vector<KindSchema> s = {
      {"state", {"x", "y", "theta", "vx", "vy", "omega", "reaction"}},
      {"dynamics",
       {"qw_dot0", "qw_dot1", "qw_dot2", "qr_dot0", "qr_dot1", "qr_dot2", "qdd0", "qdd1",
        "qdd2", "qdd3", "qdd4", "qdd5", "qdd6", "qdd7", "qdd8"}},
      {"torque", {"cmd0", "cmd1", "cmd2", "sensed0", "sensed1", "sensed2"}},
      {"wrench", {"fx", "fy", "mz", "mean"}},
      {"contact", {"px", "py", "dx", "dy", "magnitude"}},
      {"wall", {"gap", "normal_velocity", "active", "slope", "points"}},
      {"object", {"name", "px", "py", "pz", "vx", "vy", "vz"}},
      {"risk", {"step", "pair", "p_ic", "p_ac", "k_c"}, false},
      {"agent", {"mode", "pair", "p_threshold"}},
      {"plan", {"branch", "link", "waypoints", "violated"}},
      {"arm", {"q", "ee_error"}},
      {"event", {"name", "detail"}},
  };
  return s;
}

const KindSchema& schema_for(const std::string& kind) {
  for (const KindSchema& s : runlog_schemas()) {
    if (s.kind == kind) return s;
  }
  throw InputError("runlog: unknown record kind '" + kind + "'");
}

void RunLog::add(double t, const std::string& kind, std::vector<Value> values) {
  const KindSchema& s = schema_for(kind);
  if (values.size() != s.columns.size()) {
    throw InputError(fmt::format("runlog: '{}' expects {} values, got {}", kind,
                                 s.columns.size(), values.size()));
  }
  if (!std::isfinite(t)) throw NumericalError("runlog: non-finite timestamp");
  if (!records_.empty() && t < records_.back().t) {
    throw InputError(fmt::format("runlog: timestamp {} precedes {}", t, records_.back().t));
  }
  for (const Value& v : values) {
    if (const double* d = std::get_if<double>(&v); d && !std::isfinite(*d)) {
      throw NumericalError(fmt::format("runlog: non-finite value in '{}' at t = {}", kind, t));
    }
    if (const std::string* str = std::get_if<std::string>(&v);
        str && str->find_first_of(",\"\n\r") != std::string::npos) {
      throw InputError("runlog: string values may not contain commas, quotes or newlines");
    }
  }
  records_.push_back({t, kind, std::move(values)});
}

std::vector<Record> RunLog::of_kind(const std::string& kind) const {
  std::vector<Record> out;
  for (const Record& r : records_) {
    if (r.kind == kind) out.push_back(r);
  }
  return out;
}

double as_double(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw InputError("runlog: expected a number");
}

std::int64_t as_int(const Value& v) {
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return *i;
  throw InputError("runlog: expected an integer");
}

const std::string& as_string(const Value& v) {
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  throw InputError("runlog: expected a string");
}

void write_jsonl(std::ostream& os, const RunLog& log) {
  nlohmann::json head = {{"schema", kSchemaName},
                         {"version", kRunLogVersion},
                         {"scenario", log.scenario()},
                         {"seed", log.seed()}};
  os << head.dump() << '\n';
  for (const Record& r : log.records()) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["kind"] = r.kind;
    const KindSchema& s = schema_for(r.kind);
    for (std::size_t c = 0; c < s.columns.size(); ++c) j[s.columns[c]] = to_json(r.values[c]);
    os << j.dump() << '\n';
  }
}

RunLog read_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("runlog: empty input");
  nlohmann::json head;
  try {
    head = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("runlog: bad header: ") + e.what());
  }
  if (head.value("schema", "") != kSchemaName) throw InputError("runlog: not a run log");
  if (head.value("version", -1) != kRunLogVersion) {
    throw InputError("runlog: unsupported schema version");
  }
  RunLog log(head.at("scenario").get<std::string>(), head.at("seed").get<std::uint64_t>());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("runlog: bad record: ") + e.what());
    }
    const std::string kind = j.at("kind").get<std::string>();
    const KindSchema& s = schema_for(kind);
    std::vector<Value> values;
    for (const std::string& c : s.columns) {
      if (!j.contains(c)) throw InputError("runlog: record lacks column '" + c + "'");
      values.push_back(from_json(j.at(c)));
    }
    log.add(j.at("t").get<double>(), kind, std::move(values));
  }
  return log;
}

void write_csv(std::ostream& os, const RunLog& log, const std::string& kind) {
  const KindSchema& s = schema_for(kind);
  std::string header = s.csv_timestamp ? "t" : "";
  for (const std::string& c : s.columns) {
    if (!header.empty()) header += ',';
    header += c;
  }
  os << header << '\n';
  for (const Record& r : log.records()) {
    if (r.kind != kind) continue;
    std::string row = s.csv_timestamp ? fmt::format("{}", r.t) : "";
    for (std::size_t c = 0; c < r.values.size(); ++c) {
      if (c > 0 || s.csv_timestamp) row += ',';
      row += format_value(r.values[c]);
    }
    os << row << '\n';
  }
}

LogFormat parse_format(const std::string& s) {
  if (s == "csv") return LogFormat::kCsv;
  if (s == "jsonl") return LogFormat::kJsonl;
  throw InputError("format must be csv or jsonl");
}

std::vector<std::string> emit_outputs(const RunLog& log, LogFormat format,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    written.push_back(path);
    return f;
  };
  if (format == LogFormat::kJsonl) {
    std::ofstream f = open("runlog.jsonl");
    write_jsonl(f, log);
    return written;
  }
  nlohmann::ordered_json manifest = {{"schema", kSchemaName},
                                     {"version", kRunLogVersion},
                                     {"scenario", log.scenario()},
                                     {"seed", log.seed()}};
  for (const KindSchema& s : runlog_schemas()) {
    std::ofstream f = open(s.kind + ".csv");
    write_csv(f, log, s.kind);
    manifest["files"].push_back(s.kind + ".csv");
  }
  std::ofstream m = open("manifest.json");
  m << manifest.dump(2) << '\n';
  return written;
}

}  // namespace omnisafe
