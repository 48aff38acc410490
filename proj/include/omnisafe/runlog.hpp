#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace omnisafe {

inline constexpr int kRunLogVersion = 1;

using Value = std::variant<double, std::int64_t, std::string>;

struct Record {
  double t = 0.0;
  std::string kind;
  std::vector<Value> values;  // ordered as the kind's schema

  bool operator==(const Record&) const = default;
};

// Column names per record kind, excluding the timestamp.
struct KindSchema {
  std::string kind;
  std::vector<std::string> columns;
  bool csv_timestamp = true;  // risk rows omit it to match the risk emitter
};

const std::vector<KindSchema>& runlog_schemas();
const KindSchema& schema_for(const std::string& kind);

class RunLog {
 public:
  RunLog() = default;
  RunLog(std::string scenario, std::uint64_t seed)
      : scenario_(std::move(scenario)), seed_(seed) {}

  // Checks the schema, finite numbers and non-decreasing timestamps.
  void add(double t, const std::string& kind, std::vector<Value> values);

  const std::vector<Record>& records() const { return records_; }
  const std::string& scenario() const { return scenario_; }
  std::uint64_t seed() const { return seed_; }
  std::vector<Record> of_kind(const std::string& kind) const;
  bool empty() const { return records_.empty(); }

  bool operator==(const RunLog&) const = default;

 private:
  std::string scenario_;
  std::uint64_t seed_ = 0;
  std::vector<Record> records_;
};

double as_double(const Value& v);
std::int64_t as_int(const Value& v);
const std::string& as_string(const Value& v);

// First line is a header object with schema name and version, then one
// record per line.
void write_jsonl(std::ostream& os, const RunLog& log);
RunLog read_jsonl(std::istream& is);

// One file per kind; empty kinds still get their header row.
void write_csv(std::ostream& os, const RunLog& log, const std::string& kind);

enum class LogFormat { kCsv, kJsonl };

LogFormat parse_format(const std::string& s);

// Writes runlog.jsonl, or <kind>.csv plus manifest.json, into dir.
std::vector<std::string> emit_outputs(const RunLog& log, LogFormat format,
                                      const std::string& dir);

}  // namespace omnisafe
