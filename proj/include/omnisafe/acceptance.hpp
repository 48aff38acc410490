#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace omnisafe {

enum class Tier { kFast, kFull };

Tier parse_tier(const std::string& s);
std::string to_string(Tier t);

struct CriterionResult {
  std::string id;  // "1".."13", "roller-friction"
  std::string name;
  bool pass = false;
  bool skipped = false;  // not part of this tier
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // runtime limit, s; exceeding it fails the criterion
};

struct VerifyOptions {
  Tier tier = Tier::kFast;
  // Deliberate model perturbations. "roller-friction" scales the roller
  // friction constant of the estimator-side model by 10%.
  std::set<std::string> faults;
};

struct VerifyReport {
  Tier tier = Tier::kFast;
  std::vector<CriterionResult> results;
  bool all_pass() const;
};

const std::vector<std::string>& known_faults();

// Runs every criterion in a fixed order. Independent of the working
// directory; scenarios are built in code.
VerifyReport verify_suite(const VerifyOptions& opt = {});

std::string report_line(const CriterionResult& r);
void write_report_json(std::ostream& os, const VerifyReport& r);

}  // namespace omnisafe
