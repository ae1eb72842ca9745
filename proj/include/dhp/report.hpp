#pragma once

// Check entries produced by the validation suites and their serialization.

#include <string>
#include <vector>

#include "json.hpp"

namespace dhp {

enum class CheckStatus { Pass, Fail, Skip };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "skip";
}

struct CheckResult {
  std::string name;
  std::string anchor;
  CheckStatus status = CheckStatus::Pass;
  std::string counterexample;  // set for failures
  std::string detail;          // optional free text, e.g. counts

  bool passed() const { return status != CheckStatus::Fail; }
};

inline CheckResult make_check(std::string name, std::string anchor, bool ok, std::string counterexample = {},
                              std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  if (!ok) r.counterexample = counterexample.empty() ? "(no witness recorded)" : std::move(counterexample);
  r.detail = std::move(detail);
  return r;
}

inline bool all_passed(const std::vector<CheckResult>& v) {
  for (const auto& c : v)
    if (!c.passed()) return false;
  return true;
}

/// Accumulates one named check over many instances, keeping the first failure.
class CheckTally {
 public:
  CheckTally(std::string name, std::string anchor) : name_(std::move(name)), anchor_(std::move(anchor)) {}

  void record(bool ok, const std::string& witness = {}) {
    ++total_;
    if (!ok && !failed_) {
      failed_ = true;
      witness_ = witness;
    }
    if (!ok) ++failures_;
  }
  int total() const { return total_; }
  int failures() const { return failures_; }

  CheckResult result(std::string detail = {}) const {
    if (detail.empty()) detail = std::to_string(total_ - failures_) + "/" + std::to_string(total_);
    return make_check(name_, anchor_, !failed_, witness_, detail);
  }

 private:
  std::string name_, anchor_;
  int total_ = 0, failures_ = 0;
  bool failed_ = false;
  std::string witness_;
};

struct CheckReport {
  std::vector<std::string> command;
  std::vector<CheckResult> checks;
  double wall_seconds = 0;

  int failures() const {
    int n = 0;
    for (const auto& c : checks) n += c.passed() ? 0 : 1;
    return n;
  }
};

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["status"] = std::string(to_string(c.status));
  if (!c.detail.empty()) j["detail"] = c.detail;
  if (c.status == CheckStatus::Fail) j["counterexample"] = c.counterexample;
  return j;
}

/// {"checks":[...],"failures":N,"command":[...],"wall_seconds":t}
inline std::string serialize_json(const CheckReport& r, bool include_time = true) {
  nlohmann::ordered_json j;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["failures"] = r.failures();
  j["command"] = r.command;
  if (include_time) j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

inline std::string serialize_text(const CheckReport& r) {
  std::string out;
  for (const auto& c : r.checks) {
    out += std::string(to_string(c.status)) + "  " + c.name + "  [" + c.anchor + "]";
    if (!c.detail.empty()) out += "  " + c.detail;
    if (c.status == CheckStatus::Fail) out += "  counterexample: " + c.counterexample;
    out += "\n";
  }
  out += "failures: " + std::to_string(r.failures()) + "\n";
  return out;
}

}  // namespace dhp
