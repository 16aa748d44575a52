#include "ddclab/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "ddclab/version.hpp"

namespace ddclab {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* outcome_name(ddc::DdcVerdict::Outcome o) {
  switch (o) {
    case ddc::DdcVerdict::Outcome::Passed: return "passed";
    case ddc::DdcVerdict::Outcome::Failed: return "failed";
    case ddc::DdcVerdict::Outcome::StageFailure: return "stage-failure";
  }
  return "unknown";
}

}  // namespace

std::string RunReport::to_json() const {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["digest_algorithm"] = kDigestAlgorithm;
  j["command"] = command;
  j["inputs"] = ordered_json::array();
  for (const auto& [path, hash] : inputs) {
    j["inputs"].push_back({{"path", path}, {"sha256", hash}});
  }
  j["outcome"] = outcome;
  if (verdict) {
    ordered_json v;
    v["result"] = outcome_name(verdict->outcome);
    v["passed"] = verdict->passed();
    v["hash_under_test"] = verdict->hash_under_test;
    v["hash_stage2"] = verdict->hash_stage2;
    v["stage1_hash"] = verdict->stage1_hash;
    v["added_defcodes"] = verdict->added_defcodes;
    v["removed_defcodes"] = verdict->removed_defcodes;
    v["changed_defcodes"] = verdict->changed_defcodes;
    v["main_changed"] = verdict->main_changed;
    v["diff"] = verdict->diff;
    if (!verdict->failed_stage.empty()) {
      v["failed_stage"] = verdict->failed_stage;
      v["error"] = verdict->error;
      v["suspect_assumptions"] = verdict->suspect_assumptions;
    }
    j["verdict"] = std::move(v);
  }
  j["stage_hashes"] = ordered_json::array();
  for (const auto& [stage, hash] : stage_hashes) {
    j["stage_hashes"].push_back({{"stage", stage}, {"sha256", hash}});
  }
  j["fuel_limit"] = fuel_limit;
  j["fuel_consumed"] = fuel_consumed;
  j["timestamp"] = timestamp;
  return j.dump(2) + "\n";
}

void RunReport::stamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  timestamp = buf;
}

void RunReport::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report file " + path);
  out << to_json();
}

}  // namespace ddclab
