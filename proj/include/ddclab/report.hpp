#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddclab/ddc.hpp"

namespace ddclab {

// Machine-consumable record of one CLI run. Everything except the
// timestamp is deterministic for fixed inputs.
struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::string outcome;                                      // pass | fail | stage-error
  std::optional<ddc::DdcVerdict> verdict;
  std::vector<std::pair<std::string, std::string>> stage_hashes;  // stage, sha256
  std::uint64_t fuel_limit = 0;
  std::uint64_t fuel_consumed = 0;
  std::string timestamp;  // ISO-8601 UTC, empty until stamped

  std::string to_json() const;  // stable field order, 2-space indent
  void stamp_now();
  void write(const std::string& path) const;
};

}  // namespace ddclab
