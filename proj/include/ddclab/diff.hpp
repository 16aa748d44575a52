#pragma once

#include <string>
#include <vector>

namespace ddclab {

// Unified diff (@@ hunks, -/+/' ' lines) of two line sequences. Empty
// result means the sequences are equal.
std::vector<std::string> unified_diff(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      int context = 3);

std::vector<std::string> split_lines(const std::string& text);

}  // namespace ddclab
