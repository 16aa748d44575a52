#pragma once

namespace ddclab {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kDigestAlgorithm = "SHA-256";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace ddclab
