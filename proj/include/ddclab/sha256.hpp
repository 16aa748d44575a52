#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ddclab {

// Plain FIPS 180-4 SHA-256. Self-contained so artifact digests do not
// depend on an external crypto library.
class Sha256 {
 public:
  Sha256();

  void update(const void* data, std::size_t len);
  void update(std::string_view data) { update(data.data(), data.size()); }

  // Finalizes and returns the 32-byte digest. The object must not be
  // updated afterwards.
  std::array<std::uint8_t, 32> digest();

  static std::string hex_digest(std::string_view data);

 private:
  void process_block(const std::uint8_t* block);

  std::array<std::uint32_t, 8> state_;
  std::array<std::uint8_t, 64> buffer_;
  std::uint64_t total_len_ = 0;
  std::size_t buffer_len_ = 0;
};

}  // namespace ddclab
