#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace specbench {

/// Lowercase hex SHA-256 of a byte span.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);

/// Incremental SHA-256, for hashing several parts without concatenating.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::uint8_t> data);
  void update(std::string_view data);
  /// Finalizes and returns lowercase hex. The object must not be reused.
  std::string hex();

 private:
  void* ctx_;
};

}  // namespace specbench
