#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "shardsim/types.hpp"

namespace shardsim {

/// A named 256-bit digest function. The name travels in configs and block
/// headers so replays pick the same function.
class Digest {
 public:
  /// Accepts any OpenSSL digest name with a 32-byte output
  /// ("sha256", "sha3-256", "blake2s256", ...). Throws std::invalid_argument
  /// for unknown names or other output sizes.
  explicit Digest(std::string_view name = "sha256");

  const std::string& name() const { return name_; }

  Hash32 operator()(std::span<const std::uint8_t> data) const;
  Hash32 operator()(std::string_view data) const;

 private:
  std::string name_;
  const void* md_ = nullptr;  // EVP_MD*, owned by OpenSSL
};

}  // namespace shardsim
