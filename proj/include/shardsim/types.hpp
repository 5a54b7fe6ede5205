#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shardsim {

/// 32-byte digest output (block hashes, C_Hash, RIDs).
using Hash32 = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> bytes);
Hash32 hash_from_hex(std::string_view hex);

/// 33-byte public identity key of a node (compressed-point sized).
class NodeId {
 public:
  static constexpr std::size_t kSize = 33;

  NodeId() = default;
  explicit NodeId(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}

  /// Deterministic toy identity: index written big-endian into the tail.
  static NodeId from_index(std::uint64_t index);

  const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }

  auto operator<=>(const NodeId&) const = default;
  bool operator==(const NodeId&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

/// Colour claimed on joining; a point on a linear 24-bit spectrum.
class ColourCode {
 public:
  static constexpr std::uint32_t kLimit = 1u << 24;

  constexpr ColourCode() = default;
  explicit ColourCode(std::uint32_t value) : value_(value) {
    if (value >= kLimit) throw std::out_of_range("colour code must be below 2^24");
  }

  constexpr std::uint32_t value() const { return value_; }
  auto operator<=>(const ColourCode&) const = default;

 private:
  std::uint32_t value_ = 0;
};

using Iteration = std::uint64_t;

/// Appends fixed-width big-endian integers and length-prefixed byte runs.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void bytes(std::span<const std::uint8_t> b);
  /// u32 length prefix then the bytes.
  void prefixed(std::span<const std::uint8_t> b);
  void text(std::string_view s);

  const std::string& data() const { return out_; }
  std::span<const std::uint8_t> view() const {
    return {reinterpret_cast<const std::uint8_t*>(out_.data()), out_.size()};
  }

 private:
  std::string out_;
};

}  // namespace shardsim
