#include "shardsim/types.hpp"

namespace shardsim {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("invalid hex digit");
}
}  // namespace

Hash32 hash_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw std::invalid_argument("hash hex must be 64 characters");
  Hash32 h{};
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return h;
}

NodeId NodeId::from_index(std::uint64_t index) {
  std::array<std::uint8_t, kSize> b{};
  b[0] = 0x02;
  for (int i = 0; i < 8; ++i) {
    b[kSize - 1 - i] = static_cast<std::uint8_t>(index >> (8 * i));
  }
  return NodeId(b);
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 3; i >= 0; --i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 7; i >= 0; --i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::bytes(std::span<const std::uint8_t> b) {
  out_.append(reinterpret_cast<const char*>(b.data()), b.size());
}

void ByteWriter::prefixed(std::span<const std::uint8_t> b) {
  u32(static_cast<std::uint32_t>(b.size()));
  bytes(b);
}

void ByteWriter::text(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.append(s);
}

}  // namespace shardsim
