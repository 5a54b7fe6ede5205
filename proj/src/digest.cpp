#include "shardsim/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace shardsim {

Digest::Digest(std::string_view name) : name_(name) {
  const EVP_MD* md = EVP_get_digestbyname(name_.c_str());
  if (md == nullptr) throw std::invalid_argument("unknown digest: " + name_);
  if (EVP_MD_get_size(md) != 32) {
    throw std::invalid_argument("digest must produce 32 bytes: " + name_);
  }
  md_ = md;
}

Hash32 Digest::operator()(std::span<const std::uint8_t> data) const {
  Hash32 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len,
                 static_cast<const EVP_MD*>(md_), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("digest computation failed");
  }
  return out;
}

Hash32 Digest::operator()(std::string_view data) const {
  return (*this)(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

}  // namespace shardsim
