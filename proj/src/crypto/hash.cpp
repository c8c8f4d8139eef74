#include "gridtrust/crypto/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace gridtrust::crypto {

struct Sha256::Ctx {
  EVP_MD_CTX* md = nullptr;
  ~Ctx() { EVP_MD_CTX_free(md); }
};

Sha256::Sha256() : ctx_(std::make_unique<Ctx>()) {
  ctx_->md = EVP_MD_CTX_new();
  if (ctx_->md == nullptr || EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
}

Sha256::~Sha256() = default;
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;

Sha256& Sha256::update(std::span<const std::uint8_t> data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update(std::string_view data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update_u8(std::uint8_t v) { return update(std::span<const std::uint8_t>(&v, 1)); }

Sha256& Sha256::update_u32(std::uint32_t v) {
  const std::array<std::uint8_t, 4> b{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                                      static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  return update(b);
}

Sha256& Sha256::update_u64(std::uint64_t v) {
  update_u32(static_cast<std::uint32_t>(v >> 32));
  return update_u32(static_cast<std::uint32_t>(v));
}

Sha256& Sha256::update_field(std::span<const std::uint8_t> data) {
  update_u32(static_cast<std::uint32_t>(data.size()));
  return update(data);
}

Sha256& Sha256::update_field(std::string_view data) {
  update_u32(static_cast<std::uint32_t>(data.size()));
  return update(data);
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx_->md, out.data(), &len);
  return out;
}

Digest Sha256::digest(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }

Digest Sha256::digest(std::string_view data) { return Sha256().update(data).finish(); }

std::array<std::uint8_t, 64> expand_wide(std::string_view label, std::uint32_t counter,
                                         std::span<const std::uint8_t> msg) {
  std::array<std::uint8_t, 64> out{};
  for (std::uint8_t block = 0; block < 2; ++block) {
    const Digest d = Sha256().update_field(label).update_u32(counter).update_u8(block).update(msg).finish();
    std::copy(d.begin(), d.end(), out.begin() + block * 32);
  }
  return out;
}

}  // namespace gridtrust::crypto
