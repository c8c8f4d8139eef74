#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

namespace gridtrust::crypto {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256, the single hash used across the project.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  Sha256& update(std::span<const std::uint8_t> data);
  Sha256& update(std::string_view data);
  Sha256& update_u8(std::uint8_t v);
  Sha256& update_u32(std::uint32_t v);
  Sha256& update_u64(std::uint64_t v);
  /// Length-prefixed (u32) field, so concatenations stay unambiguous.
  Sha256& update_field(std::span<const std::uint8_t> data);
  Sha256& update_field(std::string_view data);

  Digest finish();

  static Digest digest(std::span<const std::uint8_t> data);
  static Digest digest(std::string_view data);

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

/// Domain-separated 64-byte expansion: SHA256(label, counter, 0, msg) || SHA256(label, counter, 1, msg).
std::array<std::uint8_t, 64> expand_wide(std::string_view label, std::uint32_t counter,
                                         std::span<const std::uint8_t> msg);

}  // namespace gridtrust::crypto
