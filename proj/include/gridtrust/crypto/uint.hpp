#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include <x86intrin.h>

namespace gridtrust::crypto {

using u128 = unsigned __int128;

/// Fixed-width unsigned integer, little-endian 64-bit limbs.
template <std::size_t N>
struct UInt {
  static constexpr std::size_t kLimbs = N;
  static constexpr std::size_t kBytes = N * 8;

  std::array<std::uint64_t, N> limb{};

  constexpr UInt() = default;
  constexpr explicit UInt(std::uint64_t v) { limb[0] = v; }

  static constexpr UInt from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.size() > N * 16) throw std::invalid_argument("hex literal too wide");
    UInt r;
    std::size_t bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, bit += 4) {
      const char c = *it;
      std::uint64_t nib = 0;
      if (c >= '0' && c <= '9') nib = static_cast<std::uint64_t>(c - '0');
      else if (c >= 'a' && c <= 'f') nib = static_cast<std::uint64_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') nib = static_cast<std::uint64_t>(c - 'A' + 10);
      else throw std::invalid_argument("bad hex digit");
      r.limb[bit / 64] |= nib << (bit % 64);
    }
    return r;
  }

  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t i = N; i-- > 0;) {
      for (int s = 60; s >= 0; s -= 4) out.push_back(kDigits[(limb[i] >> s) & 0xf]);
    }
    const auto first = out.find_first_not_of('0');
    return first == std::string::npos ? "0" : out.substr(first);
  }

  /// Big-endian bytes; input may be shorter than kBytes, must not be wider.
  static UInt from_be_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() > kBytes) throw std::invalid_argument("byte string too wide");
    UInt r;
    std::size_t shift = 0;
    for (auto it = bytes.rbegin(); it != bytes.rend(); ++it, shift += 8) {
      r.limb[shift / 64] |= static_cast<std::uint64_t>(*it) << (shift % 64);
    }
    return r;
  }

  /// Writes the low out.size() bytes big-endian; higher bytes must be zero.
  void to_be_bytes(std::span<std::uint8_t> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::size_t byte = out.size() - 1 - i;
      out[byte] = i < kBytes ? static_cast<std::uint8_t>(limb[i / 8] >> ((i % 8) * 8)) : 0;
    }
  }

  constexpr bool is_zero() const {
    for (auto l : limb)
      if (l != 0) return false;
    return true;
  }

  constexpr bool bit(std::size_t i) const {
    return i < N * 64 && ((limb[i / 64] >> (i % 64)) & 1U) != 0;
  }

  constexpr std::size_t bit_length() const {
    for (std::size_t i = N; i-- > 0;) {
      if (limb[i] != 0) return i * 64 + 64 - static_cast<std::size_t>(__builtin_clzll(limb[i]));
    }
    return 0;
  }

  /// Bits [pos, pos + width) as an integer; width <= 8.
  constexpr unsigned window(std::size_t pos, unsigned width) const {
    unsigned v = 0;
    for (unsigned k = 0; k < width; ++k) v |= static_cast<unsigned>(bit(pos + k)) << k;
    return v;
  }

  friend constexpr bool operator==(const UInt&, const UInt&) = default;

  friend constexpr std::strong_ordering operator<=>(const UInt& a, const UInt& b) {
    for (std::size_t i = N; i-- > 0;) {
      if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
    }
    return std::strong_ordering::equal;
  }

  /// r = a + b, returns carry out.
  static constexpr std::uint64_t add(UInt& r, const UInt& a, const UInt& b) {
    if (std::is_constant_evaluated()) {
      std::uint64_t carry = 0;
      for (std::size_t i = 0; i < N; ++i) {
        const u128 s = static_cast<u128>(a.limb[i]) + b.limb[i] + carry;
        r.limb[i] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
      }
      return carry;
    }
    unsigned char carry = 0;
    for (std::size_t i = 0; i < N; ++i) {
      unsigned long long out;
      carry = _addcarry_u64(carry, a.limb[i], b.limb[i], &out);
      r.limb[i] = out;
    }
    return carry;
  }

  /// r = a - b, returns borrow out.
  static constexpr std::uint64_t sub(UInt& r, const UInt& a, const UInt& b) {
    if (std::is_constant_evaluated()) {
      std::uint64_t borrow = 0;
      for (std::size_t i = 0; i < N; ++i) {
        const u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
        r.limb[i] = static_cast<std::uint64_t>(d);
        borrow = static_cast<std::uint64_t>(d >> 64) & 1U;
      }
      return borrow;
    }
    unsigned char borrow = 0;
    for (std::size_t i = 0; i < N; ++i) {
      unsigned long long out;
      borrow = _subborrow_u64(borrow, a.limb[i], b.limb[i], &out);
      r.limb[i] = out;
    }
    return borrow;
  }

  constexpr UInt shr1() const {
    UInt r;
    for (std::size_t i = 0; i < N; ++i) {
      r.limb[i] = limb[i] >> 1;
      if (i + 1 < N) r.limb[i] |= limb[i + 1] << 63;
    }
    return r;
  }
};

}  // namespace gridtrust::crypto
