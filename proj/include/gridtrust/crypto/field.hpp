#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>
#include <span>

#include "gridtrust/crypto/uint.hpp"

namespace gridtrust::crypto {

namespace detail {

template <std::size_t N>
constexpr UInt<N> double_mod(const UInt<N>& x, const UInt<N>& m) {
  UInt<N> r;
  const std::uint64_t carry = UInt<N>::add(r, x, x);
  if (carry != 0 || r >= m) UInt<N>::sub(r, r, m);
  return r;
}

/// 2^(64 * N * k) mod m, by repeated doubling.
template <std::size_t N>
constexpr UInt<N> pow2_mod(std::size_t bits, const UInt<N>& m) {
  UInt<N> r(1);
  for (std::size_t i = 0; i < bits; ++i) r = double_mod(r, m);
  return r;
}

constexpr std::uint64_t neg_inverse_u64(std::uint64_t p0) {
  std::uint64_t inv = 1;
  for (int i = 0; i < 7; ++i) inv *= 2 - p0 * inv;
  return ~inv + 1;
}

template <std::size_t N>
constexpr UInt<N> minus_small(const UInt<N>& a, std::uint64_t k) {
  UInt<N> r;
  UInt<N>::sub(r, a, UInt<N>(k));
  return r;
}

template <std::size_t N>
constexpr UInt<N> plus_small(const UInt<N>& a, std::uint64_t k) {
  UInt<N> r;
  UInt<N>::add(r, a, UInt<N>(k));
  return r;
}

}  // namespace detail

/// Prime field element in Montgomery form. Cfg supplies kLimbs and kModulus (odd prime).
template <class Cfg>
class Fp {
 public:
  static constexpr std::size_t N = Cfg::kLimbs;
  using Int = UInt<N>;
  static constexpr Int kModulus = Cfg::kModulus;

  constexpr Fp() = default;

  static constexpr Fp zero() { return Fp(); }
  static constexpr Fp one() { return raw(kR); }

  /// Any v < 2^(64N) is accepted and reduced.
  static Fp from_int(const Int& v) { return raw(mont_mul(kR2, v)); }
  static Fp from_u64(std::uint64_t v) { return from_int(Int(v)); }

  /// Interprets up to 2 * Int::kBytes big-endian bytes and reduces mod p.
  static Fp from_wide_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() <= Int::kBytes) return from_int(Int::from_be_bytes(bytes));
    const std::size_t split = bytes.size() - Int::kBytes;
    const Fp hi = from_int(Int::from_be_bytes(bytes.first(split)));
    const Fp lo = from_int(Int::from_be_bytes(bytes.subspan(split)));
    return hi * from_int(kR) + lo;
  }

  /// Canonical bytes; std::nullopt when the value is not < p.
  static std::optional<Fp> from_canonical(const Int& v) {
    if (v >= kModulus) return std::nullopt;
    return from_int(v);
  }

  Int to_int() const { return mont_mul(v_, Int(1)); }

  bool is_zero() const { return v_.is_zero(); }
  bool is_odd() const { return to_int().bit(0); }

  friend bool operator==(const Fp& a, const Fp& b) { return a.v_ == b.v_; }

  friend Fp operator+(const Fp& a, const Fp& b) {
    Int r;
    const std::uint64_t carry = Int::add(r, a.v_, b.v_);
    if (carry != 0 || r >= kModulus) Int::sub(r, r, kModulus);
    return raw(r);
  }

  friend Fp operator-(const Fp& a, const Fp& b) {
    Int r;
    if (Int::sub(r, a.v_, b.v_) != 0) Int::add(r, r, kModulus);
    return raw(r);
  }

  Fp operator-() const { return zero() - *this; }

  friend Fp operator*(const Fp& a, const Fp& b) { return raw(mont_mul(a.v_, b.v_)); }

  Fp& operator+=(const Fp& o) { return *this = *this + o; }
  Fp& operator-=(const Fp& o) { return *this = *this - o; }
  Fp& operator*=(const Fp& o) { return *this = *this * o; }

  Fp square() const { return *this * *this; }
  Fp dbl() const { return *this + *this; }

  Fp pow(const Int& e) const {
    std::array<Fp, 16> table;
    table[0] = one();
    for (std::size_t i = 1; i < table.size(); ++i) table[i] = table[i - 1] * *this;
    Fp acc = one();
    const std::size_t bits = e.bit_length();
    const std::size_t top = (bits + 3) / 4 * 4;
    for (std::size_t pos = top; pos >= 4; pos -= 4) {
      acc = acc.square().square().square().square();
      acc *= table[e.window(pos - 4, 4)];
    }
    return acc;
  }

  /// Zero maps to zero.
  Fp inverse() const { return pow(kPminus2); }

  /// Euler criterion; zero counts as a square.
  bool is_square() const { return is_zero() || pow(kHalfPminus1) == one(); }

  /// Requires p = 3 mod 4.
  std::optional<Fp> sqrt() const {
    static_assert((kModulus.limb[0] & 3U) == 3U, "sqrt needs p = 3 mod 4");
    const Fp r = pow(kQuarterPplus1);
    if (r.square() == *this) return r;
    return std::nullopt;
  }

  /// In-place inversion of every non-zero element with one field inversion.
  static void batch_inverse(std::span<Fp> xs) {
    std::vector<Fp> prefix(xs.size());
    Fp acc = one();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      prefix[i] = acc;
      if (!xs[i].is_zero()) acc *= xs[i];
    }
    Fp inv = acc.inverse();
    for (std::size_t i = xs.size(); i-- > 0;) {
      if (xs[i].is_zero()) continue;
      const Fp next = inv * xs[i];
      xs[i] = inv * prefix[i];
      inv = next;
    }
  }

 private:
  static constexpr Int kR = detail::pow2_mod<N>(64 * N, kModulus);
  static constexpr Int kR2 = detail::pow2_mod<N>(128 * N, kModulus);
  static constexpr std::uint64_t kN0 = detail::neg_inverse_u64(kModulus.limb[0]);
  static constexpr Int kPminus2 = detail::minus_small(kModulus, 2);
  static constexpr Int kHalfPminus1 = detail::minus_small(kModulus, 1).shr1();
  static constexpr Int kQuarterPplus1 = detail::plus_small(kModulus, 1).shr1().shr1();

  static constexpr Fp raw(const Int& v) {
    Fp f;
    f.v_ = v;
    return f;
  }

  static_assert(Cfg::kModulus.limb[N - 1] < (UINT64_MAX >> 1) - 1,
                "no-carry Montgomery multiplication needs a spare top bit");

  // CIOS Montgomery multiplication, no-carry variant: a * b * 2^(-64N) mod p
  // for a * b < p * 2^(64N).
  static Int mont_mul(const Int& a, const Int& b) {
    std::array<std::uint64_t, N> t{};
#pragma GCC unroll 8
    for (std::size_t i = 0; i < N; ++i) {
      u128 s = static_cast<u128>(a.limb[0]) * b.limb[i] + t[0];
      std::uint64_t hi_a = static_cast<std::uint64_t>(s >> 64);
      const std::uint64_t t0 = static_cast<std::uint64_t>(s);
      const std::uint64_t m = t0 * kN0;
      u128 r = static_cast<u128>(m) * kModulus.limb[0] + t0;
      std::uint64_t hi_c = static_cast<std::uint64_t>(r >> 64);
#pragma GCC unroll 8
      for (std::size_t j = 1; j < N; ++j) {
        s = static_cast<u128>(a.limb[j]) * b.limb[i] + t[j] + hi_a;
        hi_a = static_cast<std::uint64_t>(s >> 64);
        r = static_cast<u128>(m) * kModulus.limb[j] + static_cast<std::uint64_t>(s) + hi_c;
        hi_c = static_cast<std::uint64_t>(r >> 64);
        t[j - 1] = static_cast<std::uint64_t>(r);
      }
      t[N - 1] = hi_a + hi_c;
    }
    Int out;
    for (std::size_t j = 0; j < N; ++j) out.limb[j] = t[j];
    if (out >= kModulus) Int::sub(out, out, kModulus);
    return out;
  }

  Int v_{};
};

}  // namespace gridtrust::crypto
