#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include "gridtrust/crypto/curve.hpp"
#include "gridtrust/crypto/field.hpp"
#include "gridtrust/rng.hpp"

namespace gridtrust::crypto {

// Both curves share the prime order q. The plain curve is an ordinary j = 0
// curve of prime order (no cofactor) used for encryption and key agreement.
// The pairing curve is the supersingular y^2 = x^3 + x over a 310-bit prime
// p = h q - 1 (embedding degree 2), used for BLS signatures. Constants come
// from tools/find_curve_params.py.

struct OrderConfig {
  static constexpr std::size_t kLimbs = 4;
  static constexpr UInt<4> kModulus =
      UInt<4>::from_hex("52aef37e954a24fcf3d22951b6ba2d84baa7aceca11e19419455a88e1bf8b4a3");
};

struct PlainFieldConfig {
  static constexpr std::size_t kLimbs = 4;
  static constexpr UInt<4> kModulus =
      UInt<4>::from_hex("52aef37e954a24fcf3d22951b6ba2d83d14ff56fb5880df8ff779bb5dcd0945f");
};

struct PairingFieldConfig {
  static constexpr std::size_t kLimbs = 5;
  static constexpr UInt<5> kModulus = UInt<5>::from_hex(
      "2000000000001529c669b38d2206e232d0d3b7353e4e375dc76f89860ffa3374b2ae705799ecf3");
};

/// Element of Z_q.
using Scalar = Fp<OrderConfig>;
using PlainField = Fp<PlainFieldConfig>;
using PairingField = Fp<PairingFieldConfig>;

struct PlainCurve {
  using Field = PlainField;
  static constexpr bool kAIsOne = false;
  static constexpr std::uint64_t kCofactor = 1;
  static constexpr UInt<4> kOrder = OrderConfig::kModulus;
  static constexpr std::string_view kName = "gridtrust-plain-j0-255";
  static Field b() { return Field::from_u64(10); }
};

struct PairingCurve {
  using Field = PairingField;
  static constexpr bool kAIsOne = true;
  static constexpr std::uint64_t kCofactor = 0x6313a3a2ccba7cULL;
  static constexpr UInt<4> kOrder = OrderConfig::kModulus;
  static constexpr std::string_view kName = "gridtrust-ss-k2-310";
  static Field b() { return Field::zero(); }
};

using PlainPoint = Point<PlainCurve>;
using PairingPoint = Point<PairingCurve>;

using ScalarPair = std::array<Scalar, 2>;
using ScalarBytes = std::array<std::uint8_t, 32>;

/// q as an integer.
inline constexpr UInt<4> kGroupOrder = OrderConfig::kModulus;

/// Signed integer reduced mod q (negatives become q - |v|).
Scalar scalar_from_signed(std::int64_t v);

/// Uniform scalar from 512 random bits; nonzero when requested.
Scalar random_scalar(Rng& rng, bool nonzero = true);

Scalar hash_to_scalar(std::string_view label, std::span<const std::uint8_t> msg);

ScalarBytes scalar_to_bytes(const Scalar& s);
/// Throws DecodeError for non-canonical input.
Scalar scalar_from_bytes(std::span<const std::uint8_t> bytes);

/// Fixed generators, derived by hashing nothing-up-my-sleeve labels.
const PlainPoint& plain_generator();
const PairingPoint& pairing_generator();

/// Comb table for g, built on first use.
const FixedBaseTable<PlainCurve>& plain_generator_table();

/// H1 of the protocol: label and timestamp to a pair of independent plain points.
std::pair<PlainPoint, PlainPoint> hash_to_point_pair(std::string_view domain_label, std::string_view timestamp);

/// s^T (P0, P1) = s0 P0 + s1 P1.
PlainPoint inner_point(const ScalarPair& s, const PlainPoint& p0, const PlainPoint& p1);

}  // namespace gridtrust::crypto
