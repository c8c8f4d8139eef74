#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridtrust/crypto/group.hpp"
#include "gridtrust/rng.hpp"

namespace gridtrust::bls {

using crypto::PairingPoint;
using crypto::Scalar;

struct SigningKey {
  Scalar x;
};

struct VerifyKey {
  PairingPoint pk;  // x * g2

  crypto::PointBytes to_bytes() const { return pk.to_bytes(); }
  /// DecodeError on malformed bytes or the identity.
  static VerifyKey from_bytes(std::span<const std::uint8_t> bytes);
  friend bool operator==(const VerifyKey&, const VerifyKey&) = default;
};

struct Signature {
  PairingPoint sigma;

  crypto::PointBytes to_bytes() const { return sigma.to_bytes(); }
  static Signature from_bytes(std::span<const std::uint8_t> bytes);
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// MisuseError for a zero key.
VerifyKey verify_key(const SigningKey& sk);

SigningKey generate_signing_key(Rng& rng);

/// H2: message to a point of the pairing group.
PairingPoint hash_message(std::span<const std::uint8_t> message);

Signature sign(const SigningKey& sk, std::span<const std::uint8_t> message);

/// e(sigma, g2) == e(H2(message), pk). Identity keys and signatures are rejected.
bool verify(const VerifyKey& vk, std::span<const std::uint8_t> message, const Signature& sig);

/// Byte-level check: any decoding failure is a rejection.
bool verify_encoded(std::span<const std::uint8_t> vk, std::span<const std::uint8_t> message,
                    std::span<const std::uint8_t> sig);

struct BatchItem {
  VerifyKey vk;
  std::span<const std::uint8_t> message;
  Signature sig;
};

/// Accepts iff every item verifies (up to 2^-64 soundness error). Each item is
/// weighted by a 64-bit coefficient derived by hashing the whole batch, so an
/// invalid pair cannot be cancelled by another. MisuseError on an empty batch.
bool batch_verify(std::span<const BatchItem> items);

}  // namespace gridtrust::bls
