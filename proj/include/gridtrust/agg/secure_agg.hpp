#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridtrust/crypto/group.hpp"
#include "gridtrust/rng.hpp"

namespace gridtrust::agg {

using crypto::PlainPoint;
using crypto::Scalar;
using crypto::ScalarPair;

/// Per-meter secrets: x signs and agrees masks, s is the encryption key.
struct MeterSecret {
  Scalar x;
  ScalarPair s;
};

MeterSecret generate_meter_secret(Rng& rng);

struct AgreementKeyPair {
  Scalar secret;
  PlainPoint pub;  // secret * g
};

AgreementKeyPair ka_gen(Rng& rng);

/// Public key for a given secret; MisuseError when the secret is zero.
PlainPoint ka_public(const Scalar& secret);

/// Pairwise mask: the shared point x_u * (x_v g) hashed into two scalars.
/// Symmetric in (u, v). MisuseError for a zero secret, DecodeError for an
/// identity or malformed public key.
ScalarPair ka_agree(const Scalar& my_secret, const PlainPoint& their_public);
ScalarPair ka_agree(const Scalar& my_secret, std::span<const std::uint8_t> their_public);

struct PeerMask {
  std::uint32_t meter_id;
  ScalarPair mask;
};

/// y = s + sum over higher-id peers of mask - sum over lower-id peers of mask.
/// `roster` lists every meter in the area including self_id. TopologyError
/// when a peer is missing, duplicated, unknown, or equal to self_id.
ScalarPair blind_share(std::uint32_t self_id, const ScalarPair& s, std::span<const PeerMask> peers,
                       std::span<const std::uint32_t> roster);

/// Component-wise sum of the shares. TopologyError unless there is exactly
/// one share per meter (`expected_meters`).
ScalarPair aggregate_da(std::span<const ScalarPair> shares, std::size_t expected_meters);

/// Runs key setup for a whole area in-process: every meter agrees a mask with
/// every other and blinds its s. Returns the shares in roster order.
std::vector<ScalarPair> simulate_area_shares(std::span<const std::uint32_t> roster,
                                             std::span<const MeterSecret> secrets);

}  // namespace gridtrust::agg
