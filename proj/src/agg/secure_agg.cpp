#include "gridtrust/agg/secure_agg.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "gridtrust/errors.hpp"

namespace gridtrust::agg {

MeterSecret generate_meter_secret(Rng& rng) {
  MeterSecret m;
  m.x = crypto::random_scalar(rng);
  m.s = {crypto::random_scalar(rng, false), crypto::random_scalar(rng, false)};
  return m;
}

PlainPoint ka_public(const Scalar& secret) {
  if (secret.is_zero()) throw MisuseError("agreement secret must be non-zero");
  return crypto::plain_generator_table().mul(secret.to_int()).normalized();
}

AgreementKeyPair ka_gen(Rng& rng) {
  AgreementKeyPair kp;
  kp.secret = crypto::random_scalar(rng);
  kp.pub = ka_public(kp.secret);
  return kp;
}

ScalarPair ka_agree(const Scalar& my_secret, const PlainPoint& their_public) {
  if (my_secret.is_zero()) throw MisuseError("agreement secret must be non-zero");
  if (their_public.is_identity()) throw DecodeError("agreement public key is the identity");
  const auto shared = their_public.mul(my_secret.to_int()).to_bytes();
  return {crypto::hash_to_scalar("gridtrust/ka/mask0", shared),
          crypto::hash_to_scalar("gridtrust/ka/mask1", shared)};
}

ScalarPair ka_agree(const Scalar& my_secret, std::span<const std::uint8_t> their_public) {
  return ka_agree(my_secret, PlainPoint::from_bytes(their_public));
}

ScalarPair blind_share(std::uint32_t self_id, const ScalarPair& s, std::span<const PeerMask> peers,
                       std::span<const std::uint32_t> roster) {
  std::set<std::uint32_t> expected(roster.begin(), roster.end());
  if (expected.size() != roster.size()) throw TopologyError("roster contains duplicate meter ids");
  if (!expected.erase(self_id)) throw TopologyError("meter " + std::to_string(self_id) + " is not on the roster");

  ScalarPair y = s;
  for (const auto& peer : peers) {
    if (peer.meter_id == self_id) throw TopologyError("meter listed itself as a peer");
    if (!expected.erase(peer.meter_id)) {
      throw TopologyError("peer " + std::to_string(peer.meter_id) + " is duplicated or not on the roster");
    }
    for (std::size_t k = 0; k < 2; ++k) {
      if (peer.meter_id > self_id) y[k] += peer.mask[k];
      else y[k] -= peer.mask[k];
    }
  }
  if (!expected.empty()) throw TopologyError("missing mask for peer " + std::to_string(*expected.begin()));
  return y;
}

ScalarPair aggregate_da(std::span<const ScalarPair> shares, std::size_t expected_meters) {
  if (shares.size() != expected_meters) {
    throw TopologyError("expected " + std::to_string(expected_meters) + " shares, got " +
                        std::to_string(shares.size()));
  }
  ScalarPair da{};
  for (const auto& y : shares) {
    da[0] += y[0];
    da[1] += y[1];
  }
  return da;
}

std::vector<ScalarPair> simulate_area_shares(std::span<const std::uint32_t> roster,
                                             std::span<const MeterSecret> secrets) {
  if (roster.size() != secrets.size()) throw TopologyError("one secret per roster entry required");
  std::vector<PlainPoint> pubs;
  pubs.reserve(roster.size());
  for (const auto& m : secrets) pubs.push_back(ka_public(m.x));

  // Masks are symmetric, so each pair is agreed once.
  const std::size_t m = roster.size();
  std::vector<std::vector<PeerMask>> peers(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const ScalarPair mask = ka_agree(secrets[i].x, pubs[j]);
      peers[i].push_back({roster[j], mask});
      peers[j].push_back({roster[i], mask});
    }
  }
  std::vector<ScalarPair> shares;
  shares.reserve(m);
  for (std::size_t i = 0; i < m; ++i) shares.push_back(blind_share(roster[i], secrets[i].s, peers[i], roster));
  return shares;
}

}  // namespace gridtrust::agg
