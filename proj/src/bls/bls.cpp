#include "gridtrust/bls/bls.hpp"

#include <optional>

#include "gridtrust/crypto/hash.hpp"
#include "gridtrust/crypto/pairing.hpp"
#include "gridtrust/crypto/params.hpp"
#include "gridtrust/errors.hpp"

namespace gridtrust::bls {

using crypto::PointBytes;

VerifyKey VerifyKey::from_bytes(std::span<const std::uint8_t> bytes) {
  const PairingPoint p = PairingPoint::from_bytes(bytes);
  if (p.is_identity()) throw DecodeError("verify key is the identity");
  return {p};
}

Signature Signature::from_bytes(std::span<const std::uint8_t> bytes) {
  return {PairingPoint::from_bytes(bytes)};
}

VerifyKey verify_key(const SigningKey& sk) {
  if (sk.x.is_zero()) throw MisuseError("signing key must be non-zero");
  return {crypto::pairing_generator().mul(sk.x.to_int()).normalized()};
}

SigningKey generate_signing_key(Rng& rng) { return {crypto::random_scalar(rng)}; }

PairingPoint hash_message(std::span<const std::uint8_t> message) {
  return PairingPoint::hash_to_curve(crypto::kH2Label, message);
}

Signature sign(const SigningKey& sk, std::span<const std::uint8_t> message) {
  if (sk.x.is_zero()) throw MisuseError("signing key must be non-zero");
  return {hash_message(message).mul(sk.x.to_int()).normalized()};
}

bool verify(const VerifyKey& vk, std::span<const std::uint8_t> message, const Signature& sig) {
  if (vk.pk.is_identity() || sig.sigma.is_identity()) return false;
  const std::array<std::pair<PairingPoint, PairingPoint>, 2> pairs{
      std::make_pair(sig.sigma, crypto::pairing_generator()),
      std::make_pair(-hash_message(message), vk.pk)};
  return crypto::multi_pairing(pairs) == crypto::GtElement::one();
}

bool verify_encoded(std::span<const std::uint8_t> vk, std::span<const std::uint8_t> message,
                    std::span<const std::uint8_t> sig) {
  const auto pk = PairingPoint::try_from_bytes(vk);
  const auto sigma = PairingPoint::try_from_bytes(sig);
  if (!pk || !sigma) return false;
  return verify({*pk}, message, {*sigma});
}

bool batch_verify(std::span<const BatchItem> items) {
  if (items.empty()) throw MisuseError("batch verification of an empty batch");
  for (const auto& it : items) {
    if (it.vk.pk.is_identity() || it.sig.sigma.is_identity()) return false;
  }

  // Coefficients bind every key, message and signature in the batch.
  crypto::Sha256 transcript;
  transcript.update("gridtrust/bls/batch");
  for (const auto& it : items) {
    transcript.update(it.vk.to_bytes()).update_field(it.message).update(it.sig.to_bytes());
  }
  const crypto::Digest seed = transcript.finish();

  std::vector<std::pair<PairingPoint, PairingPoint>> pairs;
  pairs.reserve(items.size() + 1);
  PairingPoint sigma_sum;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const crypto::Digest d = crypto::Sha256().update(seed).update_u64(i).finish();
    std::uint64_t coeff = 0;
    for (int k = 0; k < 8; ++k) coeff = (coeff << 8) | d[k];
    coeff |= 1;  // never zero
    const crypto::UInt<1> c(coeff);
    sigma_sum += items[i].sig.sigma.mul(c);
    pairs.emplace_back(-hash_message(items[i].message).mul(c), items[i].vk.pk);
  }
  pairs.emplace_back(sigma_sum, crypto::pairing_generator());
  return crypto::multi_pairing(pairs) == crypto::GtElement::one();
}

}  // namespace gridtrust::bls
