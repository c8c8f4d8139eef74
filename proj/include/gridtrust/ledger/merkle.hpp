#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridtrust/bytes.hpp"
#include "gridtrust/crypto/hash.hpp"

namespace gridtrust::ledger {

using crypto::Digest;

/// Binary SHA-256 tree over H(leaf); an odd node at any level is paired with
/// itself, including a lone leaf. EmptyInput when there are no leaves.
Digest merkle_root(std::span<const Bytes> leaves);
Digest merkle_root_of_hashes(std::vector<Digest> level);

struct ProofStep {
  Digest sibling;
  bool sibling_on_left;
};

std::vector<ProofStep> merkle_proof(std::span<const Bytes> leaves, std::size_t index);
bool verify_merkle_proof(std::span<const std::uint8_t> leaf, std::span<const ProofStep> proof, const Digest& root);

}  // namespace gridtrust::ledger
