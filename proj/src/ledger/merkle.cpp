#include "gridtrust/ledger/merkle.hpp"

#include "gridtrust/errors.hpp"

namespace gridtrust::ledger {

namespace {

Digest hash_pair(const Digest& l, const Digest& r) { return crypto::Sha256().update(l).update(r).finish(); }

std::vector<Digest> leaf_hashes(std::span<const Bytes> leaves) {
  std::vector<Digest> out;
  out.reserve(leaves.size());
  for (const auto& l : leaves) out.push_back(crypto::Sha256::digest(l));
  return out;
}

}  // namespace

Digest merkle_root_of_hashes(std::vector<Digest> level) {
  if (level.empty()) throw EmptyInput("merkle tree needs at least one leaf");
  do {
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<Digest> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
    level = std::move(next);
  } while (level.size() > 1);
  return level.front();
}

Digest merkle_root(std::span<const Bytes> leaves) { return merkle_root_of_hashes(leaf_hashes(leaves)); }

std::vector<ProofStep> merkle_proof(std::span<const Bytes> leaves, std::size_t index) {
  if (leaves.empty()) throw EmptyInput("merkle tree needs at least one leaf");
  if (index >= leaves.size()) throw RangeError("leaf index out of range");
  std::vector<Digest> level = leaf_hashes(leaves);
  std::vector<ProofStep> proof;
  do {
    if (level.size() % 2 == 1) level.push_back(level.back());
    const std::size_t sib = index ^ 1U;
    proof.push_back({level[sib], sib < index});
    std::vector<Digest> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
    level = std::move(next);
    index /= 2;
  } while (level.size() > 1);
  return proof;
}

bool verify_merkle_proof(std::span<const std::uint8_t> leaf, std::span<const ProofStep> proof, const Digest& root) {
  Digest acc = crypto::Sha256::digest(leaf);
  for (const auto& step : proof) acc = step.sibling_on_left ? hash_pair(step.sibling, acc) : hash_pair(acc, step.sibling);
  return acc == root;
}

}  // namespace gridtrust::ledger
