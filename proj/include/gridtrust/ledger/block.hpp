#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridtrust/ledger/report.hpp"

namespace gridtrust::ledger {

/// DW sets known to a verifier, by digest.
using KeyStore = std::map<Digest, Bytes>;

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  Digest merkle_root{};
  std::uint64_t timestamp = 0;
  /// Reporting slot all records belong to.
  std::string slot_label;
  std::vector<ReportRecord> records;
  /// DW sets introduced in this block (first slot of a detection period).
  std::vector<Bytes> key_sets;
  Digest hash{};

  /// H(height || prev || root || slot || key-set digest || timestamp).
  Digest compute_hash() const;
  Digest compute_merkle_root() const;
  std::vector<Bytes> leaves() const;
};

using Chain = std::vector<Block>;

/// Adds the block's key sets to `store`.
void absorb_key_sets(const Block& block, KeyStore& store);

/// Why a block fails its audit, or nullopt when it passes.
struct AuditFailure {
  enum class Kind { kHash, kMerkleRoot, kKeySet, kStale, kMissingKeySet, kSignature };
  Kind kind;
  std::optional<std::uint32_t> meter_id;
  std::string detail;
};

/// Checks one block in isolation given the DW sets known before it (its own
/// key sets are added internally): stored hash, Merkle root, slot labels of
/// records, key-set references and every signature.
std::optional<AuditFailure> audit_block(const Block& block, const KeyStore& known);

/// Assembles a block and computes its root and hash without checking records.
Block assemble_block(std::uint64_t height, const Digest& prev_hash, std::vector<ReportRecord> records,
                     const std::string& slot_label, std::uint64_t timestamp, std::vector<Bytes> key_sets);

/// Assembles and checks a block for the miner's current slot.
/// EmptyInput without records, StaleTimestamp for a record from another
/// slot, SignatureError naming the meter whose signature fails (or whose DW
/// set is unknown).
Block build_block(std::uint64_t height, const Digest& prev_hash, std::vector<ReportRecord> records,
                  const std::string& slot_label, std::uint64_t timestamp, std::vector<Bytes> key_sets,
                  const KeyStore& known);

/// Height of the first block that breaks the chain (link, height, timestamp
/// order or audit), or nullopt when the chain is valid. Empty chains are valid.
std::optional<std::uint64_t> validate_chain(const Chain& chain);

/// Structured text form: JSON, one object per block, hex digests.
std::string chain_to_text(const Chain& chain);
/// ParseError on malformed text.
Chain chain_from_text(const std::string& text);

}  // namespace gridtrust::ledger
