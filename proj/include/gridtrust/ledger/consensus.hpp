#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "gridtrust/ledger/block.hpp"
#include "gridtrust/rng.hpp"

namespace gridtrust::ledger {

struct ConsensusConfig {
  /// Approvals needed: ceil(quorum_fraction * validators). Must lie in (1/2, 1].
  double quorum_fraction = 2.0 / 3.0;
  /// Re-broadcasts after a failed first vote.
  int max_retries = 1;
  /// Probability that a byzantine validator dissents in a given round.
  double byzantine_dissent_probability = 1.0;
};

struct Validator {
  std::uint32_t meter_id = 0;
  bool byzantine = false;
  /// The record this meter sent for the slot, if any; it must appear verbatim
  /// in the block with a valid inclusion proof.
  std::optional<ReportRecord> own_record;
};

/// What every validator knows about the chain tip.
struct ChainTip {
  std::uint64_t next_height = 0;
  Digest hash{};
  std::uint64_t timestamp = 0;
  KeyStore keys;
};

ChainTip tip_of(const Chain& chain);

struct ConsensusOutcome {
  bool committed = false;
  int rounds = 0;
  std::size_t approvals = 0;
  std::size_t quorum = 0;
  /// Dissenting validators in the final round, ascending.
  std::vector<std::uint32_t> dissenters;
};

/// Synchronous approve/dissent vote. Honest validators approve iff the block
/// extends the tip, passes audit_block and contains their own record. A
/// failed vote is re-broadcast up to max_retries times; the outcome carries
/// the last round's dissenters. MisuseError for an invalid config or no
/// validators.
ConsensusOutcome consensus_round(const Block& block, std::span<const Validator> validators,
                                 const ConsensusConfig& cfg, const ChainTip& tip, Rng& rng);

struct ElectionResult {
  std::uint32_t miner = 0;
  /// voter id -> candidate id, for audit.
  std::map<std::uint32_t, std::uint32_t> votes;
};

/// Rotation by epoch over the sorted ids that are not in failure_history.
/// Honest meters vote for the rotation candidate; meters in `coalition` vote
/// for their lowest eligible member. A candidate needs a strict majority of
/// the votes, otherwise the rotation candidate stands. NoCandidate when every
/// id has failed; MisuseError for an empty id set.
ElectionResult elect_miner(std::span<const std::uint32_t> meter_ids, std::uint64_t epoch,
                           const std::set<std::uint32_t>& failure_history,
                           const std::set<std::uint32_t>& coalition = {});

struct BenchRow {
  std::size_t meters = 0;
  double mean_seconds = 0;
  /// Coefficient of variation over the trials (0 for a single trial).
  double cv = 0;
};

/// Wall-clock of build_block plus consensus_round over synthetic signed
/// records, one record and one validator per meter. MisuseError for
/// trials == 0 or sizes outside [1, 1000].
std::vector<BenchRow> bench_block_time(std::span<const std::size_t> meter_counts, std::size_t trials,
                                       std::uint64_t seed);

}  // namespace gridtrust::ledger
