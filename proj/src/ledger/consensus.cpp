#include "gridtrust/ledger/consensus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "gridtrust/errors.hpp"
#include "gridtrust/ledger/merkle.hpp"

namespace gridtrust::ledger {

ChainTip tip_of(const Chain& chain) {
  ChainTip tip;
  for (const auto& b : chain) absorb_key_sets(b, tip.keys);
  if (!chain.empty()) {
    tip.next_height = chain.back().height + 1;
    tip.hash = chain.back().hash;
    tip.timestamp = chain.back().timestamp;
  }
  return tip;
}

namespace {

bool own_record_included(const Block& block, const std::vector<Bytes>& leaves, const ReportRecord& own) {
  for (std::size_t i = 0; i < block.records.size(); ++i) {
    if (block.records[i].meter_id != own.meter_id) continue;
    if (!(block.records[i] == own)) return false;
    const auto proof = merkle_proof(leaves, i);
    return verify_merkle_proof(leaves[i], proof, block.merkle_root);
  }
  return false;
}

}  // namespace

ConsensusOutcome consensus_round(const Block& block, std::span<const Validator> validators,
                                 const ConsensusConfig& cfg, const ChainTip& tip, Rng& rng) {
  if (!(cfg.quorum_fraction > 0.5 && cfg.quorum_fraction <= 1.0)) throw MisuseError("quorum fraction must be in (1/2, 1]");
  if (cfg.max_retries < 0) throw MisuseError("max_retries must be non-negative");
  if (validators.empty()) throw MisuseError("consensus needs at least one validator");

  // The block-level checks are a pure function of (block, tip), so honest
  // validators share one evaluation.
  const bool extends_tip = block.height == tip.next_height && block.prev_hash == tip.hash &&
                           (tip.next_height == 0 || block.timestamp >= tip.timestamp);
  const bool block_ok = extends_tip && !audit_block(block, tip.keys);
  const std::vector<Bytes> leaves = block.leaves();

  std::vector<bool> honest_vote(validators.size());
  for (std::size_t i = 0; i < validators.size(); ++i) {
    const auto& v = validators[i];
    honest_vote[i] = block_ok && (!v.own_record || own_record_included(block, leaves, *v.own_record));
  }

  ConsensusOutcome out;
  out.quorum = static_cast<std::size_t>(std::ceil(cfg.quorum_fraction * static_cast<double>(validators.size()) - 1e-9));
  for (int round = 0; round <= cfg.max_retries; ++round) {
    out.rounds = round + 1;
    out.approvals = 0;
    out.dissenters.clear();
    for (std::size_t i = 0; i < validators.size(); ++i) {
      bool approve = honest_vote[i];
      if (validators[i].byzantine && rng.uniform01() < cfg.byzantine_dissent_probability) approve = false;
      if (approve) ++out.approvals;
      else out.dissenters.push_back(validators[i].meter_id);
    }
    if (out.approvals >= out.quorum) {
      out.committed = true;
      break;
    }
  }
  std::sort(out.dissenters.begin(), out.dissenters.end());
  return out;
}

ElectionResult elect_miner(std::span<const std::uint32_t> meter_ids, std::uint64_t epoch,
                           const std::set<std::uint32_t>& failure_history,
                           const std::set<std::uint32_t>& coalition) {
  if (meter_ids.empty()) throw MisuseError("election needs at least one meter");
  std::vector<std::uint32_t> ids(meter_ids.begin(), meter_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::uint32_t> eligible;
  for (auto id : ids)
    if (!failure_history.contains(id)) eligible.push_back(id);
  if (eligible.empty()) throw NoCandidate("every meter is in the failure history");

  const std::uint32_t rotation = eligible[epoch % eligible.size()];
  std::optional<std::uint32_t> coalition_pick;
  for (auto id : eligible) {
    if (coalition.contains(id)) {
      coalition_pick = id;
      break;
    }
  }

  ElectionResult result;
  std::map<std::uint32_t, std::size_t> tally;
  for (auto voter : ids) {
    const std::uint32_t choice = coalition.contains(voter) && coalition_pick ? *coalition_pick : rotation;
    result.votes[voter] = choice;
    ++tally[choice];
  }
  result.miner = rotation;
  for (const auto& [candidate, count] : tally) {
    if (2 * count > ids.size()) result.miner = candidate;
  }
  return result;
}

std::vector<BenchRow> bench_block_time(std::span<const std::size_t> meter_counts, std::size_t trials,
                                       std::uint64_t seed) {
  if (trials == 0) throw MisuseError("bench needs at least one trial");
  if (meter_counts.empty()) return {};
  std::size_t max_n = 0;
  for (auto n : meter_counts) {
    if (n < 1 || n > 1000) throw MisuseError("bench meter count must be in [1, 1000]");
    max_n = std::max(max_n, n);
  }

  // Synthetic area: one signed report per meter for a single slot.
  Rng rng(seed);
  const std::string slot = "bench-slot";
  const auto ts = fe::TimestampPoints::derive(slot);
  std::vector<ReportRecord> records;
  std::vector<Bytes> key_sets;
  records.reserve(max_n);
  for (std::size_t i = 0; i < max_n; ++i) {
    const crypto::ScalarPair s{crypto::random_scalar(rng, false), crypto::random_scalar(rng, false)};
    const bls::SigningKey sk = bls::generate_signing_key(rng);
    const auto cipher = fe::encrypt_reading(s, ts, rng.uniform_int(0, 2000));
    Bytes dw;
    for (int c = 0; c < 10; ++c) append(dw, crypto::plain_generator().mul(crypto::UInt<1>(rng.uniform_int(1, 1 << 20))).to_bytes());
    const Report rep = make_report(sk, cipher, ts, dw);
    records.push_back(to_record(static_cast<std::uint32_t>(i + 1), rep, slot));
    key_sets.push_back(dw);
  }

  std::vector<BenchRow> rows;
  for (auto n : meter_counts) {
    std::vector<ReportRecord> recs(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<Bytes> keys(key_sets.begin(), key_sets.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<Validator> validators;
    for (std::size_t i = 0; i < n; ++i) validators.push_back({recs[i].meter_id, false, recs[i]});
    std::vector<double> samples;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto start = std::chrono::steady_clock::now();
      const Block b = build_block(0, Digest{}, recs, slot, 0, keys, KeyStore{});
      const auto outcome = consensus_round(b, validators, ConsensusConfig{}, ChainTip{}, rng);
      const auto stop = std::chrono::steady_clock::now();
      if (!outcome.committed) throw Error("bench block was not committed");
      samples.push_back(std::chrono::duration<double>(stop - start).count());
    }
    double mean = 0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double var = 0;
    for (double s : samples) var += (s - mean) * (s - mean);
    const double sd = samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
    rows.push_back({n, mean, mean > 0 ? sd / mean : 0.0});
  }
  return rows;
}

}  // namespace gridtrust::ledger
