#include "gridtrust/ledger/block.hpp"

#include <algorithm>
#include "json.hpp"
#include <unordered_map>

#include "gridtrust/errors.hpp"
#include "gridtrust/ledger/merkle.hpp"

namespace gridtrust::ledger {

namespace {

Digest key_sets_digest(const std::vector<Bytes>& key_sets) {
  crypto::Sha256 h;
  h.update("gridtrust/keysets").update_u32(static_cast<std::uint32_t>(key_sets.size()));
  for (const auto& k : key_sets) h.update_field(k);
  return h.finish();
}

// H1 evaluations are shared across the records of a slot.
class TimestampCache {
 public:
  const TimestampBytes& get(const std::string& label) {
    auto it = cache_.find(label);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(label, fe::TimestampPoints::derive(label, false).to_bytes()).first->second;
  }

 private:
  std::unordered_map<std::string, TimestampBytes> cache_;
};

Bytes message_for(const ReportRecord& rec, const TimestampBytes& ts, const Bytes& dw) {
  Report r;
  r.cipher = rec.cipher;
  r.ts = ts;
  r.dw = dw;
  r.pk = rec.pk;
  return r.signed_message();
}

struct PreparedItem {
  std::uint32_t meter_id;
  Bytes message;
  std::optional<bls::VerifyKey> vk;
  std::optional<bls::Signature> sig;
};

// First meter whose signature fails, verified as a batch with a per-item
// fallback to locate the culprit.
std::optional<std::uint32_t> first_bad_signature(std::vector<PreparedItem>& items) {
  for (const auto& it : items) {
    if (!it.vk || !it.sig) return it.meter_id;
  }
  if (items.empty()) return std::nullopt;
  std::vector<bls::BatchItem> batch;
  batch.reserve(items.size());
  for (const auto& it : items) batch.push_back({*it.vk, it.message, *it.sig});
  if (bls::batch_verify(batch)) return std::nullopt;
  for (const auto& it : items) {
    if (!bls::verify(*it.vk, it.message, *it.sig)) return it.meter_id;
  }
  // The batch equation failed although every item verifies alone; treat as
  // unlocatable and blame the first record.
  return items.front().meter_id;
}

}  // namespace

std::vector<Bytes> Block::leaves() const {
  std::vector<Bytes> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.canonical_bytes());
  return out;
}

Digest Block::compute_merkle_root() const { return ledger::merkle_root(leaves()); }

Digest Block::compute_hash() const {
  return crypto::Sha256()
      .update("gridtrust/block")
      .update_u64(height)
      .update(prev_hash)
      .update(merkle_root)
      .update_field(slot_label)
      .update(key_sets_digest(key_sets))
      .update_u64(timestamp)
      .finish();
}

void absorb_key_sets(const Block& block, KeyStore& store) {
  for (const auto& k : block.key_sets) store.emplace(key_set_digest(k), k);
}

std::optional<AuditFailure> audit_block(const Block& block, const KeyStore& known) {
  using Kind = AuditFailure::Kind;
  if (block.records.empty()) return AuditFailure{Kind::kMerkleRoot, std::nullopt, "block has no records"};
  if (block.compute_hash() != block.hash) return AuditFailure{Kind::kHash, std::nullopt, "stored hash mismatch"};
  if (block.compute_merkle_root() != block.merkle_root) {
    return AuditFailure{Kind::kMerkleRoot, std::nullopt, "merkle root mismatch"};
  }
  KeyStore local;
  for (const auto& k : block.key_sets) {
    try {
      decode_key_set(k);
    } catch (const DecodeError& e) {
      return AuditFailure{Kind::kKeySet, std::nullopt, e.what()};
    }
    local.emplace(key_set_digest(k), k);
  }
  TimestampCache ts_cache;
  std::vector<PreparedItem> items;
  items.reserve(block.records.size());
  for (const auto& rec : block.records) {
    if (rec.ts_label != block.slot_label) {
      return AuditFailure{Kind::kStale, rec.meter_id, "record slot differs from block slot"};
    }
    const Bytes* dw = nullptr;
    if (auto it = local.find(rec.dw_ref); it != local.end()) dw = &it->second;
    else if (auto jt = known.find(rec.dw_ref); jt != known.end()) dw = &jt->second;
    if (dw == nullptr) return AuditFailure{Kind::kMissingKeySet, rec.meter_id, "unknown DW reference"};
    PreparedItem item{rec.meter_id, message_for(rec, ts_cache.get(rec.ts_label), *dw), std::nullopt, std::nullopt};
    if (auto pk = crypto::PairingPoint::try_from_bytes(rec.pk); pk && !pk->is_identity()) item.vk = bls::VerifyKey{*pk};
    if (auto sig = crypto::PairingPoint::try_from_bytes(rec.sig)) item.sig = bls::Signature{*sig};
    items.push_back(std::move(item));
  }
  if (auto bad = first_bad_signature(items)) {
    return AuditFailure{Kind::kSignature, *bad, "signature does not verify"};
  }
  return std::nullopt;
}

Block assemble_block(std::uint64_t height, const Digest& prev_hash, std::vector<ReportRecord> records,
                     const std::string& slot_label, std::uint64_t timestamp, std::vector<Bytes> key_sets) {
  if (records.empty()) throw EmptyInput("cannot build a block without records");
  Block b;
  b.height = height;
  b.prev_hash = prev_hash;
  b.timestamp = timestamp;
  b.slot_label = slot_label;
  b.records = std::move(records);
  b.key_sets = std::move(key_sets);
  b.merkle_root = b.compute_merkle_root();
  b.hash = b.compute_hash();
  return b;
}

Block build_block(std::uint64_t height, const Digest& prev_hash, std::vector<ReportRecord> records,
                  const std::string& slot_label, std::uint64_t timestamp, std::vector<Bytes> key_sets,
                  const KeyStore& known) {
  if (records.empty()) throw EmptyInput("cannot build a block without records");
  for (const auto& rec : records) {
    if (rec.ts_label != slot_label) {
      throw StaleTimestamp(rec.meter_id, "meter " + std::to_string(rec.meter_id) + " reported for slot " +
                                             rec.ts_label + ", current slot is " + slot_label);
    }
  }
  Block b = assemble_block(height, prev_hash, std::move(records), slot_label, timestamp, std::move(key_sets));
  if (auto failure = audit_block(b, known)) {
    const std::uint32_t meter = failure->meter_id.value_or(0);
    throw SignatureError(meter, "meter " + std::to_string(meter) + ": " + failure->detail);
  }
  return b;
}

std::optional<std::uint64_t> validate_chain(const Chain& chain) {
  KeyStore store;
  Digest prev{};
  std::uint64_t prev_time = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Block& b = chain[i];
    const auto h = static_cast<std::uint64_t>(i);
    if (b.height != h || b.prev_hash != prev || (i > 0 && b.timestamp < prev_time)) return h;
    if (audit_block(b, store)) return h;
    absorb_key_sets(b, store);
    prev = b.hash;
    prev_time = b.timestamp;
  }
  return std::nullopt;
}

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const std::string& hex) {
  const Bytes raw = from_hex(hex);
  if (raw.size() != N) throw ParseError("field has " + std::to_string(raw.size()) + " bytes, expected " + std::to_string(N));
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

}  // namespace

std::string chain_to_text(const Chain& chain) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : chain) {
    nlohmann::ordered_json jb;
    jb["height"] = b.height;
    jb["prev_hash"] = to_hex(b.prev_hash);
    jb["merkle_root"] = to_hex(b.merkle_root);
    jb["timestamp"] = b.timestamp;
    jb["slot"] = b.slot_label;
    jb["hash"] = to_hex(b.hash);
    nlohmann::ordered_json keys = nlohmann::ordered_json::array();
    for (const auto& k : b.key_sets) keys.push_back(to_hex(k));
    jb["key_sets"] = keys;
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const auto& r : b.records) {
      nlohmann::ordered_json jr;
      jr["meter_id"] = r.meter_id;
      jr["cipher"] = to_hex(r.cipher);
      jr["ts"] = r.ts_label;
      jr["dw_ref"] = to_hex(r.dw_ref);
      jr["sig"] = to_hex(r.sig);
      jr["pk"] = to_hex(r.pk);
      recs.push_back(jr);
    }
    jb["records"] = recs;
    blocks.push_back(jb);
  }
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["blocks"] = blocks;
  return doc.dump(1) + "\n";
}

Chain chain_from_text(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("version").get<int>() != 1) throw ParseError("unsupported chain version");
    Chain chain;
    for (const auto& jb : doc.at("blocks")) {
      Block b;
      b.height = jb.at("height").get<std::uint64_t>();
      b.prev_hash = fixed_from_hex<32>(jb.at("prev_hash").get<std::string>());
      b.merkle_root = fixed_from_hex<32>(jb.at("merkle_root").get<std::string>());
      b.timestamp = jb.at("timestamp").get<std::uint64_t>();
      b.slot_label = jb.at("slot").get<std::string>();
      b.hash = fixed_from_hex<32>(jb.at("hash").get<std::string>());
      for (const auto& k : jb.at("key_sets")) b.key_sets.push_back(from_hex(k.get<std::string>()));
      for (const auto& jr : jb.at("records")) {
        ReportRecord r;
        r.meter_id = jr.at("meter_id").get<std::uint32_t>();
        r.cipher = fixed_from_hex<40>(jr.at("cipher").get<std::string>());
        r.ts_label = jr.at("ts").get<std::string>();
        r.dw_ref = fixed_from_hex<32>(jr.at("dw_ref").get<std::string>());
        r.sig = fixed_from_hex<40>(jr.at("sig").get<std::string>());
        r.pk = fixed_from_hex<40>(jr.at("pk").get<std::string>());
        b.records.push_back(std::move(r));
      }
      chain.push_back(std::move(b));
    }
    return chain;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed chain file: ") + e.what());
  } catch (const DecodeError& e) {
    throw ParseError(std::string("malformed chain file: ") + e.what());
  }
}

}  // namespace gridtrust::ledger
