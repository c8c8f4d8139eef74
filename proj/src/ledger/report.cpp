#include "gridtrust/ledger/report.hpp"

#include "gridtrust/errors.hpp"

namespace gridtrust::ledger {

Bytes encode_key_set(const fe::DetectionKeySet& keys) {
  Bytes out;
  out.reserve(keys.dw.size() * crypto::kPointBytes);
  for (const auto& p : keys.dw) append(out, p.to_bytes());
  return out;
}

std::vector<crypto::PlainPoint> decode_key_set(std::span<const std::uint8_t> bytes) {
  if (bytes.empty() || bytes.size() % crypto::kPointBytes != 0) {
    throw DecodeError("key set length is not a positive multiple of 40");
  }
  std::vector<crypto::PlainPoint> out;
  for (std::size_t off = 0; off < bytes.size(); off += crypto::kPointBytes) {
    out.push_back(crypto::PlainPoint::from_bytes(bytes.subspan(off, crypto::kPointBytes)));
  }
  return out;
}

Digest key_set_digest(std::span<const std::uint8_t> encoded) {
  return crypto::Sha256().update("gridtrust/dw").update(encoded).finish();
}

Bytes Report::signed_message() const {
  Bytes m;
  m.reserve(cipher.size() + ts.size() + dw.size() + pk.size());
  append(m, cipher);
  append(m, ts);
  append(m, dw);
  append(m, pk);
  return m;
}

Bytes Report::serialize() const {
  Bytes m;
  append(m, cipher);
  append(m, ts);
  append(m, dw);
  append(m, sig);
  append(m, pk);
  return m;
}

Report make_report(const bls::SigningKey& sk, const fe::CipherReading& cipher, const fe::TimestampPoints& ts,
                   const Bytes& dw_encoded) {
  Report r;
  r.cipher = cipher.to_bytes();
  r.ts = ts.to_bytes();
  r.dw = dw_encoded;
  r.pk = bls::verify_key(sk).to_bytes();
  r.sig = bls::sign(sk, r.signed_message()).to_bytes();
  return r;
}

Bytes ReportRecord::canonical_bytes() const {
  Bytes out;
  append_u32(out, meter_id);
  append(out, cipher);
  append_u32(out, static_cast<std::uint32_t>(ts_label.size()));
  append(out, as_bytes(ts_label));
  append(out, dw_ref);
  append(out, sig);
  append(out, pk);
  return out;
}

ReportRecord to_record(std::uint32_t meter_id, const Report& report, const std::string& ts_label) {
  ReportRecord rec;
  rec.meter_id = meter_id;
  rec.cipher = report.cipher;
  rec.ts_label = ts_label;
  rec.dw_ref = key_set_digest(report.dw);
  rec.sig = report.sig;
  rec.pk = report.pk;
  return rec;
}

}  // namespace gridtrust::ledger
