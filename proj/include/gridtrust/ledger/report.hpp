#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridtrust/bls/bls.hpp"
#include "gridtrust/bytes.hpp"
#include "gridtrust/crypto/curve.hpp"
#include "gridtrust/crypto/hash.hpp"
#include "gridtrust/fe/fe.hpp"

namespace gridtrust::ledger {

using crypto::Digest;
using crypto::PointBytes;
using TimestampBytes = std::array<std::uint8_t, 80>;

/// Concatenated DW encodings, n * 40 bytes.
Bytes encode_key_set(const fe::DetectionKeySet& keys);
/// DecodeError unless the length is a positive multiple of 40 and every point decodes.
std::vector<crypto::PlainPoint> decode_key_set(std::span<const std::uint8_t> bytes);
Digest key_set_digest(std::span<const std::uint8_t> encoded);

/// What a meter sends per slot: C || TS || DW || sigma || PK.
struct Report {
  PointBytes cipher{};
  TimestampBytes ts{};
  Bytes dw;  // n * 40
  PointBytes sig{};
  PointBytes pk{};

  /// C || TS || DW || PK, the signed message.
  Bytes signed_message() const;
  /// Wire form in field order; 600 bytes when n = 10.
  Bytes serialize() const;
};

/// Signs C || TS || DW || PK with the meter's key.
Report make_report(const bls::SigningKey& sk, const fe::CipherReading& cipher, const fe::TimestampPoints& ts,
                   const Bytes& dw_encoded);

/// Ledger entry for one report. The DW set is referenced by digest; the full
/// set lives once per period in a block's key sets.
struct ReportRecord {
  std::uint32_t meter_id = 0;
  PointBytes cipher{};
  std::string ts_label;
  Digest dw_ref{};
  PointBytes sig{};
  PointBytes pk{};

  /// u32 id || C || u32 len || label || dw_ref || sigma || PK.
  Bytes canonical_bytes() const;

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

ReportRecord to_record(std::uint32_t meter_id, const Report& report, const std::string& ts_label);

}  // namespace gridtrust::ledger
