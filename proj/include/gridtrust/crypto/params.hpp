#pragma once

#include <string>

#include "gridtrust/crypto/codec.hpp"
#include "gridtrust/crypto/group.hpp"

namespace gridtrust::crypto {

/// Published public parameters: both groups, their common order, generators,
/// hash identifiers and the fixed-point scales.
struct SystemParams {
  std::string plain_group;
  std::string pairing_group;
  UInt<4> order_q;
  PlainPoint g;
  PairingPoint g2;
  std::string h1_label;
  std::string h2_label;
  FixedPointCodec codec;

  static SystemParams standard(const FixedPointCodec& codec = FixedPointCodec());

  /// Canonical structured-text form (JSON, sorted keys, fixed layout).
  std::string to_text() const;
  /// Throws DecodeError on unknown groups or mismatched constants.
  static SystemParams from_text(const std::string& text);
};

inline constexpr const char* kH1Label = "TS";
inline constexpr const char* kH2Label = "gridtrust/H2";

}  // namespace gridtrust::crypto
