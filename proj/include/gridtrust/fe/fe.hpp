#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridtrust/crypto/codec.hpp"
#include "gridtrust/crypto/group.hpp"

namespace gridtrust::fe {

using crypto::PlainPoint;
using crypto::ScalarPair;

/// Domain label passed to hash_to_point_pair for reporting slots.
inline constexpr std::string_view kTimestampDomain = "TS";

/// TS_t = H1(T_t), a pair of plain points derived from a slot label, with
/// comb tables so that s^T TS_t is cheap for every meter in an area.
class TimestampPoints {
 public:
  /// Derives the pair for a slot label such as "2009-07-15T00:30".
  /// `precompute` builds comb tables (about 2000 point additions), worth it
  /// when many meters share the slot.
  static TimestampPoints derive(const std::string& period_label, bool precompute = true);

  const std::string& label() const { return label_; }
  const PlainPoint& point(std::size_t i) const { return pts_[i]; }

  /// s^T TS_t = s0 TS0 + s1 TS1, normalized.
  PlainPoint mask_point(const ScalarPair& s) const;

  /// Both encodings, 80 bytes.
  std::array<std::uint8_t, 80> to_bytes() const;

 private:
  struct Tables;
  std::string label_;
  std::array<PlainPoint, 2> pts_;
  std::shared_ptr<const Tables> tables_;
};

struct CipherReading {
  PlainPoint c;

  crypto::PointBytes to_bytes() const { return c.to_bytes(); }
  static CipherReading from_bytes(std::span<const std::uint8_t> bytes) {
    return {PlainPoint::from_bytes(bytes)};
  }
  friend bool operator==(const CipherReading&, const CipherReading&) = default;
};

/// d x n integer weight matrix of the first dense layer (row-major, entry
/// (t, c) at t * n + c) with its public real bias.
class QuantizedFirstLayer {
 public:
  static constexpr std::int64_t kMaxAbsWeight = (std::int64_t{1} << 16) - 1;

  /// ShapeError unless n < d and sizes agree; RangeError for |w| >= 2^16.
  QuantizedFirstLayer(std::size_t d, std::size_t n, std::vector<std::int64_t> w, std::vector<double> bias,
                      crypto::FixedPointCodec codec = crypto::FixedPointCodec());

  /// Quantizes real weights with the codec and keeps the originals for the
  /// full-precision path.
  static QuantizedFirstLayer from_real(std::size_t d, std::size_t n, const std::vector<double>& w_real,
                                       std::vector<double> bias,
                                       crypto::FixedPointCodec codec = crypto::FixedPointCodec());

  /// Copy carrying unquantized weights for the full-precision path; the
  /// quantized weights are kept as they are. ShapeError on a size mismatch.
  QuantizedFirstLayer with_real_weights(std::vector<double> w_real) const;

  std::size_t d() const { return d_; }
  std::size_t n() const { return n_; }
  std::int64_t w(std::size_t t, std::size_t c) const { return w_[t * n_ + c]; }
  const std::vector<std::int64_t>& weights() const { return w_; }
  const std::vector<double>& bias() const { return bias_; }
  const crypto::FixedPointCodec& codec() const { return codec_; }
  /// Unquantized weights when the layer was built from reals.
  const std::optional<std::vector<double>>& w_real() const { return w_real_; }

  std::vector<std::int64_t> column(std::size_t c) const;
  std::int64_t max_abs_weight() const;

 private:
  std::size_t d_;
  std::size_t n_;
  std::vector<std::int64_t> w_;
  std::vector<double> bias_;
  crypto::FixedPointCodec codec_;
  std::optional<std::vector<double>> w_real_;
};

/// DW_c for each output neuron c over one detection period of d slots.
struct DetectionKeySet {
  std::vector<PlainPoint> dw;
  std::vector<std::string> period;
};

/// C = s^T TS + r g. RangeError when |r| exceeds the codec's reading range.
CipherReading encrypt_reading(const ScalarPair& s, const TimestampPoints& ts, std::int64_t reading,
                              const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

/// Same, reusing a precomputed mask point U = s^T TS.
CipherReading encrypt_with_mask(const PlainPoint& mask, std::int64_t reading,
                                const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

/// sum(C_i) - DA^T TS; equals (sum r_i) g for honest inputs.
PlainPoint aggregate_residual(std::span<const CipherReading> ciphers, const ScalarPair& da,
                              const TimestampPoints& ts);

/// Sum of the readings in [0, bound]; DlogNotFound otherwise.
std::int64_t decrypt_aggregate(std::span<const CipherReading> ciphers, const ScalarPair& da,
                               const TimestampPoints& ts, std::int64_t bound);

/// m * largest encoded reading.
std::int64_t aggregate_bound(std::size_t meters, const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

/// U_t = s^T TS_t for every slot of the period, normalized.
std::vector<PlainPoint> mask_points(const ScalarPair& s, std::span<const TimestampPoints> period);

/// DW_c = sum_t w_c[t] U_t. ShapeError when the period length is not d.
DetectionKeySet gen_detection_keys(const ScalarPair& s, const QuantizedFirstLayer& layer,
                                   std::span<const TimestampPoints> period);
DetectionKeySet gen_detection_keys_from_masks(std::span<const PlainPoint> masks, const QuantizedFirstLayer& layer,
                                              std::span<const TimestampPoints> period);

/// sum_t w[t] r[t] in [-bound, bound]; DlogNotFound otherwise.
std::int64_t decrypt_inner_product(std::span<const CipherReading> ciphers, std::span<const std::int64_t> w_col,
                                   const PlainPoint& dw_c, std::int64_t signed_bound);

/// d * max|w| * largest encoded reading.
std::int64_t inner_product_bound(const QuantizedFirstLayer& layer);

}  // namespace gridtrust::fe
