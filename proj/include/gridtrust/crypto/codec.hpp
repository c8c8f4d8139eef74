#pragma once

#include <cstdint>
#include <string_view>

namespace gridtrust::crypto {

/// Fixed-point bridge between real-valued readings/weights and Z_q.
///
/// Readings are kWh per slot scaled by a power of ten (default 1000, i.e.
/// watt-hours); weights are scaled by 2^weight_scale_bits (default 2^10).
/// Rounding is half away from zero.
class FixedPointCodec {
 public:
  static constexpr double kMaxReadingKwh = 65.0;
  static constexpr double kWeightLimit = 32.0;  // |w| < 2^5

  explicit FixedPointCodec(std::int64_t reading_scale = 1000, int weight_scale_bits = 10);

  std::int64_t encode_reading(double kwh) const;
  double decode_reading(std::int64_t encoded) const;

  /// Exact parse of a decimal such as "1.234"; at most log10(reading_scale)
  /// fraction digits.
  std::int64_t parse_reading(std::string_view decimal) const;

  std::int64_t encode_weight(double w) const;
  double decode_weight(std::int64_t encoded) const;

  std::int64_t reading_scale() const { return reading_scale_; }
  int weight_scale_bits() const { return weight_scale_bits_; }
  std::int64_t weight_scale() const { return std::int64_t{1} << weight_scale_bits_; }
  /// Largest encoded reading accepted by encode_reading.
  std::int64_t max_encoded_reading() const;
  /// reading_scale * 2^weight_scale_bits: divides an encoded inner product
  /// back to real units.
  double product_scale() const { return static_cast<double>(reading_scale_) * static_cast<double>(weight_scale()); }

  friend bool operator==(const FixedPointCodec&, const FixedPointCodec&) = default;

 private:
  std::int64_t reading_scale_;
  int weight_scale_bits_;
  int fraction_digits_;
};

}  // namespace gridtrust::crypto
