#include "gridtrust/crypto/codec.hpp"

#include <cmath>
#include <string>

#include "gridtrust/errors.hpp"

namespace gridtrust::crypto {

FixedPointCodec::FixedPointCodec(std::int64_t reading_scale, int weight_scale_bits)
    : reading_scale_(reading_scale), weight_scale_bits_(weight_scale_bits), fraction_digits_(0) {
  std::int64_t s = reading_scale;
  while (s > 1 && s % 10 == 0) {
    s /= 10;
    ++fraction_digits_;
  }
  if (reading_scale < 1 || s != 1 || fraction_digits_ > 6) {
    throw RangeError("reading_scale must be a power of ten between 1 and 10^6");
  }
  if (weight_scale_bits < 0 || weight_scale_bits > 20) {
    throw RangeError("weight_scale_bits must lie in [0, 20]");
  }
}

std::int64_t FixedPointCodec::encode_reading(double kwh) const {
  if (!std::isfinite(kwh) || std::fabs(kwh) > kMaxReadingKwh) {
    throw RangeError("reading " + std::to_string(kwh) + " kWh outside +-65 kWh per slot");
  }
  return std::llround(kwh * static_cast<double>(reading_scale_));
}

double FixedPointCodec::decode_reading(std::int64_t encoded) const {
  return static_cast<double>(encoded) / static_cast<double>(reading_scale_);
}

std::int64_t FixedPointCodec::max_encoded_reading() const {
  return static_cast<std::int64_t>(kMaxReadingKwh) * reading_scale_;
}

std::int64_t FixedPointCodec::parse_reading(std::string_view text) const {
  const std::string original(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) throw RangeError("empty reading");
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) throw RangeError("malformed reading '" + original + "'");
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw RangeError("malformed reading '" + original + "'");
    any_digit = true;
    if (!seen_point) {
      whole = whole * 10 + (c - '0');
      if (whole > 1'000'000) throw RangeError("reading '" + original + "' outside +-65 kWh per slot");
    } else {
      if (++digits > fraction_digits_) throw RangeError("reading '" + original + "' has too many fraction digits");
      frac = frac * 10 + (c - '0');
    }
  }
  if (!any_digit) throw RangeError("malformed reading '" + original + "'");
  for (int d = digits; d < fraction_digits_; ++d) frac *= 10;
  const std::int64_t value = whole * reading_scale_ + frac;
  if (value > max_encoded_reading()) throw RangeError("reading '" + original + "' outside +-65 kWh per slot");
  return negative ? -value : value;
}

std::int64_t FixedPointCodec::encode_weight(double w) const {
  if (!std::isfinite(w) || std::fabs(w) >= kWeightLimit) {
    throw RangeError("weight " + std::to_string(w) + " outside (-32, 32)");
  }
  return std::llround(std::ldexp(w, weight_scale_bits_));
}

double FixedPointCodec::decode_weight(std::int64_t encoded) const {
  return std::ldexp(static_cast<double>(encoded), -weight_scale_bits_);
}

}  // namespace gridtrust::crypto
