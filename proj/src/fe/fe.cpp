#include "gridtrust/fe/fe.hpp"

#include <cmath>
#include <cstdlib>

#include "gridtrust/errors.hpp"
#include "gridtrust/fe/bsgs.hpp"

namespace gridtrust::fe {

using crypto::FixedBaseTable;
using crypto::PlainCurve;

struct TimestampPoints::Tables {
  std::array<FixedBaseTable<PlainCurve>, 2> comb;
};

TimestampPoints TimestampPoints::derive(const std::string& period_label, bool precompute) {
  TimestampPoints t;
  t.label_ = period_label;
  auto [p0, p1] = crypto::hash_to_point_pair(kTimestampDomain, period_label);
  t.pts_ = {p0, p1};
  if (precompute) {
    auto tables = std::make_shared<Tables>();
    tables->comb = {FixedBaseTable<PlainCurve>(p0), FixedBaseTable<PlainCurve>(p1)};
    t.tables_ = std::move(tables);
  }
  return t;
}

PlainPoint TimestampPoints::mask_point(const ScalarPair& s) const {
  if (tables_) return (tables_->comb[0].mul(s[0].to_int()) + tables_->comb[1].mul(s[1].to_int())).normalized();
  return crypto::inner_point(s, pts_[0], pts_[1]).normalized();
}

std::array<std::uint8_t, 80> TimestampPoints::to_bytes() const {
  std::array<std::uint8_t, 80> out{};
  const auto a = pts_[0].to_bytes();
  const auto b = pts_[1].to_bytes();
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(b.begin(), b.end(), out.begin() + 40);
  return out;
}

QuantizedFirstLayer::QuantizedFirstLayer(std::size_t d, std::size_t n, std::vector<std::int64_t> w,
                                         std::vector<double> bias, crypto::FixedPointCodec codec)
    : d_(d), n_(n), w_(std::move(w)), bias_(std::move(bias)), codec_(codec) {
  if (n_ == 0 || n_ >= d_) {
    throw ShapeError("first layer needs 0 < n < d (got d=" + std::to_string(d_) + ", n=" + std::to_string(n_) + ")");
  }
  if (w_.size() != d_ * n_) throw ShapeError("first layer weight count is not d*n");
  if (bias_.size() != n_) throw ShapeError("first layer bias length is not n");
  for (auto v : w_) {
    if (v > kMaxAbsWeight || v < -kMaxAbsWeight) throw RangeError("quantized weight magnitude must be below 2^16");
  }
  for (auto b : bias_) {
    if (!std::isfinite(b)) throw NonFiniteError("first layer bias is not finite");
  }
}

QuantizedFirstLayer QuantizedFirstLayer::from_real(std::size_t d, std::size_t n, const std::vector<double>& w_real,
                                                   std::vector<double> bias, crypto::FixedPointCodec codec) {
  std::vector<std::int64_t> w;
  w.reserve(w_real.size());
  for (double v : w_real) {
    if (!std::isfinite(v)) throw NonFiniteError("first layer weight is not finite");
    w.push_back(codec.encode_weight(v));
  }
  QuantizedFirstLayer layer(d, n, std::move(w), std::move(bias), codec);
  layer.w_real_ = w_real;
  return layer;
}

QuantizedFirstLayer QuantizedFirstLayer::with_real_weights(std::vector<double> w_real) const {
  if (w_real.size() != d_ * n_) throw ShapeError("real weight count is not d*n");
  for (double v : w_real) {
    if (!std::isfinite(v)) throw NonFiniteError("first layer weight is not finite");
  }
  QuantizedFirstLayer copy = *this;
  copy.w_real_ = std::move(w_real);
  return copy;
}

std::vector<std::int64_t> QuantizedFirstLayer::column(std::size_t c) const {
  if (c >= n_) throw ShapeError("column index out of range");
  std::vector<std::int64_t> col(d_);
  for (std::size_t t = 0; t < d_; ++t) col[t] = w(t, c);
  return col;
}

std::int64_t QuantizedFirstLayer::max_abs_weight() const {
  std::int64_t m = 0;
  for (auto v : w_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void check_reading(std::int64_t reading, const crypto::FixedPointCodec& codec) {
  const std::int64_t limit = codec.max_encoded_reading();
  if (reading > limit || reading < -limit) throw RangeError("encoded reading outside codec range");
}

}  // namespace

CipherReading encrypt_with_mask(const PlainPoint& mask, std::int64_t reading, const crypto::FixedPointCodec& codec) {
  check_reading(reading, codec);
  const PlainPoint rg = crypto::plain_generator_table().mul(crypto::scalar_from_signed(reading).to_int());
  return {(mask + rg).normalized()};
}

CipherReading encrypt_reading(const ScalarPair& s, const TimestampPoints& ts, std::int64_t reading,
                              const crypto::FixedPointCodec& codec) {
  check_reading(reading, codec);
  return encrypt_with_mask(ts.mask_point(s), reading, codec);
}

PlainPoint aggregate_residual(std::span<const CipherReading> ciphers, const ScalarPair& da,
                              const TimestampPoints& ts) {
  PlainPoint sum;
  for (const auto& c : ciphers) sum += c.c;
  return sum - ts.mask_point(da);
}

std::int64_t decrypt_aggregate(std::span<const CipherReading> ciphers, const ScalarPair& da,
                               const TimestampPoints& ts, std::int64_t bound) {
  if (bound < 0) throw RangeError("aggregate bound must be non-negative");
  return bsgs_dlog(aggregate_residual(ciphers, da, ts), crypto::plain_generator(), 0, bound);
}

std::int64_t aggregate_bound(std::size_t meters, const crypto::FixedPointCodec& codec) {
  return static_cast<std::int64_t>(meters) * codec.max_encoded_reading();
}

std::vector<PlainPoint> mask_points(const ScalarPair& s, std::span<const TimestampPoints> period) {
  std::vector<PlainPoint> out;
  out.reserve(period.size());
  for (const auto& ts : period) out.push_back(ts.mask_point(s));
  return out;
}

DetectionKeySet gen_detection_keys_from_masks(std::span<const PlainPoint> masks, const QuantizedFirstLayer& layer,
                                              std::span<const TimestampPoints> period) {
  if (masks.size() != layer.d() || period.size() != layer.d()) {
    throw ShapeError("detection period has " + std::to_string(period.size()) + " slots, layer expects " +
                     std::to_string(layer.d()));
  }
  DetectionKeySet keys;
  keys.dw.reserve(layer.n());
  for (std::size_t c = 0; c < layer.n(); ++c) {
    const auto col = layer.column(c);
    keys.dw.push_back(PlainPoint::small_multi_mul(masks, col).normalized());
  }
  for (const auto& ts : period) keys.period.push_back(ts.label());
  return keys;
}

DetectionKeySet gen_detection_keys(const ScalarPair& s, const QuantizedFirstLayer& layer,
                                   std::span<const TimestampPoints> period) {
  if (period.size() != layer.d()) {
    throw ShapeError("detection period has " + std::to_string(period.size()) + " slots, layer expects " +
                     std::to_string(layer.d()));
  }
  const auto masks = mask_points(s, period);
  return gen_detection_keys_from_masks(masks, layer, period);
}

std::int64_t decrypt_inner_product(std::span<const CipherReading> ciphers, std::span<const std::int64_t> w_col,
                                   const PlainPoint& dw_c, std::int64_t signed_bound) {
  if (ciphers.size() != w_col.size()) throw ShapeError("cipher count differs from weight column length");
  if (signed_bound < 0) throw RangeError("inner-product bound must be non-negative");
  std::vector<PlainPoint> pts;
  pts.reserve(ciphers.size());
  for (const auto& c : ciphers) pts.push_back(c.c);
  const PlainPoint target = PlainPoint::small_multi_mul(pts, w_col) - dw_c;
  return bsgs_dlog(target, crypto::plain_generator(), -signed_bound, signed_bound);
}

std::int64_t inner_product_bound(const QuantizedFirstLayer& layer) {
  return static_cast<std::int64_t>(layer.d()) * layer.max_abs_weight() * layer.codec().max_encoded_reading();
}

}  // namespace gridtrust::fe
