#include "gridtrust/crypto/group.hpp"

#include <string>

#include "gridtrust/bytes.hpp"

namespace gridtrust::crypto {

Scalar scalar_from_signed(std::int64_t v) {
  if (v >= 0) return Scalar::from_u64(static_cast<std::uint64_t>(v));
  return -Scalar::from_u64(static_cast<std::uint64_t>(0) - static_cast<std::uint64_t>(v));
}

Scalar random_scalar(Rng& rng, bool nonzero) {
  for (;;) {
    std::array<std::uint8_t, 64> wide{};
    for (std::size_t i = 0; i < wide.size(); i += 8) {
      const std::uint64_t w = rng.next_u64();
      for (std::size_t k = 0; k < 8; ++k) wide[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
    }
    const Scalar s = Scalar::from_wide_bytes(wide);
    if (!nonzero || !s.is_zero()) return s;
  }
}

Scalar hash_to_scalar(std::string_view label, std::span<const std::uint8_t> msg) {
  return Scalar::from_wide_bytes(expand_wide(label, 0, msg));
}

ScalarBytes scalar_to_bytes(const Scalar& s) {
  ScalarBytes out{};
  s.to_int().to_be_bytes(out);
  return out;
}

Scalar scalar_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 32) throw DecodeError("scalar encoding must be 32 bytes");
  const auto s = Scalar::from_canonical(UInt<4>::from_be_bytes(bytes));
  if (!s) throw DecodeError("scalar encoding not reduced mod q");
  return *s;
}

const PlainPoint& plain_generator() {
  static const PlainPoint g = PlainPoint::hash_to_curve("gridtrust/generator/plain", {});
  return g;
}

const PairingPoint& pairing_generator() {
  static const PairingPoint g = PairingPoint::hash_to_curve("gridtrust/generator/pairing", {});
  return g;
}

const FixedBaseTable<PlainCurve>& plain_generator_table() {
  static const FixedBaseTable<PlainCurve> table(plain_generator());
  return table;
}

std::pair<PlainPoint, PlainPoint> hash_to_point_pair(std::string_view domain_label, std::string_view timestamp) {
  if (timestamp.empty()) throw MisuseError("timestamp must be non-empty");
  const std::string base = "gridtrust/H1/" + std::string(domain_label);
  return {PlainPoint::hash_to_curve(base + "/0", as_bytes(timestamp)),
          PlainPoint::hash_to_curve(base + "/1", as_bytes(timestamp))};
}

PlainPoint inner_point(const ScalarPair& s, const PlainPoint& p0, const PlainPoint& p1) {
  const std::array<PlainPoint, 2> pts{p0, p1};
  const std::array<UInt<4>, 2> ks{s[0].to_int(), s[1].to_int()};
  return PlainPoint::multi_mul<4>(pts, ks);
}

}  // namespace gridtrust::crypto
