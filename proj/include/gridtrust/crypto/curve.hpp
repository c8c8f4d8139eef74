#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gridtrust/crypto/field.hpp"
#include "gridtrust/crypto/hash.hpp"
#include "gridtrust/crypto/uint.hpp"
#include "gridtrust/errors.hpp"

namespace gridtrust::crypto {

/// Compressed point encoding: one tag byte (0x00 identity, 0x02/0x03 for the
/// parity of y) followed by the x coordinate, 39 bytes big-endian.
inline constexpr std::size_t kPointBytes = 40;
using PointBytes = std::array<std::uint8_t, kPointBytes>;

/// Point on y^2 = x^3 + a x + b in Jacobian coordinates (Z = 0 is the identity).
///
/// Curve supplies: Field, kAIsOne (a in {0, 1}), b(), kCofactor, kOrder (the
/// prime subgroup order as UInt<4>).
template <class Curve>
class Point {
 public:
  using Field = typename Curve::Field;
  using Order = UInt<4>;

  Point() = default;

  static Point identity() { return Point(); }

  /// No on-curve check; callers own the invariant.
  static Point from_affine_unchecked(const Field& x, const Field& y) { return Point(x, y, Field::one()); }

  bool is_identity() const { return z_.is_zero(); }

  /// Affine (x, y); identity has no affine form.
  std::optional<std::pair<Field, Field>> affine() const {
    if (is_identity()) return std::nullopt;
    if (z_ == Field::one()) return std::make_pair(x_, y_);
    const Field zi = z_.inverse();
    const Field zi2 = zi.square();
    return std::make_pair(x_ * zi2, y_ * zi2 * zi);
  }

  Point normalized() const {
    auto a = affine();
    if (!a) return identity();
    return from_affine_unchecked(a->first, a->second);
  }

  bool is_normalized() const { return is_identity() || z_ == Field::one(); }

  const Field& jx() const { return x_; }
  const Field& jy() const { return y_; }
  const Field& jz() const { return z_; }

  static Point from_jacobian(const Field& x, const Field& y, const Field& z) { return Point(x, y, z); }

  bool is_on_curve() const {
    if (is_identity()) return true;
    // Y^2 = X^3 + a X Z^4 + b Z^6
    const Field z2 = z_.square();
    const Field z4 = z2.square();
    Field rhs = x_.square() * x_ + Curve::b() * z4 * z2;
    if constexpr (Curve::kAIsOne) rhs += x_ * z4;
    return y_.square() == rhs;
  }

  friend bool operator==(const Point& p, const Point& q) {
    if (p.is_identity() || q.is_identity()) return p.is_identity() && q.is_identity();
    const Field pz2 = p.z_.square();
    const Field qz2 = q.z_.square();
    if (p.x_ * qz2 != q.x_ * pz2) return false;
    return p.y_ * qz2 * q.z_ == q.y_ * pz2 * p.z_;
  }

  Point operator-() const { return Point(x_, -y_, z_); }

  Point dbl() const {
    if (is_identity()) return *this;
    const Field xx = x_.square();
    const Field yy = y_.square();
    const Field yyyy = yy.square();
    const Field zz = z_.square();
    const Field s = ((x_ + yy).square() - xx - yyyy).dbl();
    Field m = xx.dbl() + xx;
    if constexpr (Curve::kAIsOne) m += zz.square();
    const Field t = m.square() - s.dbl();
    Point r;
    r.x_ = t;
    r.y_ = m * (s - t) - yyyy.dbl().dbl().dbl();
    r.z_ = (y_ + z_).square() - yy - zz;
    return r;
  }

  friend Point operator+(const Point& p, const Point& q) {
    if (p.is_identity()) return q;
    if (q.is_identity()) return p;
    if (q.z_ == Field::one()) return p.add_mixed(q.x_, q.y_);
    if (p.z_ == Field::one()) return q.add_mixed(p.x_, p.y_);
    const Field z1z1 = p.z_.square();
    const Field z2z2 = q.z_.square();
    const Field u1 = p.x_ * z2z2;
    const Field u2 = q.x_ * z1z1;
    const Field s1 = p.y_ * q.z_ * z2z2;
    const Field s2 = q.y_ * p.z_ * z1z1;
    const Field h = u2 - u1;
    const Field r = (s2 - s1).dbl();
    if (h.is_zero()) return r.is_zero() ? p.dbl() : identity();
    const Field i = h.dbl().square();
    const Field j = h * i;
    const Field v = u1 * i;
    Point out;
    out.x_ = r.square() - j - v.dbl();
    out.y_ = r * (v - out.x_) - (s1 * j).dbl();
    out.z_ = ((p.z_ + q.z_).square() - z1z1 - z2z2) * h;
    return out;
  }

  friend Point operator-(const Point& p, const Point& q) { return p + (-q); }

  Point& operator+=(const Point& o) { return *this = *this + o; }
  Point& operator-=(const Point& o) { return *this = *this - o; }

  /// this + (x2, y2) with the second operand affine.
  Point add_mixed(const Field& x2, const Field& y2) const {
    if (is_identity()) return from_affine_unchecked(x2, y2);
    const Field z1z1 = z_.square();
    const Field u2 = x2 * z1z1;
    const Field s2 = y2 * z_ * z1z1;
    const Field h = u2 - x_;
    const Field r = (s2 - y_).dbl();
    if (h.is_zero()) return r.is_zero() ? dbl() : identity();
    const Field hh = h.square();
    const Field i = hh.dbl().dbl();
    const Field j = h * i;
    const Field v = x_ * i;
    Point out;
    out.x_ = r.square() - j - v.dbl();
    out.y_ = r * (v - out.x_) - (y_ * j).dbl();
    out.z_ = (z_ + h).square() - z1z1 - hh;
    return out;
  }

  template <std::size_t M>
  Point mul(const UInt<M>& k) const {
    if (is_identity() || k.is_zero()) return identity();
    std::array<Point, 16> table;
    table[1] = *this;
    for (std::size_t i = 2; i < table.size(); ++i) table[i] = table[i - 1] + *this;
    Point acc;
    const std::size_t top = (k.bit_length() + 3) / 4 * 4;
    for (std::size_t pos = top; pos >= 4; pos -= 4) {
      acc = acc.dbl().dbl().dbl().dbl();
      const unsigned w = k.window(pos - 4, 4);
      if (w != 0) acc += table[w];
    }
    return acc;
  }

  /// Signed small multiple.
  Point mul_signed(std::int64_t k) const {
    if (k < 0) return (-*this).mul(UInt<1>(static_cast<std::uint64_t>(0) - static_cast<std::uint64_t>(k)));
    return mul(UInt<1>(static_cast<std::uint64_t>(k)));
  }

  Point mul_cofactor() const {
    if constexpr (Curve::kCofactor == 1) return *this;
    else return mul(UInt<1>(Curve::kCofactor));
  }

  bool in_subgroup() const { return is_on_curve() && mul(Curve::kOrder).is_identity(); }

  /// Straus interleaving, 4-bit windows: sum_i k_i * P_i.
  template <std::size_t M>
  static Point multi_mul(std::span<const Point> points, std::span<const UInt<M>> scalars) {
    std::vector<std::array<Point, 16>> tables(points.size());
    std::size_t bits = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      tables[i][1] = points[i];
      for (std::size_t w = 2; w < 16; ++w) tables[i][w] = tables[i][w - 1] + points[i];
      bits = std::max(bits, scalars[i].bit_length());
    }
    Point acc;
    for (std::size_t pos = (bits + 3) / 4 * 4; pos >= 4; pos -= 4) {
      acc = acc.dbl().dbl().dbl().dbl();
      for (std::size_t i = 0; i < points.size(); ++i) {
        const unsigned w = scalars[i].window(pos - 4, 4);
        if (w != 0) acc += tables[i][w];
      }
    }
    return acc;
  }

  /// sum_i k_i * P_i for small signed k_i (|k_i| < 2^31), sharing doublings.
  static Point small_multi_mul(std::span<const Point> points, std::span<const std::int64_t> ks) {
    std::vector<Point> signed_pts(points.size());
    std::uint64_t max_abs = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      signed_pts[i] = ks[i] < 0 ? -points[i] : points[i];
      max_abs = std::max(max_abs, static_cast<std::uint64_t>(ks[i] < 0 ? -ks[i] : ks[i]));
    }
    Point acc;
    for (int bit = 63 - (max_abs == 0 ? 63 : __builtin_clzll(max_abs)); bit >= 0 && max_abs != 0; --bit) {
      acc = acc.dbl();
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto a = static_cast<std::uint64_t>(ks[i] < 0 ? -ks[i] : ks[i]);
        if ((a >> bit) & 1U) acc += signed_pts[i];
      }
    }
    return acc;
  }

  /// Sets every point to Z = 1 with a single field inversion.
  static void batch_normalize(std::span<Point> points) {
    std::vector<Field> zs;
    zs.reserve(points.size());
    for (const auto& p : points) zs.push_back(p.z_);
    Field::batch_inverse(zs);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].is_identity()) continue;
      const Field zi2 = zs[i].square();
      points[i].x_ *= zi2;
      points[i].y_ *= zi2 * zs[i];
      points[i].z_ = Field::one();
    }
  }

  PointBytes to_bytes() const {
    PointBytes out{};
    const auto a = affine();
    if (!a) return out;
    out[0] = a->second.is_odd() ? 0x03 : 0x02;
    a->first.to_int().to_be_bytes(std::span<std::uint8_t>(out).subspan(1));
    return out;
  }

  /// Canonical decoding: rejects non-canonical x, points off the curve and
  /// points outside the prime-order subgroup.
  static std::optional<Point> try_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kPointBytes) return std::nullopt;
    const std::uint8_t tag = bytes[0];
    const auto body = bytes.subspan(1);
    if (tag == 0x00) {
      for (auto b : body)
        if (b != 0) return std::nullopt;
      return identity();
    }
    if (tag != 0x02 && tag != 0x03) return std::nullopt;
    // The x coordinate must fit in Field::Int before the canonical check.
    const std::size_t spare = body.size() > Field::Int::kBytes ? body.size() - Field::Int::kBytes : 0;
    for (std::size_t i = 0; i < spare; ++i)
      if (body[i] != 0) return std::nullopt;
    const auto x = Field::from_canonical(Field::Int::from_be_bytes(body.subspan(spare)));
    if (!x) return std::nullopt;
    auto y = curve_rhs(*x).sqrt();
    if (!y) return std::nullopt;
    if (y->is_odd() != (tag == 0x03)) {
      if (y->is_zero()) return std::nullopt;
      *y = -*y;
    }
    Point p = from_affine_unchecked(*x, *y);
    if constexpr (Curve::kCofactor != 1) {
      if (!p.mul(Curve::kOrder).is_identity()) return std::nullopt;
    }
    return p;
  }

  static Point from_bytes(std::span<const std::uint8_t> bytes) {
    auto p = try_from_bytes(bytes);
    if (!p) throw DecodeError(std::string("invalid ") + std::string(Curve::kName) + " point encoding");
    return *p;
  }

  /// Try-and-increment hash onto the prime-order subgroup.
  static Point hash_to_curve(std::string_view label, std::span<const std::uint8_t> msg) {
    for (std::uint32_t counter = 0;; ++counter) {
      const auto wide = expand_wide(label, counter, msg);
      const Field x = Field::from_wide_bytes(wide);
      auto y = curve_rhs(x).sqrt();
      if (!y) continue;
      const bool want_odd = (Sha256().update_field(label).update_u32(counter).update_u8(2).update(msg).finish()[0] & 1U) != 0;
      if (y->is_odd() != want_odd) *y = -*y;
      const Point p = from_affine_unchecked(x, *y).mul_cofactor();
      if (!p.is_identity()) return p.normalized();
    }
  }

  static Field curve_rhs(const Field& x) {
    Field rhs = x.square() * x + Curve::b();
    if constexpr (Curve::kAIsOne) rhs += x;
    return rhs;
  }

 private:
  Point(const Field& x, const Field& y, const Field& z) : x_(x), y_(y), z_(z) {}

  Field x_{};
  Field y_ = Field::one();
  Field z_{};
};

/// Precomputed multiples d * 16^i * P (d = 1..8) in affine form. Scalars are
/// recoded into signed radix-16 digits in [-8, 8), so a multiple costs one
/// mixed addition per non-zero digit and no doublings.
template <class Curve>
class FixedBaseTable {
 public:
  using P = Point<Curve>;
  static constexpr std::size_t kWindows = 65;  // 256-bit scalars plus a carry digit
  static constexpr std::size_t kPerWindow = 8;

  FixedBaseTable() = default;

  explicit FixedBaseTable(const P& base) : entries_(kWindows * kPerWindow) {
    P row = base;
    for (std::size_t w = 0; w < kWindows; ++w) {
      P* e = &entries_[w * kPerWindow];
      e[0] = row;
      e[1] = row.dbl();
      e[2] = e[1] + row;
      e[3] = e[1].dbl();
      e[4] = e[3] + row;
      e[5] = e[2].dbl();
      e[6] = e[5] + row;
      e[7] = e[3].dbl();
      row = e[7].dbl();
    }
    P::batch_normalize(entries_);
  }

  bool empty() const { return entries_.empty(); }

  P mul(const UInt<4>& k) const {
    P acc;
    unsigned carry = 0;
    for (std::size_t w = 0; w < kWindows; ++w) {
      int d = static_cast<int>(k.window(4 * w, 4) + carry);
      carry = d >= 8 ? 1 : 0;
      if (carry) d -= 16;
      if (d == 0) continue;
      const P& e = entries_[w * kPerWindow + static_cast<std::size_t>(d > 0 ? d : -d) - 1];
      if (e.is_identity()) continue;
      acc = d > 0 ? acc.add_mixed(e.jx(), e.jy()) : acc.add_mixed(e.jx(), -e.jy());
    }
    return acc;
  }

 private:
  std::vector<P> entries_;
};

}  // namespace gridtrust::crypto
