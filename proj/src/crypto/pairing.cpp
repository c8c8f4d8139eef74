#include "gridtrust/crypto/pairing.hpp"

namespace gridtrust::crypto {

namespace {

// Vertical lines and the common F_p factors of every line value vanish under
// the final exponentiation, so lines are scaled to stay division-free.
Fp2 miller_loop(const PairingPoint& p, const PairingPoint& q) {
  if (p.is_identity() || q.is_identity()) return Fp2::one();
  const auto pa = p.affine();
  const auto qa = q.affine();
  const PairingField& xp = pa->first;
  const PairingField& yp = pa->second;
  const PairingField& xq = qa->first;
  const PairingField& yq = qa->second;

  PairingField tx = xp;
  PairingField ty = yp;
  PairingField tz = PairingField::one();
  Fp2 f = Fp2::one();

  const auto& order = PairingCurve::kOrder;
  for (std::size_t bit = order.bit_length() - 1; bit-- > 0;) {
    // Doubling step with the tangent at T.
    const PairingField xx = tx.square();
    const PairingField yy = ty.square();
    const PairingField yyyy = yy.square();
    const PairingField zz = tz.square();
    const PairingField m = xx.dbl() + xx + zz.square();
    const PairingField s = ((tx + yy).square() - xx - yyyy).dbl();
    const PairingField nx = m.square() - s.dbl();
    const PairingField ny = m * (s - nx) - yyyy.dbl().dbl().dbl();
    const PairingField nz = (ty + tz).square() - yy - zz;
    const Fp2 line{m * (xq * zz + tx) - yy.dbl(), nz * zz * yq};
    f = f.square() * line;
    tx = nx;
    ty = ny;
    tz = nz;

    if (!order.bit(bit)) continue;
    // Addition step with the chord through T and P.
    const PairingField z1z1 = tz.square();
    const PairingField u2 = xp * z1z1;
    const PairingField s2 = yp * tz * z1z1;
    const PairingField h = u2 - tx;
    const PairingField r = (s2 - ty).dbl();
    if (h.is_zero()) {
      // T = -P: the chord is vertical and T + P is the identity (last bit only).
      continue;
    }
    const PairingField hh = h.square();
    const PairingField i = hh.dbl().dbl();
    const PairingField j = h * i;
    const PairingField v = tx * i;
    const PairingField ax = r.square() - j - v.dbl();
    const PairingField ay = r * (v - ax) - (ty * j).dbl();
    const PairingField az = (tz + h).square() - z1z1 - hh;
    const Fp2 chord{r * (xq + xp) - yp * az, yq * az};
    f = f * chord;
    tx = ax;
    ty = ay;
    tz = az;
  }
  return f;
}

Fp2 pow_small(const Fp2& base, std::uint64_t e) {
  Fp2 acc = Fp2::one();
  for (int bit = 63; bit >= 0; --bit) {
    acc = acc.square();
    if ((e >> bit) & 1U) acc = acc * base;
  }
  return acc;
}

// f^((p^2 - 1) / q) = (f^(p - 1))^h, with f^p = conj(f).
Fp2 final_exponentiation(const Fp2& f) {
  const Fp2 unitary = f.conj() * f.inverse();
  return pow_small(unitary, PairingCurve::kCofactor);
}

}  // namespace

GtElement pairing(const PairingPoint& p, const PairingPoint& q) {
  return final_exponentiation(miller_loop(p, q));
}

GtElement multi_pairing(std::span<const std::pair<PairingPoint, PairingPoint>> pairs) {
  Fp2 acc = Fp2::one();
  for (const auto& [p, q] : pairs) acc = acc * miller_loop(p, q);
  return final_exponentiation(acc);
}

}  // namespace gridtrust::crypto
