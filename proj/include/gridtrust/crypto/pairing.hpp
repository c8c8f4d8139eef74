#pragma once

#include <span>
#include <utility>

#include "gridtrust/crypto/group.hpp"

namespace gridtrust::crypto {

/// F_p[i] / (i^2 + 1) over the pairing field.
struct Fp2 {
  PairingField re;
  PairingField im;

  static Fp2 one() { return {PairingField::one(), PairingField::zero()}; }

  friend bool operator==(const Fp2&, const Fp2&) = default;

  friend Fp2 operator*(const Fp2& a, const Fp2& b) {
    const PairingField t0 = a.re * b.re;
    const PairingField t1 = a.im * b.im;
    return {t0 - t1, (a.re + a.im) * (b.re + b.im) - t0 - t1};
  }

  Fp2 square() const { return {(re + im) * (re - im), (re * im).dbl()}; }
  Fp2 conj() const { return {re, -im}; }

  Fp2 inverse() const {
    const PairingField n = (re.square() + im.square()).inverse();
    return {re * n, -(im * n)};
  }
};

/// Element of the order-q target group.
using GtElement = Fp2;

/// Symmetric reduced Tate pairing e(P, phi(Q)) with the distortion map
/// phi(x, y) = (-x, i y). Bilinear and non-degenerate on the order-q subgroup.
GtElement pairing(const PairingPoint& p, const PairingPoint& q);

/// prod_i e(P_i, Q_i), sharing one final exponentiation.
GtElement multi_pairing(std::span<const std::pair<PairingPoint, PairingPoint>> pairs);

}  // namespace gridtrust::crypto
