#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridtrust/crypto/codec.hpp"
#include "gridtrust/rng.hpp"
#include "gridtrust/sim/readings.hpp"

namespace gridtrust::sim {

enum class AttackKind { kF1 = 1, kF2, kF3, kF4, kF5, kF6 };

std::string to_string(AttackKind kind);
/// "f1".."f6"; ParseError otherwise.
AttackKind attack_kind_from_string(const std::string& name);

/// Parameters of one theft pattern applied to a meter-day x_1..x_d:
///   f1  alpha x_t            f2  beta_t x_t
///   f3  mean(x)              f4  beta_t mean(x)
///   f5  x_{d+1-t}            f6  0 when ts < t < te (1-based t), else x_t
struct AttackSpec {
  AttackKind kind = AttackKind::kF1;
  double alpha = 0.5;
  std::vector<double> beta;  // one factor per slot (f2, f4)
  int ts = 0;
  int te = 0;
};

/// Draws parameters: alpha, beta_t uniform in (0.1, 0.8); ts uniform in
/// [0, 42]; te - ts uniform in [6, 48].
AttackSpec random_attack_spec(AttackKind kind, std::size_t slots, Rng& rng);

/// Applies the pattern in kWh and re-encodes with the codec (half away from
/// zero). ShapeError when beta has the wrong length.
ReadingSeries apply_attack(const AttackSpec& spec, const ReadingSeries& x,
                           const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

}  // namespace gridtrust::sim
