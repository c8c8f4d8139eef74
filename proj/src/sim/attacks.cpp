#include "gridtrust/sim/attacks.hpp"

#include "gridtrust/errors.hpp"

namespace gridtrust::sim {

std::string to_string(AttackKind kind) { return "f" + std::to_string(static_cast<int>(kind)); }

AttackKind attack_kind_from_string(const std::string& name) {
  if (name.size() == 2 && name[0] == 'f' && name[1] >= '1' && name[1] <= '6') {
    return static_cast<AttackKind>(name[1] - '0');
  }
  throw ParseError("unknown attack '" + name + "' (expected f1..f6)");
}

AttackSpec random_attack_spec(AttackKind kind, std::size_t slots, Rng& rng) {
  AttackSpec spec;
  spec.kind = kind;
  switch (kind) {
    case AttackKind::kF1:
      spec.alpha = rng.uniform(0.1, 0.8);
      break;
    case AttackKind::kF2:
    case AttackKind::kF4:
      spec.beta.resize(slots);
      for (auto& b : spec.beta) b = rng.uniform(0.1, 0.8);
      break;
    case AttackKind::kF6:
      spec.ts = static_cast<int>(rng.uniform_int(0, 42));
      spec.te = spec.ts + static_cast<int>(rng.uniform_int(6, 48));
      break;
    case AttackKind::kF3:
    case AttackKind::kF5:
      break;
  }
  return spec;
}

ReadingSeries apply_attack(const AttackSpec& spec, const ReadingSeries& x, const crypto::FixedPointCodec& codec) {
  const std::size_t d = x.readings.size();
  std::vector<double> kwh(d);
  double mean = 0;
  for (std::size_t t = 0; t < d; ++t) {
    kwh[t] = codec.decode_reading(x.readings[t]);
    mean += kwh[t];
  }
  if (d > 0) mean /= static_cast<double>(d);
  if ((spec.kind == AttackKind::kF2 || spec.kind == AttackKind::kF4) && spec.beta.size() != d) {
    throw ShapeError("attack needs one beta per slot");
  }

  ReadingSeries out = x;
  for (std::size_t t = 0; t < d; ++t) {
    double v = 0;
    switch (spec.kind) {
      case AttackKind::kF1: v = spec.alpha * kwh[t]; break;
      case AttackKind::kF2: v = spec.beta[t] * kwh[t]; break;
      case AttackKind::kF3: v = mean; break;
      case AttackKind::kF4: v = spec.beta[t] * mean; break;
      case AttackKind::kF5: v = kwh[d - 1 - t]; break;
      case AttackKind::kF6: {
        const int slot = static_cast<int>(t) + 1;
        v = (spec.ts < slot && slot < spec.te) ? 0.0 : kwh[t];
        break;
      }
    }
    out.readings[t] = codec.encode_reading(v);
  }
  return out;
}

}  // namespace gridtrust::sim
