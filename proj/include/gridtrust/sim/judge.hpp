#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gridtrust::sim {

/// Energy totals for one judgement period, in encoded reading units.
struct JudgementInput {
  double e_dtm = 0;
  double e_sum = 0;
  double e_tl = 0;
  double epsilon = 0;
};

enum class Verdict { kClear, kTheft };

/// Theft iff e_dtm > e_sum + e_tl + epsilon (strict).
Verdict judge_area(const JudgementInput& j);

struct LossEstimate {
  double e_tl = 0;
  double epsilon = 0;
};

inline constexpr std::size_t kDefaultMinHistory = 7;

/// e_tl = mean of (e_dtm - e_sum) over honest history, epsilon = 3 x sample
/// standard deviation. InsufficientHistory below `min_points` entries.
LossEstimate estimate_technical_loss(std::span<const std::pair<double, double>> history,
                                     std::size_t min_points = kDefaultMinHistory);

enum class AttackScenario { kDestroy = 1, kTamper = 2 };
enum class AttackStage { kPre, kTransit, kReceived };

/// Per-meter success probabilities; each vector holds one entry per meter.
struct AttackProbabilityParams {
  std::vector<double> p_sm;
  std::vector<double> p_c;
  std::vector<double> p_k;
  double p_mn = 0;

  /// Same probability for all m meters.
  static AttackProbabilityParams uniform(std::size_t m, double p_sm, double p_c, double p_k, double p_mn);
};

/// Success probability of an attack at a stage: scenario 1 (destroy) pre
/// prod p_sm, transit prod p_c, received p_mn; scenario 2 (tamper) pre and
/// received prod p_sm * prod p_k, transit prod p_c * prod p_k. RangeError for
/// probabilities outside (0, 1) or vectors of unequal length.
double attack_success_probability(AttackScenario scenario, AttackStage stage, const AttackProbabilityParams& p);

}  // namespace gridtrust::sim
