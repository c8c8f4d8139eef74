#include "gridtrust/sim/judge.hpp"

#include <cmath>
#include <string>

#include "gridtrust/errors.hpp"

namespace gridtrust::sim {

Verdict judge_area(const JudgementInput& j) {
  return j.e_dtm > j.e_sum + j.e_tl + j.epsilon ? Verdict::kTheft : Verdict::kClear;
}

LossEstimate estimate_technical_loss(std::span<const std::pair<double, double>> history, std::size_t min_points) {
  if (min_points < 2) min_points = 2;
  if (history.size() < min_points) {
    throw InsufficientHistory("technical loss needs " + std::to_string(min_points) + " history points, got " +
                              std::to_string(history.size()));
  }
  double mean = 0;
  for (const auto& [dtm, sum] : history) mean += dtm - sum;
  mean /= static_cast<double>(history.size());
  double ss = 0;
  for (const auto& [dtm, sum] : history) ss += (dtm - sum - mean) * (dtm - sum - mean);
  const double sd = std::sqrt(ss / static_cast<double>(history.size() - 1));
  return {mean, 3.0 * sd};
}

AttackProbabilityParams AttackProbabilityParams::uniform(std::size_t m, double p_sm, double p_c, double p_k,
                                                         double p_mn) {
  return {std::vector<double>(m, p_sm), std::vector<double>(m, p_c), std::vector<double>(m, p_k), p_mn};
}

namespace {

double product(const std::vector<double>& ps, const char* name) {
  if (ps.empty()) throw RangeError(std::string(name) + " needs at least one meter");
  double acc = 1.0;
  for (double p : ps) {
    if (!(p > 0.0 && p < 1.0)) throw RangeError(std::string(name) + " must lie in (0, 1)");
    acc *= p;
  }
  return acc;
}

}  // namespace

double attack_success_probability(AttackScenario scenario, AttackStage stage, const AttackProbabilityParams& p) {
  const std::size_t m = p.p_sm.size();
  if (p.p_c.size() != m || p.p_k.size() != m) throw RangeError("probability vectors must cover the same meters");
  if (scenario == AttackScenario::kDestroy) {
    switch (stage) {
      case AttackStage::kPre: return product(p.p_sm, "p_sm");
      case AttackStage::kTransit: return product(p.p_c, "p_c");
      case AttackStage::kReceived:
        if (!(p.p_mn > 0.0 && p.p_mn < 1.0)) throw RangeError("p_mn must lie in (0, 1)");
        return p.p_mn;
    }
  }
  switch (stage) {
    case AttackStage::kPre:
    case AttackStage::kReceived: return product(p.p_sm, "p_sm") * product(p.p_k, "p_k");
    case AttackStage::kTransit: return product(p.p_c, "p_c") * product(p.p_k, "p_k");
  }
  return 0.0;
}

}  // namespace gridtrust::sim
