#include "gridtrust/sim/accounting.hpp"

#include <numeric>

#include "gridtrust/errors.hpp"

namespace gridtrust::sim {

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational report_size_bytes(std::uint64_t n_dw, AccountingMode mode, std::uint64_t period_slots) {
  if (n_dw == 0) throw MisuseError("a report carries at least one DW key");
  if (period_slots == 0) throw MisuseError("a period has at least one slot");
  constexpr std::uint64_t kPoint = 40;
  const std::uint64_t fixed = kPoint + 2 * kPoint + kPoint + kPoint;
  const std::uint64_t dw = kPoint * n_dw;
  if (mode == AccountingMode::kPerReport) return {fixed + dw, 1};
  const std::uint64_t num = fixed * period_slots + dw;
  const std::uint64_t g = std::gcd(num, period_slots);
  return {num / g, period_slots / g};
}

}  // namespace gridtrust::sim
