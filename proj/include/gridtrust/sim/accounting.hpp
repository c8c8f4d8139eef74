#pragma once

#include <cstdint>
#include <string>

namespace gridtrust::sim {

/// Exact non-negative rational, always reduced.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class AccountingMode { kPerReport, kPerPeriod };

/// Bytes a meter sends per reading: cipher 40 + timestamp pair 80 + signature
/// 40 + key 40, plus 40 per DW key either with every report or amortized once
/// over the d reports of a period. MisuseError for n_dw == 0 or d == 0.
Rational report_size_bytes(std::uint64_t n_dw, AccountingMode mode, std::uint64_t period_slots = 48);

}  // namespace gridtrust::sim
