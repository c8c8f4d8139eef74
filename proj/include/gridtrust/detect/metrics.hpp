#pragma once

#include <cstddef>
#include <span>

namespace gridtrust::detect {

/// Confusion counts with theft as the positive class, and the derived rates.
/// Rates with an empty denominator are 0.
struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double dr = 0;        // tp / (tp + fn)
  double fa = 0;        // fp / (tn + fp)
  double hd = 0;        // dr - fa
  double accuracy = 0;  // (tp + tn) / total
};

/// predictions and labels are 1 for theft, 0 for honest. LengthMismatch when
/// sizes differ; RangeError for values other than 0 and 1.
Metrics evaluate(std::span<const int> predictions, std::span<const int> labels);

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

}  // namespace gridtrust::detect
