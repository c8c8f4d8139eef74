#include "gridtrust/detect/metrics.hpp"

#include <string>

#include "gridtrust/errors.hpp"

namespace gridtrust::detect {

namespace {

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  Metrics m{tp, fp, tn, fn, 0, 0, 0, 0};
  m.dr = ratio(tp, tp + fn);
  m.fa = ratio(fp, tn + fp);
  m.hd = m.dr - m.fa;
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  return m;
}

Metrics evaluate(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw LengthMismatch("predictions (" + std::to_string(predictions.size()) + ") and labels (" +
                         std::to_string(labels.size()) + ") differ in length");
  }
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int l = labels[i];
    if ((p != 0 && p != 1) || (l != 0 && l != 1)) throw RangeError("predictions and labels must be 0 or 1");
    if (p == 1 && l == 1) ++tp;
    else if (p == 1) ++fp;
    else if (l == 1) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

}  // namespace gridtrust::detect
