#include "corrvote/otsu.hpp"

#include <algorithm>
#include <cmath>

namespace corrvote {

std::size_t ScoreHistogram::bin_of(double score, std::size_t bin_count) {
  const double b = static_cast<double>(bin_count);
  auto edge = [&](std::size_t i) { return static_cast<double>(i) / b; };

  std::size_t bin = static_cast<std::size_t>(
      std::clamp(std::floor(score * b), 0.0, static_cast<double>(bin_count - 1)));
  // Repair rounding at the edges: the product above can land one bin off
  // when the score sits exactly on a boundary value.
  while (bin + 1 < bin_count && score >= edge(bin + 1)) ++bin;
  while (bin > 0 && score < edge(bin)) --bin;
  return bin;
}

ScoreHistogram ScoreHistogram::build(std::span<const double> scores,
                                     std::size_t bin_count) {
  if (bin_count < 2) {
    throw std::invalid_argument("otsu: need at least 2 bins");
  }
  ScoreHistogram h;
  h.bins.assign(bin_count, 0);
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("otsu: scores must lie in [0, 1]");
    }
    ++h.bins[bin_of(s, bin_count)];
    ++h.total;
  }
  return h;
}

OtsuResult otsu_threshold_full(std::span<const double> scores, std::size_t bin_count) {
  if (scores.size() < 2) {
    throw std::invalid_argument("otsu: need at least 2 scores");
  }
  bool all_identical = true;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] != scores[0]) {
      all_identical = false;
      break;
    }
  }
  if (all_identical) {
    throw DegenerateScoresError("otsu: all scores identical, no threshold exists");
  }

  const ScoreHistogram h = ScoreHistogram::build(scores, bin_count);
  const std::size_t b = h.bins.size();

  // Integer accumulators keep the variance comparison exact: the class
  // weights and index sums are integers, so equal-variance ties (and the
  // bin-shift invariance of the argmax) hold without rounding surprises.
  std::int64_t total_weight = h.total;
  std::int64_t total_index_sum = 0;
  for (std::size_t i = 0; i < b; ++i) {
    total_index_sum += h.bins[i] * static_cast<std::int64_t>(i);
  }

  OtsuResult best;
  best.split_bin = 0;
  best.between_class_variance = -1.0;

  std::int64_t w0 = 0;
  std::int64_t a0 = 0;
  for (std::size_t k = 0; k + 1 < b; ++k) {
    w0 += h.bins[k];
    a0 += h.bins[k] * static_cast<std::int64_t>(k);
    const std::int64_t w1 = total_weight - w0;
    const std::int64_t a1 = total_index_sum - a0;

    double variance = 0.0;
    if (w0 > 0 && w1 > 0) {
      // w0*w1*(mu0-mu1)^2 up to the constant 1/total^2 factor.
      const double d = static_cast<double>(a0 * w1 - a1 * w0);
      variance = d * d / (static_cast<double>(w0) * static_cast<double>(w1));
    }
    if (variance > best.between_class_variance) {
      best.between_class_variance = variance;
      best.split_bin = k;
    }
  }

  best.threshold = static_cast<double>(best.split_bin + 1) / static_cast<double>(b);
  return best;
}

}  // namespace corrvote
