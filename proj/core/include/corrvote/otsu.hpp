#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace corrvote {

// All scores identical: no threshold separates anything. Callers pick a
// fallback policy (accept all / reject all).
struct DegenerateScoresError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Histogram over [0, 1]: bin b covers [b/B, (b+1)/B), last bin closed.
struct ScoreHistogram {
  std::vector<std::int64_t> bins;
  std::int64_t total = 0;

  static ScoreHistogram build(std::span<const double> scores, std::size_t bin_count);

  // Bin membership decided by direct comparison against the b/B boundaries,
  // so a score exactly on a boundary always lands in the right-hand bin.
  static std::size_t bin_of(double score, std::size_t bin_count);
};

struct OtsuResult {
  double threshold = 0.0;      // left edge of the first accepted bin
  std::size_t split_bin = 0;   // last bin of the rejected class
  double between_class_variance = 0.0;
};

// Exhaustive search for the histogram boundary maximizing the between-class
// variance w0*w1*(mu0-mu1)^2; ties resolve to the lowest boundary. Downstream
// classification accepts scores >= threshold. Scores must lie in [0, 1].
// Throws std::invalid_argument for fewer than 2 scores and
// DegenerateScoresError when all scores are identical.
OtsuResult otsu_threshold_full(std::span<const double> scores,
                               std::size_t bin_count = 100);

inline double otsu_threshold(std::span<const double> scores,
                             std::size_t bin_count = 100) {
  return otsu_threshold_full(scores, bin_count).threshold;
}

}  // namespace corrvote
