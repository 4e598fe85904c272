#pragma once

#include <cstddef>
#include <vector>

#include "corrvote/correspondence.hpp"
#include "corrvote/geometry.hpp"
#include "corrvote/otsu.hpp"
#include "corrvote/voting.hpp"

namespace corrvote {

// What to do when every final score is identical and no Otsu threshold
// exists (e.g. a perfectly consistent self-match, or pure noise).
enum class DegeneratePolicy { kAcceptAll, kRejectAll };

struct PipelineOptions {
  VotingParams voting;                 // delta == 0 resolves to 5 x scene resolution
  std::size_t histogram_bins = 100;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::kAcceptAll;
  unsigned threads = 1;
};

struct PipelineResult {
  VotingResult voting;
  std::vector<std::size_t> ranking;    // by s_final, deterministic tie-break
  double scene_resolution = 0.0;
  double delta = 0.0;                  // the tolerance actually used
  double decision_threshold = 0.0;
  bool degenerate_threshold = false;   // Otsu had no separable structure
  std::vector<char> accepted;          // s_final >= decision threshold
  std::size_t accepted_count = 0;
};

// Ratio scores -> local stage -> global stage -> Otsu decision.
// Correspondences may come from match_features or from an external file.
PipelineResult run_vote_pipeline(const CorrespondenceSet& cs, const PointCloud& object,
                                 const PointCloud& scene,
                                 const std::vector<LocalReferenceFrame>& object_frames,
                                 const std::vector<LocalReferenceFrame>& scene_frames,
                                 const PipelineOptions& options);

}  // namespace corrvote
