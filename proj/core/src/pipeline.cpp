#include "corrvote/pipeline.hpp"

#include <stdexcept>

namespace corrvote {

PipelineResult run_vote_pipeline(const CorrespondenceSet& cs, const PointCloud& object,
                                 const PointCloud& scene,
                                 const std::vector<LocalReferenceFrame>& object_frames,
                                 const std::vector<LocalReferenceFrame>& scene_frames,
                                 const PipelineOptions& options) {
  if (object.empty() || scene.empty()) {
    throw std::invalid_argument("pipeline: clouds must be non-empty");
  }
  if (cs.empty()) {
    throw std::invalid_argument("pipeline: correspondence set is empty");
  }

  PipelineResult result;
  result.scene_resolution = estimate_resolution(scene);

  VotingParams params = options.voting;
  params.delta = params.delta > 0.0 ? params.delta : 5.0 * result.scene_resolution;
  result.delta = params.delta;

  result.voting = run_voting(cs, object, scene, object_frames, scene_frames, params,
                             options.threads);

  const std::vector<double> scores = final_scores(result.voting);
  result.ranking = rank_correspondences(cs, scores);

  try {
    result.decision_threshold = otsu_threshold(scores, options.histogram_bins);
  } catch (const DegenerateScoresError&) {
    result.degenerate_threshold = true;
    result.decision_threshold =
        options.degenerate_policy == DegeneratePolicy::kAcceptAll
            ? 0.0
            : 1.0 + 1e-9;  // above any reachable score
  }

  result.accepted.assign(cs.size(), 0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (scores[i] >= result.decision_threshold) {
      result.accepted[i] = 1;
      ++result.accepted_count;
    }
  }
  return result;
}

}  // namespace corrvote
