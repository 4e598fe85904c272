#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "corrvote/correspondence.hpp"
#include "corrvote/descriptor.hpp"
#include "corrvote/geometry.hpp"

namespace corrvote {

struct VotingParams {
  std::size_t kappa = 250;   // voter sample size
  double sigma_sim = 0.9;    // lower similarity bound, in [0, 1)
  double delta = 0.0;        // global distance tolerance, meters; must be
                             // resolved to > 0 before voting (default upstream:
                             // 5 x scene resolution)
  double t_ratio = 0.2;      // ratio-score threshold for stage-1 voters

  void validate() const;
};

// Per-correspondence outcome of both stages. Voter counts exclude the
// correspondence itself, so a perfectly consistent set can reach s_final = 1.
struct VoteTally {
  std::size_t local_voters = 0;   // |V_L(c)|
  std::size_t local_votes = 0;    // |Y_L(c)|
  std::size_t global_voters = 0;  // |V_G \ {c}|
  std::size_t global_votes = 0;   // |Y_G(c)|
  double s_ratio = 0.0;
  double s_local = 0.0;
  double s_final = 0.0;
};

struct VotingResult {
  std::vector<VoteTally> tallies;           // aligned with cs.items
  std::vector<std::size_t> global_voters;   // V_G: correspondence indices
  std::vector<char> ratio_mask;             // C_Ratio membership
};

// Pairwise invariant compatibility: min of the two distance ratios between
// the object-side and scene-side point pairs, in (0, 1]. Either distance
// being zero makes the pair degenerate and scores 0.
double local_compatibility(const Point3& obj1, const Point3& obj2,
                           const Point3& scene1, const Point3& scene2);

// Pose hypothesis of a correspondence from its two frames: the object->scene
// map taking RF-local coordinates at p to RF-local coordinates at p'.
// Both frames must be valid.
RigidTransform pose_from_correspondence(const LocalReferenceFrame& object_rf,
                                        const LocalReferenceFrame& scene_rf);

// Covariant compatibility: distance between the voter's object point
// transported by `pose` and the voter's scene point, meters.
double global_compatibility(const RigidTransform& pose, const Point3& voter_object,
                            const Point3& voter_scene);

// Stage 1: for each correspondence, voters are its kappa nearest
// object-point neighbors that carry correspondences (self excluded),
// intersected with the ratio set; votes need compatibility > sigma_sim.
// s_local = votes / voters, 0 for an empty voter set.
VotingResult local_voting_stage(const CorrespondenceSet& cs, const PointCloud& object,
                                const PointCloud& scene, const VotingParams& params,
                                unsigned threads = 1);

// Stage 2: voters are the kappa correspondences with the highest s_local
// (ties: s_ratio, then object_index), shared by all correspondences. A vote
// needs both the invariant constraint (> sigma_sim) and the covariant one
// (< delta) under the votee's own pose hypothesis. Votes accumulate:
// s_final = (local_votes + global_votes) / (local_voters + global_voters).
// Correspondences without a valid pose keep their stage-1 votes only.
void global_voting_stage(const CorrespondenceSet& cs, const PointCloud& object,
                         const PointCloud& scene,
                         const std::vector<LocalReferenceFrame>& object_frames,
                         const std::vector<LocalReferenceFrame>& scene_frames,
                         const VotingParams& params, VotingResult& result,
                         unsigned threads = 1);

// Both stages.
VotingResult run_voting(const CorrespondenceSet& cs, const PointCloud& object,
                        const PointCloud& scene,
                        const std::vector<LocalReferenceFrame>& object_frames,
                        const std::vector<LocalReferenceFrame>& scene_frames,
                        const VotingParams& params, unsigned threads = 1);

// Indices of cs.items sorted by descending score with the deterministic
// tie-break (score desc, s_ratio desc, object_index asc). `scores` must be
// aligned with cs.items.
std::vector<std::size_t> rank_correspondences(const CorrespondenceSet& cs,
                                              const std::vector<double>& scores);

inline std::vector<double> final_scores(const VotingResult& r) {
  std::vector<double> s(r.tallies.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = r.tallies[i].s_final;
  return s;
}

// CSV per correspondence: object_index,scene_index,s_ratio,local_voters,
// local_votes,s_local,global_votes,s_final.
void save_tallies_csv(const std::string& path, const CorrespondenceSet& cs,
                      const std::vector<VoteTally>& tallies,
                      const std::string& header_comment = "");

}  // namespace corrvote
