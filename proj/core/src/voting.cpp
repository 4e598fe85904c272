#include "corrvote/voting.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "corrvote/csv.hpp"
#include "corrvote/kdtree.hpp"
#include "corrvote/threading.hpp"

namespace corrvote {

void VotingParams::validate() const {
  if (kappa < 1) throw std::invalid_argument("voting: kappa must be >= 1");
  if (sigma_sim < 0.0 || sigma_sim >= 1.0) {
    throw std::invalid_argument("voting: sigma_sim must lie in [0, 1)");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("voting: delta must be > 0");
  if (t_ratio < 0.0 || t_ratio > 1.0) {
    throw std::invalid_argument("voting: t_ratio must lie in [0, 1]");
  }
}

double local_compatibility(const Point3& obj1, const Point3& obj2,
                           const Point3& scene1, const Point3& scene2) {
  const double d_obj = (obj1 - obj2).norm();
  const double d_scene = (scene1 - scene2).norm();
  if (d_obj <= 0.0 || d_scene <= 0.0) return 0.0;
  return std::min(d_obj / d_scene, d_scene / d_obj);
}

RigidTransform pose_from_correspondence(const LocalReferenceFrame& object_rf,
                                        const LocalReferenceFrame& scene_rf) {
  if (!object_rf.valid || !scene_rf.valid) {
    throw std::invalid_argument("pose_from_correspondence: both frames must be valid");
  }
  return scene_rf.to_transform().compose(object_rf.to_transform().inverse());
}

double global_compatibility(const RigidTransform& pose, const Point3& voter_object,
                            const Point3& voter_scene) {
  return (pose.apply(voter_object) - voter_scene).norm();
}

VotingResult local_voting_stage(const CorrespondenceSet& cs, const PointCloud& object,
                                const PointCloud& scene, const VotingParams& params,
                                unsigned threads) {
  params.validate();
  const std::size_t n = cs.size();
  VotingResult result;
  result.tallies.resize(n);
  result.ratio_mask = ratio_set(cs, params.t_ratio);

  // Neighbor index over the object points that carry correspondences.
  std::vector<std::array<double, 3>> corr_points(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& p = object.point(cs.items[i].object_index);
    corr_points[i] = {p.x(), p.y(), p.z()};
  }
  const KdTree<3> corr_tree(std::move(corr_points));

  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t ci = begin; ci < end; ++ci) {
      const Correspondence& c = cs.items[ci];
      VoteTally& tally = result.tallies[ci];
      tally.s_ratio = score_ratio(c);

      const Point3& p = object.point(c.object_index);
      const Point3& p_scene = scene.point(c.scene_index);

      // kappa nearest correspondence-carrying neighbors, self excluded. The
      // query asks for kappa+1 hits; if ties crowd the correspondence out of
      // its own result list, drop the worst hit instead.
      auto hits = corr_tree.knn({p.x(), p.y(), p.z()}, params.kappa + 1);
      bool self_seen = false;
      std::size_t kept = 0;
      for (std::size_t h = 0; h < hits.size(); ++h) {
        if (hits[h].index == ci) {
          self_seen = true;
          continue;
        }
        hits[kept++] = hits[h];
      }
      hits.resize(kept);
      if (!self_seen && hits.size() > params.kappa) hits.resize(params.kappa);

      std::size_t voters = 0;
      std::size_t votes = 0;
      for (const auto& h : hits) {
        if (!result.ratio_mask[h.index]) continue;
        ++voters;
        const Correspondence& voter = cs.items[h.index];
        const double compat =
            local_compatibility(p, object.point(voter.object_index), p_scene,
                                scene.point(voter.scene_index));
        if (compat > params.sigma_sim) ++votes;
      }
      tally.local_voters = voters;
      tally.local_votes = votes;
      tally.s_local =
          voters == 0 ? 0.0
                      : static_cast<double>(votes) / static_cast<double>(voters);
    }
  });
  return result;
}

void global_voting_stage(const CorrespondenceSet& cs, const PointCloud& object,
                         const PointCloud& scene,
                         const std::vector<LocalReferenceFrame>& object_frames,
                         const std::vector<LocalReferenceFrame>& scene_frames,
                         const VotingParams& params, VotingResult& result,
                         unsigned threads) {
  params.validate();
  const std::size_t n = cs.size();
  if (result.tallies.size() != n) {
    throw std::invalid_argument("global_voting_stage: run the local stage first");
  }

  // V_G: the kappa highest-ranked correspondences of the first stage.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const VoteTally& ta = result.tallies[a];
    const VoteTally& tb = result.tallies[b];
    if (ta.s_local != tb.s_local) return ta.s_local > tb.s_local;
    if (ta.s_ratio != tb.s_ratio) return ta.s_ratio > tb.s_ratio;
    return cs.items[a].object_index < cs.items[b].object_index;
  });
  order.resize(std::min<std::size_t>(params.kappa, n));
  result.global_voters = order;

  std::vector<char> in_voters(n, 0);
  for (std::size_t idx : order) in_voters[idx] = 1;

  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t ci = begin; ci < end; ++ci) {
      const Correspondence& c = cs.items[ci];
      VoteTally& tally = result.tallies[ci];

      const std::size_t voter_count =
          result.global_voters.size() - (in_voters[ci] ? 1 : 0);
      tally.global_voters = voter_count;
      tally.global_votes = 0;

      const LocalReferenceFrame& obj_rf = object_frames[c.object_index];
      const LocalReferenceFrame& scene_rf = scene_frames[c.scene_index];
      const bool has_pose = obj_rf.valid && scene_rf.valid;

      if (has_pose) {
        const RigidTransform pose = pose_from_correspondence(obj_rf, scene_rf);
        const Point3& p = object.point(c.object_index);
        const Point3& p_scene = scene.point(c.scene_index);
        std::size_t votes = 0;
        for (std::size_t vi : result.global_voters) {
          if (vi == ci) continue;
          const Correspondence& voter = cs.items[vi];
          const Point3& vp = object.point(voter.object_index);
          const Point3& vp_scene = scene.point(voter.scene_index);
          // The cheap invariant constraint prerejects before the pose test.
          if (local_compatibility(p, vp, p_scene, vp_scene) <= params.sigma_sim) {
            continue;
          }
          if (global_compatibility(pose, vp, vp_scene) < params.delta) ++votes;
        }
        tally.global_votes = votes;
      }

      const std::size_t total_voters = tally.local_voters + voter_count;
      const std::size_t total_votes = tally.local_votes + tally.global_votes;
      tally.s_final = total_voters == 0 ? 0.0
                                        : static_cast<double>(total_votes) /
                                              static_cast<double>(total_voters);
    }
  });
}

VotingResult run_voting(const CorrespondenceSet& cs, const PointCloud& object,
                        const PointCloud& scene,
                        const std::vector<LocalReferenceFrame>& object_frames,
                        const std::vector<LocalReferenceFrame>& scene_frames,
                        const VotingParams& params, unsigned threads) {
  VotingResult result = local_voting_stage(cs, object, scene, params, threads);
  global_voting_stage(cs, object, scene, object_frames, scene_frames, params, result,
                      threads);
  return result;
}

std::vector<std::size_t> rank_correspondences(const CorrespondenceSet& cs,
                                              const std::vector<double>& scores) {
  if (scores.size() != cs.size()) {
    throw std::invalid_argument("rank_correspondences: score/item count mismatch");
  }
  std::vector<std::size_t> order(cs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    const double ra = score_ratio(cs.items[a]);
    const double rb = score_ratio(cs.items[b]);
    if (ra != rb) return ra > rb;
    return cs.items[a].object_index < cs.items[b].object_index;
  });
  return order;
}

void save_tallies_csv(const std::string& path, const CorrespondenceSet& cs,
                      const std::vector<VoteTally>& tallies,
                      const std::string& header_comment) {
  if (tallies.size() != cs.size()) {
    throw std::invalid_argument("save_tallies_csv: tally/item count mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "object_index,scene_index,s_ratio,local_voters,local_votes,s_local,"
         "global_votes,s_final\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Correspondence& c = cs.items[i];
    const VoteTally& t = tallies[i];
    out << c.object_index << "," << c.scene_index << "," << format_double(t.s_ratio)
        << "," << t.local_voters << "," << t.local_votes << ","
        << format_double(t.s_local) << "," << t.global_votes << ","
        << format_double(t.s_final) << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed writing tally CSV: " + path);
  }
}

}  // namespace corrvote
