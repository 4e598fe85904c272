#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "corrvote/geometry.hpp"
#include "corrvote/pipeline.hpp"

namespace corrvote {

struct IcpResult {
  RigidTransform pose;
  bool starved = false;           // an iteration found zero pairs
  std::vector<double> rmse_history;  // RMSE at pairing time, one per iteration run
};

// Point-to-point ICP with closed-form (SVD) alignment per iteration. Runs
// exactly `iterations` iterations with no early exit; pairing gates on
// max_corr_dist (inclusive). A starved iteration returns the pose reached
// so far with the flag set.
IcpResult icp_refine(const PointCloud& object, const PointCloud& scene,
                     const RigidTransform& initial, std::size_t iterations = 10,
                     double max_corr_dist = 0.0);

// Least-squares rigid motion mapping src onto dst (Kabsch/SVD).
RigidTransform estimate_rigid_transform(const std::vector<Point3>& src,
                                        const std::vector<Point3>& dst);

// Fraction of object points whose transformed position has a scene point
// within dist_tol (inclusive).
double coverage(const PointCloud& object, const PointCloud& scene,
                const RigidTransform& pose, double dist_tol);

// Fraction of object points mapped within dist_tol of each other by the two
// poses; the suppression metric for multi-instance detection.
double detection_overlap(const PointCloud& object, const RigidTransform& pose_a,
                         const RigidTransform& pose_b, double dist_tol);

struct Detection {
  RigidTransform pose;
  double coverage = 0.0;
  std::size_t source_correspondence = 0;  // index into the correspondence set
  std::size_t source_rank = 0;            // position in the final ranking
  bool accepted = false;
};

struct DetectionParams {
  std::size_t top_n = 1;
  double overlap_max = 0.10;
  double coverage_min = 0.05;
  std::size_t icp_iterations = 10;
  double dist_tol = 0.0;       // 0 resolves to 2 x scene resolution
  double max_corr_dist = 0.0;  // 0 resolves to 3 x scene resolution; wider
                               // gates drag the fit toward clutter and
                               // occlusion boundaries
};

// Runs the vote pipeline, walks the top_n ranked correspondences in order,
// refines each pose hypothesis with ICP, and accepts those with enough scene
// coverage that do not overlap an earlier accepted detection. Returns every
// examined hypothesis; `accepted` marks the survivors.
std::vector<Detection> detect(const PointCloud& object, const PointCloud& scene,
                              const FeatureSet& object_features,
                              const FeatureSet& scene_features,
                              const CorrespondenceSet& correspondences,
                              const PipelineOptions& pipeline_options,
                              const DetectionParams& detection_params);

// CSV rows: rank, source_correspondence, accepted, coverage, pose (12 values
// row-major: 9 rotation + 3 translation).
void save_detections_csv(const std::string& path, const std::vector<Detection>& ds,
                         const std::string& header_comment = "");

}  // namespace corrvote
