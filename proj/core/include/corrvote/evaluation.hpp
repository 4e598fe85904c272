#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrvote/correspondence.hpp"
#include "corrvote/geometry.hpp"
#include "corrvote/pipeline.hpp"
#include "corrvote/synthetic.hpp"

namespace corrvote {

// True object->scene pose plus the distance tolerance that defines a
// correct correspondence (strict <).
struct GroundTruth {
  RigidTransform transform;
  double tolerance = 0.0;
};

// Inlier iff the ground-truth transform carries the object point to within
// `tolerance` (strict) of its matched scene point.
std::vector<char> label_inliers(const CorrespondenceSet& cs, const PointCloud& object,
                                const PointCloud& scene, const GroundTruth& gt);

struct CurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct EvaluationReport {
  std::vector<char> labels;
  double inlier_fraction = 0.0;
  bool zero_inliers = false;  // recall undefined; curve left empty
  std::vector<CurvePoint> curve;  // thresholds descending over distinct scores
  double max_f1 = 0.0;
  double decision_threshold = 0.0;
  bool degenerate_threshold = false;
  double precision_at_decision = 0.0;
  double recall_at_decision = 0.0;
  double f1_at_decision = 0.0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

// Sweeps the acceptance threshold over every distinct score value
// (descending) and records precision/recall per threshold plus the maximum
// F1 along the way.
EvaluationReport pr_curve(const std::vector<char>& labels,
                          const std::vector<double>& scores);

// Fills the *_at_decision fields for the accept-iff-score>=threshold rule.
void set_decision_metrics(EvaluationReport& report, const std::vector<char>& labels,
                          const std::vector<double>& scores, double threshold,
                          bool degenerate_threshold);

struct NoisyPair {
  PointCloud object;
  PointCloud scene;
  GroundTruth gt;  // tolerance left 0; resolve against scene resolution
};

// Scene = model + per-point isotropic Gaussian noise (std sigma per axis),
// then the optional rigid offset. Deterministic under `seed`.
NoisyPair make_noisy_pair(const PointCloud& model, double sigma, std::uint64_t seed,
                          const std::optional<RigidTransform>& offset = std::nullopt);

// Retargets correspondences until the inlier count is exactly
// round(fraction * size): surplus inliers get random far scene targets,
// missing inliers are restored by snapping to the ground-truth match.
// Feature distances and ratio scores are preserved.
CorrespondenceSet control_inlier_fraction(const CorrespondenceSet& cs,
                                          const PointCloud& object,
                                          const PointCloud& scene,
                                          const GroundTruth& gt, double fraction,
                                          std::uint64_t seed);

// ---- Controlled experiments on synthetic models ----

struct ExperimentParams {
  std::size_t model_points = 10000;
  double base_radius = 0.05;
  std::uint64_t seed = 7;
  double descriptor_radius = 0.015;
  double normal_radius_factor = 4.0;  // x model resolution
  bool inherit_normals = false;       // reuse model normals instead of re-estimating
  bool rigid_offset = false;          // move the noisy scene by a random pose
  VotingParams voting;                // delta 0 = 5 x scene resolution
  std::size_t histogram_bins = 100;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::kAcceptAll;
  unsigned threads = 0;
};

// A model/scene pair with features, matches and ground-truth labels; the
// reusable part of a grid point (voting parameters act downstream of it).
struct MatchedInstance {
  PointCloud object;
  PointCloud scene;
  FeatureSet object_features;
  FeatureSet scene_features;
  CorrespondenceSet correspondences;
  GroundTruth gt;
  std::vector<char> labels;
  double scene_resolution = 0.0;
};

MatchedInstance build_noisy_instance(const PointCloud& model, double sigma,
                                     const ExperimentParams& params,
                                     std::uint64_t seed);

struct ExperimentRow {
  double sigma = 0.0;  // meters
  std::size_t kappa = 0;
  double sigma_sim = 0.0;
  double t_ratio = 0.0;
  double delta = 0.0;
  EvaluationReport report;
};

// Votes + thresholds + metrics for one instance under one parameter set.
ExperimentRow evaluate_instance(const MatchedInstance& instance,
                                const ExperimentParams& params, double sigma,
                                const VotingParams& voting);

std::vector<ExperimentRow> run_noise_sweep(const ExperimentParams& params,
                                           const std::vector<double>& sigmas);

// Parameter sweeps at a fixed noise level; matching runs once and is reused.
std::vector<ExperimentRow> run_kappa_sweep(const ExperimentParams& params,
                                           double sigma,
                                           const std::vector<std::size_t>& kappas);
std::vector<ExperimentRow> run_sigma_sim_sweep(const ExperimentParams& params,
                                               double sigma,
                                               const std::vector<double>& sigma_sims);

void save_report_csv(const std::string& path, const std::vector<ExperimentRow>& rows,
                     const std::string& header_comment = "");
void save_curves_csv(const std::string& path, const std::vector<ExperimentRow>& rows,
                     const std::string& header_comment = "");

}  // namespace corrvote
