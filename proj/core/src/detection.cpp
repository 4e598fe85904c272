#include "corrvote/detection.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "corrvote/csv.hpp"
#include "corrvote/voting.hpp"

namespace corrvote {

RigidTransform estimate_rigid_transform(const std::vector<Point3>& src,
                                        const std::vector<Point3>& dst) {
  if (src.size() != dst.size() || src.size() < 3) {
    throw std::invalid_argument(
        "estimate_rigid_transform: need >= 3 paired points");
  }
  Point3 cs = Point3::Zero();
  Point3 cd = Point3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(dst.size());

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += (src[i] - cs) * (dst[i] - cd).transpose();
  }

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixV() * svd.matrixU().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixV() * flip * svd.matrixU().transpose();
  }
  return RigidTransform{r, cd - r * cs};
}

IcpResult icp_refine(const PointCloud& object, const PointCloud& scene,
                     const RigidTransform& initial, std::size_t iterations,
                     double max_corr_dist) {
  if (!(max_corr_dist > 0.0)) {
    throw std::invalid_argument("icp_refine: max_corr_dist must be > 0");
  }
  IcpResult result;
  result.pose = initial;

  std::vector<Point3> src;
  std::vector<Point3> dst;
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    src.clear();
    dst.clear();
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < object.size(); ++i) {
      const Point3 moved = result.pose.apply(object.point(i));
      const auto hits = scene.knn(moved, 1);
      if (hits.empty() || hits[0].distance > max_corr_dist) continue;
      src.push_back(object.point(i));
      dst.push_back(scene.point(hits[0].index));
      sq_sum += hits[0].distance * hits[0].distance;
    }
    if (src.empty()) {
      result.starved = true;
      return result;
    }
    result.rmse_history.push_back(
        std::sqrt(sq_sum / static_cast<double>(src.size())));
    if (src.size() < 3) {
      // Too few pairs to solve; hold the pose but keep iterating the search.
      continue;
    }
    result.pose = estimate_rigid_transform(src, dst);
  }
  return result;
}

double coverage(const PointCloud& object, const PointCloud& scene,
                const RigidTransform& pose, double dist_tol) {
  if (!(dist_tol > 0.0)) {
    throw std::invalid_argument("coverage: dist_tol must be > 0");
  }
  if (object.empty()) return 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < object.size(); ++i) {
    const auto hits = scene.knn(pose.apply(object.point(i)), 1);
    if (!hits.empty() && hits[0].distance <= dist_tol) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(object.size());
}

double detection_overlap(const PointCloud& object, const RigidTransform& pose_a,
                         const RigidTransform& pose_b, double dist_tol) {
  if (object.empty()) return 0.0;
  std::size_t close = 0;
  for (std::size_t i = 0; i < object.size(); ++i) {
    const Point3& p = object.point(i);
    if ((pose_a.apply(p) - pose_b.apply(p)).norm() <= dist_tol) ++close;
  }
  return static_cast<double>(close) / static_cast<double>(object.size());
}

std::vector<Detection> detect(const PointCloud& object, const PointCloud& scene,
                              const FeatureSet& object_features,
                              const FeatureSet& scene_features,
                              const CorrespondenceSet& correspondences,
                              const PipelineOptions& pipeline_options,
                              const DetectionParams& detection_params) {
  std::vector<Detection> detections;
  if (correspondences.empty()) return detections;

  const PipelineResult pipeline =
      run_vote_pipeline(correspondences, object, scene, object_features.frames,
                        scene_features.frames, pipeline_options);

  const double dist_tol = detection_params.dist_tol > 0.0
                              ? detection_params.dist_tol
                              : 2.0 * pipeline.scene_resolution;
  const double max_corr_dist = detection_params.max_corr_dist > 0.0
                                   ? detection_params.max_corr_dist
                                   : 3.0 * pipeline.scene_resolution;

  const std::size_t n_hypotheses =
      std::min<std::size_t>(detection_params.top_n, pipeline.ranking.size());

  for (std::size_t rank = 0; rank < n_hypotheses; ++rank) {
    const std::size_t ci = pipeline.ranking[rank];
    const Correspondence& c = correspondences.items[ci];
    const LocalReferenceFrame& obj_rf = object_features.frames[c.object_index];
    const LocalReferenceFrame& scene_rf = scene_features.frames[c.scene_index];
    if (!obj_rf.valid || !scene_rf.valid) continue;  // no pose hypothesis

    Detection det;
    det.source_correspondence = ci;
    det.source_rank = rank;

    const RigidTransform hypothesis = pose_from_correspondence(obj_rf, scene_rf);
    const IcpResult icp = icp_refine(object, scene, hypothesis,
                                     detection_params.icp_iterations, max_corr_dist);
    det.pose = icp.pose;
    det.coverage = coverage(object, scene, det.pose, dist_tol);

    bool ok = det.coverage >= detection_params.coverage_min;
    if (ok) {
      for (const Detection& earlier : detections) {
        if (!earlier.accepted) continue;
        if (detection_overlap(object, det.pose, earlier.pose, dist_tol) >
            detection_params.overlap_max) {
          ok = false;
          break;
        }
      }
    }
    det.accepted = ok;
    detections.push_back(det);
  }
  return detections;
}

void save_detections_csv(const std::string& path, const std::vector<Detection>& ds,
                         const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "rank,source_correspondence,accepted,coverage,r00,r01,r02,r10,r11,r12,r20,"
         "r21,r22,tx,ty,tz\n";
  for (const auto& d : ds) {
    out << d.source_rank << "," << d.source_correspondence << ","
        << (d.accepted ? 1 : 0) << "," << format_double(d.coverage);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << "," << format_double(d.pose.rotation(r, c));
    }
    for (int k = 0; k < 3; ++k) out << "," << format_double(d.pose.translation(k));
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed writing detections CSV: " + path);
  }
}

}  // namespace corrvote
