#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "corrvote/kdtree.hpp"

namespace corrvote {

using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline double l2_distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

inline double l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm();
}

// Element of SE(3). Rotation must stay orthonormal with determinant +1;
// compose/inverse preserve that up to floating-point drift, and
// orthonormalized() projects back onto SO(3) when a long chain needs it.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return RigidTransform{}; }

  Point3 apply(const Point3& p) const { return rotation * p + translation; }

  // (this ∘ other): apply `other` first, then `this`.
  RigidTransform compose(const RigidTransform& other) const {
    return RigidTransform{rotation * other.rotation,
                          rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    const Mat3 rt = rotation.transpose();
    return RigidTransform{rt, -(rt * translation)};
  }

  bool is_rigid(double tol = 1e-6) const;
  RigidTransform orthonormalized() const;
};

// Angle of the relative rotation between two transforms, radians.
double rotation_angle(const Mat3& a, const Mat3& b);

// Immutable point cloud with an exact spatial index. Normals are optional;
// per-point reliability flags mark degenerate normal estimates.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points);
  PointCloud(std::vector<Point3> points, std::vector<Vec3> normals);
  PointCloud(std::vector<Point3> points, std::vector<Vec3> normals,
             std::vector<char> normal_reliable);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<Point3>& points() const { return points_; }
  const Point3& point(std::size_t i) const { return points_[i]; }

  bool has_normals() const { return !normals_.empty(); }
  const std::vector<Vec3>& normals() const { return normals_; }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  bool normal_reliable(std::size_t i) const {
    return normal_reliable_.empty() ? true : normal_reliable_[i] != 0;
  }
  const std::vector<char>& normal_reliability() const { return normal_reliable_; }

  // k nearest points, sorted by (distance, index); min(k, size()) results.
  std::vector<NeighborHit> knn(const Point3& query, std::size_t k) const;

  // All points within `radius` (inclusive), sorted by (distance, index).
  std::vector<NeighborHit> radius_search(const Point3& query, double radius) const;

 private:
  std::vector<Point3> points_;
  std::vector<Vec3> normals_;
  std::vector<char> normal_reliable_;
  KdTree<3> index_;
};

// Median distance from each point to its nearest neighbor (self excluded).
// Median of an even-length list is the mean of the two central values.
// Throws std::invalid_argument for clouds with fewer than 2 points.
double estimate_resolution(const PointCloud& cloud);

enum class NormalOrientation {
  kAwayFromCentroid,  // flip to point away from the whole cloud's centroid
  kLocalOutward,      // flip to point away from the neighborhood mean;
                      // intrinsic, so it survives clutter and partial views
};

// PCA normals from the radius neighborhood of each point. Neighborhoods with
// fewer than 3 points (the point itself included) get the degenerate normal
// (0,0,1) and are flagged unreliable. Orientation: toward `viewpoint` when
// given, otherwise per `orientation`.
PointCloud estimate_normals(
    const PointCloud& cloud, double radius,
    const std::optional<Point3>& viewpoint = std::nullopt, unsigned threads = 1,
    NormalOrientation orientation = NormalOrientation::kAwayFromCentroid);

// New cloud with points (and normals, if any) moved by `t`.
PointCloud transformed(const PointCloud& cloud, const RigidTransform& t);

}  // namespace corrvote
