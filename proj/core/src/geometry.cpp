#include "corrvote/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "corrvote/threading.hpp"

namespace corrvote {

namespace {

std::vector<std::array<double, 3>> to_arrays(const std::vector<Point3>& pts) {
  std::vector<std::array<double, 3>> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = {pts[i].x(), pts[i].y(), pts[i].z()};
  }
  return out;
}

}  // namespace

bool RigidTransform::is_rigid(double tol) const {
  const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

RigidTransform RigidTransform::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return RigidTransform{r, translation};
}

double rotation_angle(const Mat3& a, const Mat3& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

PointCloud::PointCloud(std::vector<Point3> points)
    : points_(std::move(points)), index_(to_arrays(points_)) {}

PointCloud::PointCloud(std::vector<Point3> points, std::vector<Vec3> normals)
    : PointCloud(std::move(points), std::move(normals), {}) {}

PointCloud::PointCloud(std::vector<Point3> points, std::vector<Vec3> normals,
                       std::vector<char> normal_reliable)
    : points_(std::move(points)),
      normals_(std::move(normals)),
      normal_reliable_(std::move(normal_reliable)),
      index_(to_arrays(points_)) {
  if (!normals_.empty() && normals_.size() != points_.size()) {
    throw std::invalid_argument("PointCloud: normals must match point count");
  }
  if (!normal_reliable_.empty() && normal_reliable_.size() != points_.size()) {
    throw std::invalid_argument("PointCloud: reliability flags must match point count");
  }
}

std::vector<NeighborHit> PointCloud::knn(const Point3& query, std::size_t k) const {
  return index_.knn({query.x(), query.y(), query.z()}, k);
}

std::vector<NeighborHit> PointCloud::radius_search(const Point3& query,
                                                   double radius) const {
  return index_.radius_search({query.x(), query.y(), query.z()}, radius);
}

double estimate_resolution(const PointCloud& cloud) {
  if (cloud.size() < 2) {
    throw std::invalid_argument("estimate_resolution: cloud needs at least 2 points");
  }
  std::vector<double> nn(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto hits = cloud.knn(cloud.point(i), 2);
    // hits[0] is the point itself at distance 0 unless a duplicate with a
    // lower index shadows it; either way hits[1] is a valid NN distance and
    // duplicates give 0, which is correct.
    nn[i] = hits[1].distance;
  }
  std::sort(nn.begin(), nn.end());
  const std::size_t n = nn.size();
  if (n % 2 == 1) return nn[n / 2];
  return 0.5 * (nn[n / 2 - 1] + nn[n / 2]);
}

PointCloud estimate_normals(const PointCloud& cloud, double radius,
                            const std::optional<Point3>& viewpoint,
                            unsigned threads, NormalOrientation orientation) {
  if (radius <= 0.0) {
    throw std::invalid_argument("estimate_normals: radius must be positive");
  }
  const std::size_t n = cloud.size();
  std::vector<Vec3> normals(n, Vec3(0, 0, 1));
  std::vector<char> reliable(n, 0);

  Point3 centroid = Point3::Zero();
  for (const auto& p : cloud.points()) centroid += p;
  if (n > 0) centroid /= static_cast<double>(n);

  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Point3& p = cloud.point(i);
      const auto hits = cloud.radius_search(p, radius);
      if (hits.size() < 3) continue;  // degenerate, flag stays 0

      Point3 mean = Point3::Zero();
      for (const auto& h : hits) mean += cloud.point(h.index);
      mean /= static_cast<double>(hits.size());

      Mat3 cov = Mat3::Zero();
      for (const auto& h : hits) {
        const Vec3 d = cloud.point(h.index) - mean;
        cov += d * d.transpose();
      }

      Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
      Vec3 normal = eig.eigenvectors().col(0).normalized();

      Vec3 outward;
      if (viewpoint) {
        outward = *viewpoint - p;
      } else if (orientation == NormalOrientation::kLocalOutward) {
        outward = p - mean;
      } else {
        outward = p - centroid;
      }
      if (normal.dot(outward) < 0.0) normal = -normal;

      normals[i] = normal;
      reliable[i] = 1;
    }
  });

  return PointCloud(cloud.points(), std::move(normals), std::move(reliable));
}

PointCloud transformed(const PointCloud& cloud, const RigidTransform& t) {
  std::vector<Point3> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) pts[i] = t.apply(cloud.point(i));
  if (!cloud.has_normals()) return PointCloud(std::move(pts));

  std::vector<Vec3> normals(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    normals[i] = t.rotation * cloud.normal(i);
  }
  return PointCloud(std::move(pts), std::move(normals), cloud.normal_reliability());
}

}  // namespace corrvote
