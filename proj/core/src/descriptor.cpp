#include "corrvote/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "corrvote/csv.hpp"
#include "corrvote/threading.hpp"

namespace corrvote {

namespace {

constexpr std::size_t kMinNeighbors = 5;  // excluding the point itself

// Neighbors of point `i` within `radius`, self excluded, sorted by
// (distance, index) like every other spatial query.
std::vector<NeighborHit> support_neighbors(const PointCloud& cloud, std::size_t i,
                                           double radius) {
  auto hits = cloud.radius_search(cloud.point(i), radius);
  std::erase_if(hits, [i](const NeighborHit& h) { return h.index == i; });
  return hits;
}

LocalReferenceFrame rf_from_neighbors(const PointCloud& cloud, std::size_t i,
                                      double radius,
                                      const std::vector<NeighborHit>& neighbors) {
  LocalReferenceFrame rf;
  rf.origin = cloud.point(i);
  if (neighbors.size() < kMinNeighbors) return rf;

  const Point3& p = cloud.point(i);

  // Distance-weighted covariance about the point itself.
  Mat3 cov = Mat3::Zero();
  double wsum = 0.0;
  for (const auto& h : neighbors) {
    const double w = radius - h.distance;
    const Vec3 d = cloud.point(h.index) - p;
    cov += w * (d * d.transpose());
    wsum += w;
  }
  if (wsum <= 0.0) return rf;
  cov /= wsum;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);  // eigenvalues ascending

  // Sign disambiguation shared by both axes: flip so the summed projection
  // of neighbor displacements is positive; on an exact zero sum, flip so the
  // lowest-index neighbor with a nonzero projection projects positively.
  auto disambiguate = [&](Vec3 axis) {
    double proj_sum = 0.0;
    for (const auto& h : neighbors) {
      proj_sum += (cloud.point(h.index) - p).dot(axis);
    }
    if (proj_sum < 0.0) return Vec3(-axis);
    if (proj_sum > 0.0) return axis;
    std::vector<std::size_t> by_index(neighbors.size());
    for (std::size_t k = 0; k < neighbors.size(); ++k) by_index[k] = neighbors[k].index;
    std::sort(by_index.begin(), by_index.end());
    for (std::size_t idx : by_index) {
      const double proj = (cloud.point(idx) - p).dot(axis);
      if (proj < 0.0) return Vec3(-axis);
      if (proj > 0.0) return axis;
    }
    return axis;
  };

  // z carries the point normal exactly when one is available, which keeps
  // pose hypotheses consistent with the normal field; the smallest-eigenvalue
  // direction stands in when it is not.
  Vec3 z;
  if (cloud.has_normals() && cloud.normal_reliable(i)) {
    z = cloud.normal(i);
  } else {
    z = disambiguate(eig.eigenvectors().col(0).normalized());
  }

  // x: the largest-eigenvalue direction, projected into the plane normal
  // to z so the frame stays orthonormal.
  Vec3 x = eig.eigenvectors().col(2);
  x -= x.dot(z) * z;
  if (x.norm() < 1e-9) {
    x = eig.eigenvectors().col(1);
    x -= x.dot(z) * z;
  }
  if (x.norm() < 1e-9) {
    // Neighborhood is isotropic around z; derive a deterministic tangent.
    const Vec3 seed = std::abs(z.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    x = seed - seed.dot(z) * z;
  }
  x.normalize();
  x = disambiguate(x);

  const Vec3 y = z.cross(x);

  rf.axes.col(0) = x;
  rf.axes.col(1) = y;
  rf.axes.col(2) = z;
  rf.valid = true;
  return rf;
}

Descriptor descriptor_from_neighbors(const PointCloud& cloud, std::size_t i,
                                     const LocalReferenceFrame& rf, double radius,
                                     const std::vector<NeighborHit>& neighbors) {
  Descriptor desc;
  if (!rf.valid || !cloud.has_normals()) return desc;

  const Point3& p = cloud.point(i);
  const Vec3 z = rf.axes.col(2);
  const double min_dist = 1e-6 * radius;

  std::size_t used = 0;
  for (const auto& h : neighbors) {
    if (!cloud.normal_reliable(h.index)) continue;
    const Vec3 local = rf.axes.transpose() * (cloud.point(h.index) - p);
    const int octant = (local.x() >= 0.0 ? 1 : 0) | (local.y() >= 0.0 ? 2 : 0) |
                       (local.z() >= 0.0 ? 4 : 0);
    const double c = std::clamp(cloud.normal(h.index).dot(z), -1.0, 1.0);
    const int bin = std::min(static_cast<int>((c + 1.0) * 0.5 * 8.0), 7);
    const double w = 1.0 / std::max(h.distance, min_dist);
    desc.values[octant * 8 + bin] += w;
    ++used;
  }
  if (used < kMinNeighbors) {
    desc.values.fill(0.0);
    return desc;
  }

  double norm = 0.0;
  for (double v : desc.values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm <= 0.0) {
    return desc;
  }
  for (double& v : desc.values) v /= norm;
  desc.valid = true;
  return desc;
}

}  // namespace

LocalReferenceFrame compute_rf(const PointCloud& cloud, std::size_t point_index,
                               double radius) {
  if (radius <= 0.0) {
    throw std::invalid_argument("compute_rf: radius must be positive");
  }
  return rf_from_neighbors(cloud, point_index, radius,
                           support_neighbors(cloud, point_index, radius));
}

Descriptor compute_descriptor(const PointCloud& cloud, std::size_t point_index,
                              const LocalReferenceFrame& rf, double radius) {
  if (radius <= 0.0) {
    throw std::invalid_argument("compute_descriptor: radius must be positive");
  }
  return descriptor_from_neighbors(cloud, point_index, rf, radius,
                                   support_neighbors(cloud, point_index, radius));
}

FeatureSet compute_all_features(const PointCloud& cloud, double radius,
                                unsigned threads) {
  if (radius <= 0.0) {
    throw std::invalid_argument("compute_all_features: radius must be positive");
  }
  FeatureSet fs;
  fs.descriptors.resize(cloud.size());
  fs.frames.resize(cloud.size());

  parallel_chunks(cloud.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto neighbors = support_neighbors(cloud, i, radius);
      fs.frames[i] = rf_from_neighbors(cloud, i, radius, neighbors);
      fs.descriptors[i] =
          descriptor_from_neighbors(cloud, i, fs.frames[i], radius, neighbors);
    }
  });
  return fs;
}

void save_features_csv(const std::string& path, const FeatureSet& features,
                       const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "index,valid";
  for (int i = 0; i < kDescriptorSize; ++i) out << ",d" << i;
  for (int i = 0; i < 9; ++i) out << ",r" << i;
  out << ",ox,oy,oz\n";

  for (std::size_t i = 0; i < features.size(); ++i) {
    const Descriptor& d = features.descriptors[i];
    const LocalReferenceFrame& rf = features.frames[i];
    out << i << "," << (d.valid ? 1 : 0);
    for (int k = 0; k < kDescriptorSize; ++k) out << "," << format_double(d.values[k]);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << "," << format_double(rf.axes(r, c));
    }
    for (int k = 0; k < 3; ++k) out << "," << format_double(rf.origin(k));
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed writing features CSV: " + path);
  }
}

FeatureSet load_features_csv(const std::string& path) {
  std::string header = "index,valid";
  for (int i = 0; i < kDescriptorSize; ++i) header += ",d" + std::to_string(i);
  for (int i = 0; i < 9; ++i) header += ",r" + std::to_string(i);
  header += ",ox,oy,oz";

  CsvReader reader(path, header);
  FeatureSet fs;
  std::vector<std::string> fields;
  while (reader.next_row(fields)) {
    const std::string where = path + ":" + std::to_string(reader.line_number());
    if (fields.size() != 2 + kDescriptorSize + 12) {
      throw std::runtime_error(where + ": expected " +
                               std::to_string(2 + kDescriptorSize + 12) + " fields");
    }
    const auto index = parse_int(fields[0], where);
    if (index != static_cast<std::int64_t>(fs.size())) {
      throw std::runtime_error(where + ": feature rows must be dense and in order");
    }
    Descriptor d;
    d.valid = parse_int(fields[1], where) != 0;
    for (int k = 0; k < kDescriptorSize; ++k) {
      d.values[k] = parse_double(fields[2 + k], where);
    }
    LocalReferenceFrame rf;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        rf.axes(r, c) = parse_double(fields[2 + kDescriptorSize + r * 3 + c], where);
      }
    }
    for (int k = 0; k < 3; ++k) {
      rf.origin(k) = parse_double(fields[2 + kDescriptorSize + 9 + k], where);
    }
    if (d.valid && !RigidTransform{rf.axes, rf.origin}.is_rigid(1e-5)) {
      throw std::runtime_error(where + ": RF rotation is not orthonormal");
    }
    // The file carries one validity flag covering descriptor and frame.
    rf.valid = d.valid;
    fs.descriptors.push_back(d);
    fs.frames.push_back(rf);
  }
  return fs;
}

}  // namespace corrvote
