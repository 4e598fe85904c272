#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "corrvote/geometry.hpp"

namespace corrvote {

inline constexpr int kDescriptorSize = 64;

// Per-point rigid frame. Columns of `axes` are the x, y, z directions; the
// z axis carries the point's surface normal when one is available, so two
// matched frames define a full 6-DoF pose hypothesis.
struct LocalReferenceFrame {
  Point3 origin = Point3::Zero();
  Mat3 axes = Mat3::Identity();
  bool valid = false;

  RigidTransform to_transform() const { return RigidTransform{axes, origin}; }
};

// Rotation-invariant shape signature: 8 RF octants x 8 bins over the cosine
// between neighbor normals and the RF z axis, inverse-distance weighted,
// L2-normalized. Invalid descriptors are excluded from matching.
struct Descriptor {
  std::array<double, kDescriptorSize> values{};
  bool valid = false;

  double distance(const Descriptor& other) const {
    double s = 0.0;
    for (int i = 0; i < kDescriptorSize; ++i) {
      const double d = values[i] - other.values[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
};

struct FeatureSet {
  std::vector<Descriptor> descriptors;
  std::vector<LocalReferenceFrame> frames;

  std::size_t size() const { return descriptors.size(); }
};

// Frame from the distance-weighted covariance of the radius neighborhood
// (weights radius - d). Needs at least 5 neighbors besides the point itself;
// returns valid=false otherwise. Deterministic, including on symmetric
// neighborhoods (see the sign disambiguation rules in the implementation).
LocalReferenceFrame compute_rf(const PointCloud& cloud, std::size_t point_index,
                               double radius);

// Descriptor of the radius neighborhood expressed in `rf`. The cloud must
// carry normals. Needs at least 5 usable neighbors besides the point itself.
Descriptor compute_descriptor(const PointCloud& cloud, std::size_t point_index,
                              const LocalReferenceFrame& rf, double radius);

// Dense per-point features: outputs align index-for-index with the cloud's
// points; entries that could not be computed are flagged, not removed.
FeatureSet compute_all_features(const PointCloud& cloud, double radius,
                                unsigned threads = 1);

// CSV dump/load: index, valid flag, 64 descriptor values, 12 RF values
// (9 rotation entries row-major, then the 3 origin coordinates). The load
// path lets externally computed features drive the pipeline.
void save_features_csv(const std::string& path, const FeatureSet& features,
                       const std::string& header_comment = "");
FeatureSet load_features_csv(const std::string& path);

}  // namespace corrvote
