#include "corrvote/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corrvote {

PointCloud make_bumpy_model(std::size_t point_count, std::uint64_t seed,
                            double base_radius) {
  if (point_count == 0) {
    throw std::invalid_argument("make_bumpy_model: point_count must be positive");
  }
  Rng rng(seed);

  struct Lobe {
    Vec3 axis;
    double frequency;
    double amplitude;
    double phase;
  };
  // Amplitudes well above typical noise and coverage tolerances: the shape
  // must not look like a sphere, or mirror-ish poses become
  // indistinguishable downstream.
  std::vector<Lobe> lobes(6);
  for (auto& lobe : lobes) {
    lobe.axis = rng.unit_vector();
    lobe.frequency = rng.uniform(1.0, 3.0);
    lobe.amplitude = rng.uniform(0.12, 0.25);
    lobe.phase = rng.uniform(0.0, 2.0 * M_PI);
  }

  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Point3> points(point_count);
  for (std::size_t i = 0; i < point_count; ++i) {
    // Fibonacci sphere direction.
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) /
                               static_cast<double>(point_count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    const Vec3 dir(r * std::cos(phi), r * std::sin(phi), z);

    double radius = 1.0;
    for (const auto& lobe : lobes) {
      radius += lobe.amplitude *
                std::cos(lobe.frequency * dir.dot(lobe.axis) * M_PI + lobe.phase);
    }
    points[i] = base_radius * radius * dir;
  }
  return PointCloud(std::move(points));
}

RigidTransform random_rigid_transform(Rng& rng, double max_translation) {
  RigidTransform t;
  t.rotation = rng.rotation();
  t.translation = Vec3(rng.uniform(-max_translation, max_translation),
                       rng.uniform(-max_translation, max_translation),
                       rng.uniform(-max_translation, max_translation));
  return t;
}

PointCloud cut_by_plane(const PointCloud& cloud, const Vec3& plane_normal,
                        double keep_fraction) {
  if (keep_fraction <= 0.0 || keep_fraction > 1.0) {
    throw std::invalid_argument("cut_by_plane: keep_fraction must lie in (0, 1]");
  }
  Point3 centroid = Point3::Zero();
  for (const auto& p : cloud.points()) centroid += p;
  centroid /= static_cast<double>(cloud.size());

  const Vec3 n = plane_normal.normalized();
  std::vector<std::size_t> order(cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = (cloud.point(a) - centroid).dot(n);
    const double db = (cloud.point(b) - centroid).dot(n);
    return da != db ? da > db : a < b;
  });
  const std::size_t keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(keep_fraction *
                                               static_cast<double>(cloud.size()))));
  order.resize(std::min(keep, cloud.size()));
  std::sort(order.begin(), order.end());

  std::vector<Point3> pts(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pts[i] = cloud.point(order[i]);
  return PointCloud(std::move(pts));
}

PointCloud make_clutter_patches(std::size_t total_points, std::size_t patch_count,
                                double patch_radius, double region_extent,
                                std::uint64_t seed) {
  if (patch_count == 0 || total_points == 0) {
    throw std::invalid_argument("make_clutter_patches: counts must be positive");
  }
  Rng rng(seed);
  std::vector<Point3> pts;
  pts.reserve(total_points);
  const std::size_t per_patch = (total_points + patch_count - 1) / patch_count;

  for (std::size_t p = 0; p < patch_count && pts.size() < total_points; ++p) {
    const Point3 center(rng.uniform(-region_extent, region_extent),
                        rng.uniform(-region_extent, region_extent),
                        rng.uniform(-region_extent, region_extent));
    const Mat3 orient = rng.rotation();
    for (std::size_t i = 0; i < per_patch && pts.size() < total_points; ++i) {
      // Uniform disc sample plus mild out-of-plane bending.
      const double a = rng.uniform(0.0, 2.0 * M_PI);
      const double r = patch_radius * std::sqrt(rng.uniform());
      const double bend = 0.15 * r * r / patch_radius;
      const Vec3 local(r * std::cos(a), r * std::sin(a), bend);
      pts.push_back(center + orient * local);
    }
  }
  return PointCloud(std::move(pts));
}

PointCloud merge_clouds(const std::vector<const PointCloud*>& clouds) {
  std::vector<Point3> pts;
  for (const PointCloud* c : clouds) {
    pts.insert(pts.end(), c->points().begin(), c->points().end());
  }
  return PointCloud(std::move(pts));
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma,
                              std::uint64_t seed) {
  if (sigma < 0.0) {
    throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
  }
  Rng rng(seed);
  std::vector<Point3> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    pts[i] = sigma == 0.0 ? cloud.point(i) : cloud.point(i) + rng.normal_vector3(sigma);
  }
  if (cloud.has_normals()) {
    return PointCloud(std::move(pts), cloud.normals(), cloud.normal_reliability());
  }
  return PointCloud(std::move(pts));
}

}  // namespace corrvote
