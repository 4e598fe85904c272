#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "corrvote/geometry.hpp"
#include "corrvote/rng.hpp"

namespace corrvote {

// Star-shaped "bumpy blob": unit directions from a Fibonacci sphere, radius
// modulated by a handful of seeded cosine lobes. The bumps give descriptors
// something to discriminate; the sampling is deterministic under the seed.
// Returned without normals (estimate them at the scale you need).
PointCloud make_bumpy_model(std::size_t point_count, std::uint64_t seed,
                            double base_radius = 0.05);

// Random rigid transform: uniform rotation, translation uniform in a cube of
// half-extent `max_translation`.
RigidTransform random_rigid_transform(Rng& rng, double max_translation);

// Keeps the points on one side of a plane through the centroid; `keep`
// is the fraction retained (points are split by signed distance rank).
PointCloud cut_by_plane(const PointCloud& cloud, const Vec3& plane_normal,
                        double keep_fraction);

// Scattered small surface patches (discs with jitter), for clutter that is
// locally surface-like but globally unlike any compact model.
PointCloud make_clutter_patches(std::size_t total_points, std::size_t patch_count,
                                double patch_radius, double region_extent,
                                std::uint64_t seed);

PointCloud merge_clouds(const std::vector<const PointCloud*>& clouds);

// Per-point isotropic Gaussian displacement, std sigma per axis.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma,
                              std::uint64_t seed);

}  // namespace corrvote
