#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace corrvote {

// Seeded random source with hand-rolled distributions. std::mt19937_64's
// output sequence is pinned by the standard; the distribution transforms
// below avoid the implementation-defined std::*_distribution classes, so
// identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling keeps the result exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller, one cached value.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  Eigen::Vector3d normal_vector3(double sigma) {
    return Eigen::Vector3d(sigma * normal(), sigma * normal(), sigma * normal());
  }

  Eigen::Vector3d unit_vector() {
    Eigen::Vector3d v;
    double n2;
    do {
      v = Eigen::Vector3d(normal(), normal(), normal());
      n2 = v.squaredNorm();
    } while (n2 < 1e-12);
    return v / std::sqrt(n2);
  }

  // Uniform random rotation (quaternion of four normals, normalized).
  Eigen::Matrix3d rotation() {
    Eigen::Vector4d q(normal(), normal(), normal(), normal());
    while (q.squaredNorm() < 1e-12) {
      q = Eigen::Vector4d(normal(), normal(), normal(), normal());
    }
    q.normalize();
    return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace corrvote
