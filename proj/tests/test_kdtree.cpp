#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corrvote/kdtree.hpp"
#include "corrvote/rng.hpp"

#include "test_support.hpp"

using namespace corrvote;
using corrvote::testing::brute_force_knn;
using corrvote::testing::random_points;

namespace {

KdTree<3> tree_of(const std::vector<Point3>& pts) {
  std::vector<std::array<double, 3>> arrays(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    arrays[i] = {pts[i].x(), pts[i].y(), pts[i].z()};
  }
  return KdTree<3>(std::move(arrays));
}

}  // namespace

TEST_CASE("knn equals exhaustive scan on random clouds") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 100 + static_cast<std::size_t>(trial), 1.0);
    const auto tree = tree_of(pts);
    for (int q = 0; q < 20; ++q) {
      const Point3 query(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2),
                         rng.uniform(-1.2, 1.2));
      const std::size_t k = 1 + rng.uniform_index(12);
      const auto got = tree.knn({query.x(), query.y(), query.z()}, k);
      const auto want = brute_force_knn(pts, query, k);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].index == want[i].index);
        CHECK(got[i].distance == doctest::Approx(want[i].distance).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("knn tie-break prefers the lower index on grids") {
  // Regular grids produce many exactly-equal distances.
  std::vector<Point3> pts;
  for (int x = 0; x < 5; ++x) {
    for (int y = 0; y < 5; ++y) {
      for (int z = 0; z < 5; ++z) {
        pts.emplace_back(x, y, z);
      }
    }
  }
  const auto tree = tree_of(pts);
  Rng rng(7);
  for (int q = 0; q < 50; ++q) {
    const Point3 query(2.0 + rng.uniform(-0.5, 0.5) * 0.0, 2.0, 2.0);
    const std::size_t k = 1 + rng.uniform_index(20);
    const auto got = tree.knn({query.x(), query.y(), query.z()}, k);
    const auto want = brute_force_knn(pts, query, k);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].index == want[i].index);
    }
  }
}

TEST_CASE("knn handles duplicate points") {
  std::vector<Point3> pts(10, Point3(1, 2, 3));
  pts.push_back(Point3(5, 5, 5));
  const auto tree = tree_of(pts);
  const auto got = tree.knn({1, 2, 3}, 4);
  REQUIRE(got.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(got[i].index == i);  // ascending index over the zero-distance ties
    CHECK(got[i].distance == 0.0);
  }
}

TEST_CASE("knn clamps k to the cloud size") {
  const std::vector<Point3> pts = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const auto tree = tree_of(pts);
  const auto got = tree.knn({0, 0, 0}, 10);
  REQUIRE(got.size() == 3);
  CHECK(got[0].index == 0);
  CHECK(got[1].index == 1);
  CHECK(got[2].index == 2);
}

TEST_CASE("empty tree returns no hits") {
  KdTree<3> tree;
  CHECK(tree.knn({0, 0, 0}, 5).empty());
  CHECK(tree.radius_search({0, 0, 0}, 1.0).empty());
}

TEST_CASE("radius search equals exhaustive scan and includes the boundary") {
  Rng rng(99);
  const auto pts = random_points(rng, 200, 1.0);
  const auto tree = tree_of(pts);
  for (int q = 0; q < 30; ++q) {
    const Point3 query(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double radius = rng.uniform(0.1, 1.0);
    const auto got = tree.radius_search({query.x(), query.y(), query.z()}, radius);

    std::vector<NeighborHit> want;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = (pts[i] - query).norm();
      if (d <= radius) want.push_back(NeighborHit{i, d});
    }
    std::sort(want.begin(), want.end(), [](const NeighborHit& a, const NeighborHit& b) {
      return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    });
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].index == want[i].index);
    }
  }

  // Exact boundary hit stays included.
  const std::vector<Point3> line = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const auto ltree = tree_of(line);
  CHECK(ltree.radius_search({0, 0, 0}, 1.0).size() == 2);
}

TEST_CASE("high-dimensional tree matches brute force") {
  constexpr int kDim = 8;
  Rng rng(1234);
  std::vector<std::array<double, kDim>> pts(150);
  for (auto& p : pts) {
    for (auto& v : p) v = rng.uniform();
  }
  const KdTree<kDim> tree{std::vector<std::array<double, kDim>>(pts)};

  for (int q = 0; q < 25; ++q) {
    std::array<double, kDim> query;
    for (auto& v : query) v = rng.uniform();

    std::vector<std::pair<double, std::size_t>> want;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d2 = 0;
      for (int d = 0; d < kDim; ++d) {
        d2 += (pts[i][d] - query[d]) * (pts[i][d] - query[d]);
      }
      want.emplace_back(d2, i);
    }
    std::sort(want.begin(), want.end());

    const auto got = tree.knn(query, 5);
    REQUIRE(got.size() == 5);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].index == want[i].second);
    }
  }
}
