#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "corrvote/correspondence.hpp"
#include "corrvote/rng.hpp"

#include "test_support.hpp"

using namespace corrvote;
using corrvote::testing::TempDir;

namespace {

Descriptor random_descriptor(Rng& rng) {
  Descriptor d;
  double norm = 0.0;
  for (auto& v : d.values) {
    v = rng.uniform();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& v : d.values) v /= norm;
  d.valid = true;
  return d;
}

FeatureSet random_features(Rng& rng, std::size_t n) {
  FeatureSet fs;
  fs.descriptors.resize(n);
  fs.frames.resize(n);
  for (std::size_t i = 0; i < n; ++i) fs.descriptors[i] = random_descriptor(rng);
  return fs;
}

// Exhaustive double-loop matcher: for each valid object feature, the two
// closest valid scene features with (distance, index) ordering.
CorrespondenceSet brute_force_match(const FeatureSet& object, const FeatureSet& scene) {
  CorrespondenceSet cs;
  for (std::size_t i = 0; i < object.size(); ++i) {
    if (!object.descriptors[i].valid) continue;
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t j = 0; j < scene.size(); ++j) {
      if (!scene.descriptors[j].valid) continue;
      dists.emplace_back(object.descriptors[i].distance(scene.descriptors[j]), j);
    }
    std::sort(dists.begin(), dists.end());
    Correspondence c;
    c.object_index = i;
    c.scene_index = dists[0].second;
    c.feature_distance_1 = dists[0].first;
    c.feature_distance_2 = dists[1].first;
    c.score = score_ratio(c);
    cs.items.push_back(c);
  }
  return cs;
}

}  // namespace

TEST_CASE("identical feature matches at distance zero") {
  Rng rng(1);
  FeatureSet scene = random_features(rng, 10);
  FeatureSet object;
  object.descriptors.push_back(scene.descriptors[4]);
  object.frames.emplace_back();

  const CorrespondenceSet cs = match_features(object, scene);
  REQUIRE(cs.size() == 1);
  CHECK(cs.items[0].scene_index == 4);
  CHECK(cs.items[0].feature_distance_1 == 0.0);
  CHECK(score_ratio(cs.items[0]) == 1.0);
}

TEST_CASE("matcher equals the exhaustive oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureSet object = random_features(rng, 10 + rng.uniform_index(190));
    FeatureSet scene = random_features(rng, 10 + rng.uniform_index(190));
    // Invalidate a few object features.
    for (std::size_t i = 0; i < object.size(); i += 7) {
      object.descriptors[i].valid = false;
    }
    const CorrespondenceSet got = match_features(object, scene);
    const CorrespondenceSet want = brute_force_match(object, scene);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got.items[i].object_index == want.items[i].object_index);
      CHECK(got.items[i].scene_index == want.items[i].scene_index);
      CHECK(got.items[i].feature_distance_1 ==
            doctest::Approx(want.items[i].feature_distance_1).epsilon(1e-12));
      CHECK(got.items[i].feature_distance_2 ==
            doctest::Approx(want.items[i].feature_distance_2).epsilon(1e-12));
    }
  }
}

TEST_CASE("all-invalid object features give an empty set") {
  Rng rng(3);
  FeatureSet object = random_features(rng, 5);
  FeatureSet scene = random_features(rng, 5);
  for (auto& d : object.descriptors) d.valid = false;
  CHECK(match_features(object, scene).empty());
}

TEST_CASE("fewer than two valid scene features is an error") {
  Rng rng(4);
  FeatureSet object = random_features(rng, 3);
  FeatureSet scene = random_features(rng, 3);
  scene.descriptors[0].valid = false;
  scene.descriptors[2].valid = false;
  CHECK_THROWS_AS(match_features(object, scene), std::invalid_argument);
}

TEST_CASE("score_l2 semantics") {
  Correspondence c;
  c.feature_distance_1 = 0.25;
  c.feature_distance_2 = 0.5;
  CHECK(score_l2(c) == -0.25);
  c.feature_distance_1 = 0.0;
  CHECK(score_l2(c) == 0.0);

  // Ordering by score_l2 equals ascending ordering by distance.
  Rng rng(5);
  std::vector<Correspondence> cs(20);
  for (auto& x : cs) x.feature_distance_1 = rng.uniform();
  std::vector<Correspondence> by_score = cs;
  std::sort(by_score.begin(), by_score.end(),
            [](const auto& a, const auto& b) { return score_l2(a) > score_l2(b); });
  std::vector<Correspondence> by_dist = cs;
  std::sort(by_dist.begin(), by_dist.end(), [](const auto& a, const auto& b) {
    return a.feature_distance_1 < b.feature_distance_1;
  });
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(by_score[i].feature_distance_1 == by_dist[i].feature_distance_1);
  }
}

TEST_CASE("score_ratio values and range") {
  Correspondence c;
  c.feature_distance_1 = 0.2;
  c.feature_distance_2 = 1.0;
  CHECK(score_ratio(c) == doctest::Approx(0.8));

  c.feature_distance_1 = c.feature_distance_2 = 0.7;
  CHECK(score_ratio(c) == 0.0);

  c.feature_distance_1 = 0.0;
  c.feature_distance_2 = 0.4;
  CHECK(score_ratio(c) == 1.0);

  // Duplicate-feature degenerate case.
  c.feature_distance_1 = c.feature_distance_2 = 0.0;
  CHECK(score_ratio(c) == 0.0);

  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    c.feature_distance_2 = rng.uniform(1e-6, 2.0);
    c.feature_distance_1 = c.feature_distance_2 * rng.uniform();
    const double s = score_ratio(c);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("ratio_set boundary is inclusive") {
  CorrespondenceSet cs;
  auto add = [&](double d1, double d2) {
    Correspondence c;
    c.object_index = cs.size();
    c.feature_distance_1 = d1;
    c.feature_distance_2 = d2;
    cs.items.push_back(c);
  };
  // Dyadic distances make the ratio scores exact: the boundary case tests
  // >= rather than floating-point luck.
  add(0.75, 1.0);    // ratio score exactly 0.25 -> included at t = 0.25
  add(0.8125, 1.0);  // 0.1875 -> excluded
  add(1.0, 1.0);     // 0 -> excluded

  const auto mask = ratio_set(cs, 0.25);
  CHECK(mask[0] == 1);
  CHECK(mask[1] == 0);
  CHECK(mask[2] == 0);

  // All-zero scores produce an empty mask.
  CorrespondenceSet zeros;
  for (int i = 0; i < 5; ++i) {
    Correspondence c;
    c.object_index = static_cast<std::size_t>(i);
    c.feature_distance_1 = c.feature_distance_2 = 1.0;
    zeros.items.push_back(c);
  }
  const auto zmask = ratio_set(zeros, 0.2);
  CHECK(std::count(zmask.begin(), zmask.end(), char{1}) == 0);
}

TEST_CASE("ratio set shrinks monotonically in the threshold") {
  Rng rng(7);
  CorrespondenceSet cs;
  for (int i = 0; i < 200; ++i) {
    Correspondence c;
    c.object_index = static_cast<std::size_t>(i);
    c.feature_distance_2 = rng.uniform(0.1, 1.0);
    c.feature_distance_1 = c.feature_distance_2 * rng.uniform();
    cs.items.push_back(c);
  }
  std::size_t prev = cs.size() + 1;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto mask = ratio_set(cs, t);
    const auto count = static_cast<std::size_t>(
        std::count(mask.begin(), mask.end(), char{1}));
    CHECK(count <= prev);
    prev = count;
  }
}

TEST_CASE("correspondence csv round trip and validation") {
  TempDir dir;
  Rng rng(8);
  FeatureSet object = random_features(rng, 30);
  FeatureSet scene = random_features(rng, 40);
  const CorrespondenceSet cs = match_features(object, scene);

  const std::string path = dir.file("corr.csv");
  save_correspondences_csv(path, cs, "unit test");
  const CorrespondenceSet back = load_correspondences_csv(path, 30, 40);
  REQUIRE(back.size() == cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(back.items[i].object_index == cs.items[i].object_index);
    CHECK(back.items[i].scene_index == cs.items[i].scene_index);
    CHECK(back.items[i].feature_distance_1 == cs.items[i].feature_distance_1);
    CHECK(back.items[i].feature_distance_2 == cs.items[i].feature_distance_2);
    CHECK(back.items[i].score == cs.items[i].score);
  }

  // Out-of-range indices are rejected, naming the row.
  try {
    load_correspondences_csv(path, 30, 10);
    FAIL("expected a validation error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("scene_index") != std::string::npos);
    CHECK(msg.find(path + ":") != std::string::npos);
  }
}
