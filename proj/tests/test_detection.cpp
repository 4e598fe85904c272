#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corrvote/detection.hpp"
#include "corrvote/evaluation.hpp"
#include "corrvote/rng.hpp"
#include "corrvote/synthetic.hpp"

#include "test_support.hpp"

using namespace corrvote;

namespace {

struct DetectionScene {
  PointCloud object;  // with normals
  PointCloud scene;   // with normals
  RigidTransform gt;
  double scene_resolution = 0.0;
  FeatureSet object_features;
  FeatureSet scene_features;
  CorrespondenceSet correspondences;
};

PointCloud with_normals(const PointCloud& cloud) {
  const double res = estimate_resolution(cloud);
  // Local orientation: instances keep the object's normal field even when
  // clutter moves the scene centroid around.
  return estimate_normals(cloud, 4.0 * res, std::nullopt, 4,
                          NormalOrientation::kLocalOutward);
}

// Half-occluded instance of the object under a random pose, plus scattered
// clutter patches (roughly 2x the instance point count). `instance_present`
// false gives the clutter-only scene.
DetectionScene build_detection_scene(std::uint64_t seed, bool instance_present,
                                     bool second_instance = false) {
  DetectionScene out;
  Rng rng(seed);

  const PointCloud model = make_bumpy_model(1600, 500 + seed % 7);
  const double model_res = estimate_resolution(model);

  std::vector<PointCloud> parts;
  out.gt = random_rigid_transform(rng, 0.15);
  if (instance_present) {
    const PointCloud half = cut_by_plane(model, rng.unit_vector(), 0.5);
    parts.push_back(transformed(half, out.gt));
  }
  if (second_instance) {
    RigidTransform g2 = random_rigid_transform(rng, 0.1);
    g2.translation += Vec3(0.45, 0.45, 0.45);  // far from the first instance
    parts.push_back(transformed(model, g2));
  }
  const std::size_t instance_points =
      instance_present ? parts.front().size() : 800;
  parts.push_back(make_clutter_patches(2 * instance_points, 100, 2.0 * model_res,
                                       0.7, seed + 11));

  std::vector<const PointCloud*> ptrs;
  for (const auto& p : parts) ptrs.push_back(&p);
  PointCloud merged = merge_clouds(ptrs);
  merged = add_gaussian_noise(merged, 0.2 * model_res, seed + 13);

  out.object = with_normals(model);
  out.scene = with_normals(merged);
  out.scene_resolution = estimate_resolution(out.scene);

  const double radius = 8.0 * model_res;
  out.object_features = compute_all_features(out.object, radius, 4);
  out.scene_features = compute_all_features(out.scene, radius, 4);
  out.correspondences =
      match_features(out.object_features, out.scene_features, 4);
  return out;
}

PipelineOptions default_pipeline_options() {
  PipelineOptions options;
  options.voting.kappa = 100;
  options.threads = 4;
  return options;
}

}  // namespace

TEST_CASE("icp at the ground truth is a fixed point") {
  Rng rng(60);
  const PointCloud object(corrvote::testing::random_points(rng, 300, 0.2));
  const RigidTransform g = random_rigid_transform(rng, 0.5);
  const PointCloud scene = transformed(object, g);

  const double res = estimate_resolution(scene);
  const IcpResult r = icp_refine(object, scene, g, 10, 5.0 * res);
  CHECK_FALSE(r.starved);
  CHECK((r.pose.rotation - g.rotation).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((r.pose.translation - g.translation).norm() < 1e-9);
}

TEST_CASE("icp converges from a one-resolution offset") {
  const PointCloud object = make_bumpy_model(1200, 61);
  const double res = estimate_resolution(object);

  Rng rng(62);
  const RigidTransform g = random_rigid_transform(rng, 0.2);
  const PointCloud scene = transformed(object, g);

  RigidTransform initial = g;
  initial.translation += res * rng.unit_vector();

  const IcpResult r = icp_refine(object, scene, initial, 10, 5.0 * res);
  CHECK_FALSE(r.starved);
  CHECK((r.pose.translation - g.translation).norm() < 0.1 * res);
  CHECK(rotation_angle(r.pose.rotation, g.rotation) < 0.05);

  // RMSE at pairing time is nonincreasing on this well-posed instance.
  REQUIRE(r.rmse_history.size() == 10);
  for (std::size_t i = 1; i < r.rmse_history.size(); ++i) {
    CHECK(r.rmse_history[i] <= r.rmse_history[i - 1] + 1e-12);
  }
}

TEST_CASE("icp starves when the object is out of range") {
  Rng rng(63);
  const PointCloud object(corrvote::testing::random_points(rng, 100, 0.1));
  std::vector<Point3> far;
  for (const auto& p : object.points()) far.push_back(p + Vec3(100, 0, 0));
  const PointCloud scene(far);

  const IcpResult r = icp_refine(object, scene, RigidTransform::identity(), 10, 0.05);
  CHECK(r.starved);
  CHECK((r.pose.rotation - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("coverage on exact, disjoint, and half scenes") {
  Rng rng(64);
  const PointCloud object(corrvote::testing::random_points(rng, 400, 0.2));
  const RigidTransform g = random_rigid_transform(rng, 0.4);
  const PointCloud scene = transformed(object, g);
  const double tol = 1e-6;

  CHECK(coverage(object, scene, g, tol) == 1.0);

  std::vector<Point3> far;
  for (const auto& p : scene.points()) far.push_back(p + Vec3(10, 0, 0));
  CHECK(coverage(object, PointCloud(far), g, 0.01) == 0.0);

  // Scene built from half of the object's points.
  std::vector<Point3> half(scene.points().begin(),
                           scene.points().begin() + scene.size() / 2);
  const double c = coverage(object, PointCloud(half), g, tol);
  CHECK(c == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("detection overlap compares two poses pointwise") {
  Rng rng(65);
  const PointCloud object(corrvote::testing::random_points(rng, 200, 0.2));
  const RigidTransform g = random_rigid_transform(rng, 0.3);
  CHECK(detection_overlap(object, g, g, 1e-9) == 1.0);

  RigidTransform shifted = g;
  shifted.translation += Vec3(1, 0, 0);
  CHECK(detection_overlap(object, g, shifted, 0.01) == 0.0);
}

TEST_CASE("single-instance scene is detected with an accurate pose") {
  const DetectionScene s = build_detection_scene(70, true);

  DetectionParams dp;
  dp.top_n = 1;
  const auto detections = detect(s.object, s.scene, s.object_features,
                                 s.scene_features, s.correspondences,
                                 default_pipeline_options(), dp);
  REQUIRE(detections.size() == 1);
  const Detection& d = detections.front();
  CHECK(d.accepted);
  CHECK(d.coverage >= 0.05);
  CHECK((d.pose.translation - s.gt.translation).norm() < 2.0 * s.scene_resolution);
  CHECK(rotation_angle(d.pose.rotation, s.gt.rotation) < 5.0 * M_PI / 180.0);
}

TEST_CASE("clutter-only scene yields no accepted detections") {
  const DetectionScene s = build_detection_scene(71, false);

  DetectionParams dp;
  dp.top_n = 1;
  const auto detections = detect(s.object, s.scene, s.object_features,
                                 s.scene_features, s.correspondences,
                                 default_pipeline_options(), dp);
  for (const auto& d : detections) {
    CHECK_FALSE(d.accepted);
  }
}

TEST_CASE("two separated instances are both found with top-100 hypotheses") {
  // Two complementary partial views under different poses. The view size is
  // deliberate: the ranking lists each pose cluster contiguously, so both
  // clusters must fit inside the top-100 window while still crowding out
  // junk hypotheses.
  for (const std::uint64_t seed : {std::uint64_t{78}, std::uint64_t{84},
                                   std::uint64_t{87}}) {
    CAPTURE(seed);
    Rng rng(seed);
    const PointCloud model = make_bumpy_model(1600, 500 + seed % 7);
    const double model_res = estimate_resolution(model);

    const Vec3 cut = rng.unit_vector();
    const RigidTransform g1 = random_rigid_transform(rng, 0.15);
    const PointCloud view1 = transformed(cut_by_plane(model, cut, 0.24), g1);
    RigidTransform g2 = random_rigid_transform(rng, 0.1);
    g2.translation += Vec3(0.45, 0.45, 0.45);
    const PointCloud view2 = transformed(cut_by_plane(model, -cut, 0.24), g2);

    PointCloud merged = merge_clouds({&view1, &view2});
    merged = add_gaussian_noise(merged, 0.1 * model_res, seed + 13);

    const PointCloud object = with_normals(model);
    const PointCloud scene = with_normals(merged);
    const double scene_res = estimate_resolution(scene);

    const double radius = 8.0 * model_res;
    const FeatureSet of = compute_all_features(object, radius, 4);
    const FeatureSet sf = compute_all_features(scene, radius, 4);
    const CorrespondenceSet cs = match_features(of, sf, 4);

    DetectionParams dp;
    dp.top_n = 100;
    const auto detections =
        detect(object, scene, of, sf, cs, default_pipeline_options(), dp);

    std::size_t accepted = 0;
    double err1 = 1e9;
    double err2 = 1e9;
    for (const auto& d : detections) {
      if (!d.accepted) continue;
      ++accepted;
      err1 = std::min(err1, (d.pose.translation - g1.translation).norm());
      err2 = std::min(err2, (d.pose.translation - g2.translation).norm());
    }
    CHECK(accepted == 2);
    CHECK(err1 < 2.0 * scene_res);
    CHECK(err2 < 2.0 * scene_res);

    // Accepted detections are pairwise within the overlap bound.
    const double tol = 2.0 * scene_res;
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (!detections[i].accepted) continue;
      for (std::size_t j = i + 1; j < detections.size(); ++j) {
        if (!detections[j].accepted) continue;
        CHECK(detection_overlap(object, detections[i].pose, detections[j].pose,
                                tol) <= dp.overlap_max);
      }
    }
  }
}

TEST_CASE("detect is deterministic") {
  const DetectionScene s = build_detection_scene(73, true);
  DetectionParams dp;
  dp.top_n = 5;
  const auto a = detect(s.object, s.scene, s.object_features, s.scene_features,
                        s.correspondences, default_pipeline_options(), dp);
  const auto b = detect(s.object, s.scene, s.object_features, s.scene_features,
                        s.correspondences, default_pipeline_options(), dp);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].accepted == b[i].accepted);
    CHECK(a[i].coverage == b[i].coverage);
    CHECK((a[i].pose.rotation - b[i].pose.rotation).norm() == 0.0);
  }
}

TEST_CASE("empty correspondence set yields an empty detection list") {
  Rng rng(74);
  const PointCloud cloud(corrvote::testing::random_points(rng, 50, 0.1));
  FeatureSet fs;
  fs.descriptors.resize(50);
  fs.frames.resize(50);
  const CorrespondenceSet cs;
  const auto detections =
      detect(cloud, cloud, fs, fs, cs, default_pipeline_options(), DetectionParams{});
  CHECK(detections.empty());
}

TEST_CASE("detections csv includes the pose in row-major order") {
  corrvote::testing::TempDir dir;
  std::vector<Detection> ds(1);
  ds[0].pose.translation = Vec3(1, 2, 3);
  ds[0].coverage = 0.5;
  ds[0].accepted = true;
  const std::string path = dir.file("det.csv");
  save_detections_csv(path, ds, "detect run");

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // comment
  std::getline(in, line);  // header
  CHECK(line.find("r00") != std::string::npos);
  std::getline(in, line);
  CHECK(line.find(",1,0.5,1,0,0,0,1,0,0,0,1,1,2,3") != std::string::npos);
}
