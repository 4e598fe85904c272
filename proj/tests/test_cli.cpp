// Integration tests exercising the corrvote binary through its shell
// surface: exit codes, run headers, and the documented file formats.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "corrvote/evaluation.hpp"
#include "corrvote/ply.hpp"
#include "corrvote/synthetic.hpp"

#include "test_support.hpp"

using namespace corrvote;
using corrvote::testing::TempDir;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
  const std::string log = dir.file("cli_log.txt");
  const std::string command =
      std::string(CORRVOTE_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t data_rows(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t rows = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

// Small co-registered pair written to PLY for the file-based commands.
struct CliFixture {
  TempDir dir;
  std::string object_ply;
  std::string scene_ply;
  double radius = 0.0;
  std::size_t points = 700;

  CliFixture() {
    const PointCloud model = make_bumpy_model(points, 404);
    const double res = estimate_resolution(model);
    radius = 8.0 * res;
    const NoisyPair pair = make_noisy_pair(model, 0.3 * res, 405);
    object_ply = dir.file("object.ply");
    scene_ply = dir.file("scene.ply");
    write_ply(object_ply, pair.object);
    write_ply(scene_ply, pair.scene);
  }
};

}  // namespace

TEST_CASE("match writes one row per valid object feature with a run header") {
  CliFixture fx;
  const std::string out = fx.dir.file("corr.csv");
  const RunResult r = run_cli(
      fx.dir, "match " + fx.object_ply + " " + fx.scene_ply + " -o " + out +
                  " --radius " + std::to_string(fx.radius) + " --seed 3");
  CHECK(r.exit_code == 0);
  const std::string header = first_line(out);
  CHECK(header.rfind("# corrvote match", 0) == 0);
  CHECK(header.find("seed=3") != std::string::npos);
  CHECK(data_rows(out) > 0);
  CHECK(data_rows(out) <= fx.points);
}

TEST_CASE("missing input exits 2 and names the path") {
  CliFixture fx;
  const RunResult r = run_cli(
      fx.dir, "match /nonexistent/nope.ply " + fx.scene_ply + " -o " +
                  fx.dir.file("x.csv"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("nope.ply") != std::string::npos);
}

TEST_CASE("kappa zero is a usage error") {
  CliFixture fx;
  const RunResult r = run_cli(
      fx.dir, "vote " + fx.object_ply + " " + fx.scene_ply + " -o " +
                  fx.dir.file("t.csv") + " --kappa 0");
  CHECK(r.exit_code == 2);
}

TEST_CASE("vote echoes the default parameters in the run header") {
  CliFixture fx;
  const std::string out = fx.dir.file("tallies.csv");
  const RunResult r = run_cli(
      fx.dir, "vote " + fx.object_ply + " " + fx.scene_ply + " -o " + out +
                  " --radius " + std::to_string(fx.radius));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("kappa=250 sigma=0.9") != std::string::npos);
  const std::string header = first_line(out);
  CHECK(header.find("kappa=250 sigma=0.9") != std::string::npos);
  CHECK(header.find("t_ratio=0.2") != std::string::npos);
  CHECK(r.output.find("decision_threshold:") != std::string::npos);
  CHECK(data_rows(out) > 0);
}

TEST_CASE("external correspondences with an out-of-range index exit 2 naming the row") {
  CliFixture fx;
  const std::string bad = fx.dir.file("bad.csv");
  {
    std::ofstream out(bad);
    out << "object_index,scene_index,feature_distance_1,feature_distance_2,score\n";
    out << "0,0,0.1,0.5,0.8\n";
    out << "1," << fx.points + 10 << ",0.1,0.5,0.8\n";  // line 3: out of range
  }
  const RunResult r = run_cli(
      fx.dir, "vote " + fx.object_ply + " " + fx.scene_ply + " -o " +
                  fx.dir.file("t.csv") + " --correspondences " + bad);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find(":3") != std::string::npos);
  CHECK(r.output.find("scene_index") != std::string::npos);
}

TEST_CASE("vote accepts externally matched correspondences") {
  CliFixture fx;
  const std::string corr = fx.dir.file("corr.csv");
  RunResult r = run_cli(fx.dir, "match " + fx.object_ply + " " + fx.scene_ply +
                                    " -o " + corr + " --radius " +
                                    std::to_string(fx.radius));
  REQUIRE(r.exit_code == 0);
  const std::string out = fx.dir.file("tallies.csv");
  r = run_cli(fx.dir, "vote " + fx.object_ply + " " + fx.scene_ply + " -o " + out +
                          " --correspondences " + corr + " --radius " +
                          std::to_string(fx.radius));
  CHECK(r.exit_code == 0);
  CHECK(data_rows(out) == data_rows(corr));
}

TEST_CASE("feature dump and reload produce identical voting inputs") {
  CliFixture fx;
  const std::string fobj = fx.dir.file("fobj.csv");
  const std::string fscn = fx.dir.file("fscn.csv");
  const std::string corr1 = fx.dir.file("corr1.csv");
  RunResult r = run_cli(
      fx.dir, "match " + fx.object_ply + " " + fx.scene_ply + " -o " + corr1 +
                  " --radius " + std::to_string(fx.radius) +
                  " --dump-features-object " + fobj + " --dump-features-scene " +
                  fscn);
  REQUIRE(r.exit_code == 0);

  const std::string corr2 = fx.dir.file("corr2.csv");
  r = run_cli(fx.dir, "match " + fx.object_ply + " " + fx.scene_ply + " -o " +
                          corr2 + " --features-object " + fobj +
                          " --features-scene " + fscn);
  REQUIRE(r.exit_code == 0);

  // Same matches either way; only the header lines may differ.
  std::ifstream a(corr1), b(corr2);
  std::string la, lb;
  std::getline(a, la);
  std::getline(b, lb);
  std::size_t differing = 0;
  while (std::getline(a, la) && std::getline(b, lb)) {
    if (la != lb) ++differing;
  }
  CHECK(differing == 0);
}

TEST_CASE("synth then detect produces a detection row") {
  TempDir dir;
  // A single-instance scene assembled from library pieces.
  const PointCloud model = make_bumpy_model(900, 42);
  const double res = estimate_resolution(model);
  Rng rng(43);
  const RigidTransform gt = random_rigid_transform(rng, 0.1);
  const PointCloud instance = transformed(cut_by_plane(model, rng.unit_vector(), 0.6), gt);
  const PointCloud clutter =
      make_clutter_patches(instance.size(), 30, 3.0 * res, 0.4, 44);
  PointCloud scene = merge_clouds({&instance, &clutter});
  scene = add_gaussian_noise(scene, 0.2 * res, 45);

  const std::string object_ply = dir.file("object.ply");
  const std::string scene_ply = dir.file("scene.ply");
  write_ply(object_ply, model);
  write_ply(scene_ply, scene);

  const std::string out = dir.file("detections.csv");
  const RunResult r = run_cli(
      dir, "detect " + object_ply + " " + scene_ply + " -o " + out + " --radius " +
               std::to_string(8.0 * res) +
               " --normal-orientation local --kappa 100 --top-n 1");
  CHECK(r.exit_code == 0);
  CHECK(data_rows(out) == 1);
  const std::string header = first_line(out);
  CHECK(header.find("icp_iters=10") != std::string::npos);

  // JSON flavor of the same output.
  const std::string json_out = dir.file("detections.json");
  const RunResult rj = run_cli(
      dir, "detect " + object_ply + " " + scene_ply + " -o " + json_out +
               " --radius " + std::to_string(8.0 * res) +
               " --normal-orientation local --kappa 100 --top-n 1");
  CHECK(rj.exit_code == 0);
  std::ifstream jin(json_out);
  std::stringstream jss;
  jss << jin.rdbuf();
  CHECK(jss.str().find("\"pose_row_major\"") != std::string::npos);
}

TEST_CASE("bench reports one row per size with a ratio column") {
  TempDir dir;
  const std::string out = dir.file("timing.csv");
  const RunResult r = run_cli(
      dir, "bench --sizes 400,800 --runs 1 -o " + out + " --kappa 50");
  CHECK(r.exit_code == 0);
  CHECK(data_rows(out) == 2);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);  // comment
  std::getline(in, line);  // header
  CHECK(line == "size,runs,median_ms,ratio_vs_prev");
}

TEST_CASE("eval single writes a one-row report and a curve file") {
  TempDir dir;
  const std::string report = dir.file("report.csv");
  const std::string curves = dir.file("curves.csv");
  const RunResult r = run_cli(
      dir, "eval --experiment single --points 500 --sigma-mm 1.0 -o " + report +
               " --curves " + curves + " --kappa 40 --seed 11");
  CHECK(r.exit_code == 0);
  CHECK(data_rows(report) == 1);
  CHECK(data_rows(curves) > 0);
  CHECK(first_line(report).find("seed=11") != std::string::npos);
}

TEST_CASE("unknown experiment exits 2") {
  TempDir dir;
  const RunResult r =
      run_cli(dir, "eval --experiment banana -o " + dir.file("r.csv"));
  CHECK(r.exit_code == 2);
}
