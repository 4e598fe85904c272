// corrvote command line: feature matching, two-stage correspondence voting,
// synthetic evaluation sweeps, object detection, and a complexity bench.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrvote/csv.hpp"
#include "corrvote/detection.hpp"
#include "corrvote/evaluation.hpp"
#include "corrvote/pipeline.hpp"
#include "corrvote/ply.hpp"
#include "corrvote/synthetic.hpp"
#include "corrvote/threading.hpp"

namespace {

using namespace corrvote;

// Input problems exit with code 2; anything else that throws exits with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  unsigned threads = 0;  // 0 = all hardware threads
  std::uint64_t seed = 7;
};

struct FeatureOptions {
  double radius = 0.015;
  double normal_radius = 0.0;  // 0 = 4 x cloud resolution
  std::string normal_orientation = "centroid";
  std::string features_object;  // optional external feature CSVs
  std::string features_scene;
  std::string dump_features_object;
  std::string dump_features_scene;
};

struct VoteOptions {
  std::size_t kappa = 250;
  double sigma_sim = 0.9;
  double t_ratio = 0.2;
  double delta = 0.0;  // 0 = 5 x scene resolution
  std::size_t bins = 100;
  std::string degenerate_policy = "accept";
};

PointCloud load_cloud(const std::string& path) {
  try {
    return read_ply(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

NormalOrientation parse_orientation(const std::string& name) {
  if (name == "centroid") return NormalOrientation::kAwayFromCentroid;
  if (name == "local") return NormalOrientation::kLocalOutward;
  throw UsageError("unknown normal orientation '" + name + "'");
}

PointCloud ensure_normals(PointCloud cloud, const FeatureOptions& opts,
                          unsigned threads) {
  if (cloud.has_normals()) return cloud;
  if (cloud.size() < 2) {
    throw UsageError("cloud has fewer than 2 points");
  }
  const double radius = opts.normal_radius > 0.0
                            ? opts.normal_radius
                            : 4.0 * estimate_resolution(cloud);
  return estimate_normals(cloud, radius, std::nullopt, threads,
                          parse_orientation(opts.normal_orientation));
}

FeatureSet features_for(const PointCloud& cloud, const std::string& external_csv,
                        const FeatureOptions& opts, unsigned threads) {
  if (!external_csv.empty()) {
    try {
      FeatureSet fs = load_features_csv(external_csv);
      if (fs.size() != cloud.size()) {
        throw UsageError(external_csv + ": feature count " +
                         std::to_string(fs.size()) + " does not match cloud size " +
                         std::to_string(cloud.size()));
      }
      return fs;
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  return compute_all_features(cloud, opts.radius, threads);
}

std::string run_header(const std::string& command, const CommonOptions& common,
                       const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream os;
  os << "corrvote " << command;
  for (const auto& [k, v] : kv) os << " " << k << "=" << v;
  os << " seed=" << common.seed << " threads=" << resolve_threads(common.threads);
  return os.str();
}

std::vector<double> parse_grid(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  for (const auto& token : split_csv_line(csv)) {
    out.push_back(parse_double(token, what));
  }
  if (out.empty()) throw UsageError(what + ": empty grid");
  return out;
}

// ---- match ----

struct MatchArgs {
  std::string object_path;
  std::string scene_path;
  std::string output;
  FeatureOptions features;
};

void run_match(const MatchArgs& args, const CommonOptions& common) {
  const unsigned threads = resolve_threads(common.threads);
  PointCloud object = ensure_normals(load_cloud(args.object_path), args.features,
                                     threads);
  PointCloud scene = ensure_normals(load_cloud(args.scene_path), args.features,
                                    threads);

  const FeatureSet object_features =
      features_for(object, args.features.features_object, args.features, threads);
  const FeatureSet scene_features =
      features_for(scene, args.features.features_scene, args.features, threads);

  const std::string header = run_header(
      "match", common,
      {{"object", args.object_path},
       {"scene", args.scene_path},
       {"radius", format_double(args.features.radius)}});

  if (!args.features.dump_features_object.empty()) {
    save_features_csv(args.features.dump_features_object, object_features, header);
  }
  if (!args.features.dump_features_scene.empty()) {
    save_features_csv(args.features.dump_features_scene, scene_features, header);
  }

  CorrespondenceSet cs;
  try {
    cs = match_features(object_features, scene_features, threads);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  save_correspondences_csv(args.output, cs, header);
  std::cout << header << "\n";
  std::cout << "correspondences: " << cs.size() << " -> " << args.output << "\n";
}

// ---- vote ----

struct VoteArgs {
  std::string object_path;
  std::string scene_path;
  std::string output;
  std::string correspondences;  // optional external CSV
  FeatureOptions features;
  VoteOptions vote;
};

void run_vote(const VoteArgs& args, const CommonOptions& common) {
  const unsigned threads = resolve_threads(common.threads);
  PointCloud object = ensure_normals(load_cloud(args.object_path), args.features,
                                     threads);
  PointCloud scene = ensure_normals(load_cloud(args.scene_path), args.features,
                                    threads);

  const FeatureSet object_features =
      features_for(object, args.features.features_object, args.features, threads);
  const FeatureSet scene_features =
      features_for(scene, args.features.features_scene, args.features, threads);

  CorrespondenceSet cs;
  if (!args.correspondences.empty()) {
    try {
      cs = load_correspondences_csv(args.correspondences, object.size(),
                                    scene.size());
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  } else {
    try {
      cs = match_features(object_features, scene_features, threads);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (cs.empty()) {
    throw UsageError("correspondence set is empty");
  }

  PipelineOptions options;
  options.voting.kappa = args.vote.kappa;
  options.voting.sigma_sim = args.vote.sigma_sim;
  options.voting.t_ratio = args.vote.t_ratio;
  options.voting.delta = args.vote.delta;
  options.histogram_bins = args.vote.bins;
  options.degenerate_policy = args.vote.degenerate_policy == "reject"
                                  ? DegeneratePolicy::kRejectAll
                                  : DegeneratePolicy::kAcceptAll;
  options.threads = threads;

  const PipelineResult result = run_vote_pipeline(
      cs, object, scene, object_features.frames, scene_features.frames, options);

  const std::string header = run_header(
      "vote", common,
      {{"object", args.object_path},
       {"scene", args.scene_path},
       {"kappa", std::to_string(args.vote.kappa)},
       {"sigma", format_double(args.vote.sigma_sim)},
       {"t_ratio", format_double(args.vote.t_ratio)},
       {"delta", format_double(result.delta)},
       {"bins", std::to_string(args.vote.bins)},
       {"threshold", format_double(result.decision_threshold)},
       {"accepted", std::to_string(result.accepted_count)}});

  save_tallies_csv(args.output, cs, result.voting.tallies, header);
  std::cout << header << "\n";
  std::cout << "decision_threshold: " << format_double(result.decision_threshold)
            << (result.degenerate_threshold ? " (degenerate: all scores identical)"
                                            : "")
            << "\n";
  std::cout << "accepted: " << result.accepted_count << " / " << cs.size() << " -> "
            << args.output << "\n";
}

// ---- eval ----

struct EvalArgs {
  std::string experiment = "noise";
  std::string output;
  std::string curves;
  std::size_t points = 10000;
  double sigma_mm = 2.5;
  std::string grid;  // optional comma-separated override
  bool rigid_offset = false;
  FeatureOptions features;
  VoteOptions vote;
};

void run_eval(const EvalArgs& args, const CommonOptions& common) {
  ExperimentParams params;
  params.model_points = args.points;
  params.seed = common.seed;
  params.descriptor_radius = args.features.radius;
  params.rigid_offset = args.rigid_offset;
  params.voting.kappa = args.vote.kappa;
  params.voting.sigma_sim = args.vote.sigma_sim;
  params.voting.t_ratio = args.vote.t_ratio;
  params.voting.delta = args.vote.delta;
  params.histogram_bins = args.vote.bins;
  params.degenerate_policy = args.vote.degenerate_policy == "reject"
                                 ? DegeneratePolicy::kRejectAll
                                 : DegeneratePolicy::kAcceptAll;
  params.threads = resolve_threads(common.threads);

  std::vector<ExperimentRow> rows;
  if (args.experiment == "noise") {
    std::vector<double> sigmas;
    if (!args.grid.empty()) {
      for (double mm : parse_grid(args.grid, "--grid")) sigmas.push_back(mm * 1e-3);
    } else {
      for (int i = 1; i <= 15; ++i) sigmas.push_back(0.5e-3 * i);
    }
    rows = run_noise_sweep(params, sigmas);
  } else if (args.experiment == "kappa") {
    std::vector<std::size_t> kappas;
    if (!args.grid.empty()) {
      for (double v : parse_grid(args.grid, "--grid")) {
        kappas.push_back(static_cast<std::size_t>(v));
      }
    } else {
      for (std::size_t k = 50; k <= 500; k += 50) kappas.push_back(k);
    }
    rows = run_kappa_sweep(params, args.sigma_mm * 1e-3, kappas);
  } else if (args.experiment == "sigma-sim") {
    std::vector<double> sims;
    if (!args.grid.empty()) {
      sims = parse_grid(args.grid, "--grid");
    } else {
      for (int i = 0; i <= 9; ++i) sims.push_back(0.5 + 0.05 * i);
    }
    rows = run_sigma_sim_sweep(params, args.sigma_mm * 1e-3, sims);
  } else if (args.experiment == "single") {
    rows = run_noise_sweep(params, {args.sigma_mm * 1e-3});
  } else {
    throw UsageError("unknown experiment '" + args.experiment +
                     "' (noise, kappa, sigma-sim, single)");
  }

  const std::string header = run_header(
      "eval", common,
      {{"experiment", args.experiment},
       {"points", std::to_string(args.points)},
       {"radius", format_double(args.features.radius)},
       {"kappa", std::to_string(args.vote.kappa)},
       {"sigma", format_double(args.vote.sigma_sim)},
       {"t_ratio", format_double(args.vote.t_ratio)}});
  save_report_csv(args.output, rows, header);
  if (!args.curves.empty()) save_curves_csv(args.curves, rows, header);

  std::cout << header << "\n";
  std::printf("%10s %6s %9s %9s %9s %9s %9s\n", "sigma_mm", "kappa", "inliers",
              "precision", "recall", "f1", "max_f1");
  for (const auto& r : rows) {
    std::printf("%10.2f %6zu %8.1f%% %9.3f %9.3f %9.3f %9.3f\n", r.sigma * 1e3,
                r.kappa, 100.0 * r.report.inlier_fraction,
                r.report.precision_at_decision, r.report.recall_at_decision,
                r.report.f1_at_decision, r.report.max_f1);
  }
}

// ---- detect ----

struct DetectArgs {
  std::string object_path;
  std::string scene_path;
  std::string output;
  std::string export_ply_prefix;
  FeatureOptions features{.radius = 0.03};  // detection default radius
  VoteOptions vote;
  DetectionParams detection;
};

void run_detect(const DetectArgs& args, const CommonOptions& common) {
  const unsigned threads = resolve_threads(common.threads);
  PointCloud object = ensure_normals(load_cloud(args.object_path), args.features,
                                     threads);
  PointCloud scene = ensure_normals(load_cloud(args.scene_path), args.features,
                                    threads);

  const FeatureSet object_features =
      features_for(object, args.features.features_object, args.features, threads);
  const FeatureSet scene_features =
      features_for(scene, args.features.features_scene, args.features, threads);

  CorrespondenceSet cs;
  try {
    cs = match_features(object_features, scene_features, threads);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  PipelineOptions options;
  options.voting.kappa = args.vote.kappa;
  options.voting.sigma_sim = args.vote.sigma_sim;
  options.voting.t_ratio = args.vote.t_ratio;
  options.voting.delta = args.vote.delta;
  options.histogram_bins = args.vote.bins;
  options.threads = threads;

  const auto detections = detect(object, scene, object_features, scene_features, cs,
                                 options, args.detection);

  const std::string header = run_header(
      "detect", common,
      {{"object", args.object_path},
       {"scene", args.scene_path},
       {"radius", format_double(args.features.radius)},
       {"kappa", std::to_string(args.vote.kappa)},
       {"top_n", std::to_string(args.detection.top_n)},
       {"overlap_max", format_double(args.detection.overlap_max)},
       {"coverage_min", format_double(args.detection.coverage_min)},
       {"icp_iters", std::to_string(args.detection.icp_iterations)}});

  if (args.output.ends_with(".json")) {
    nlohmann::json out;
    out["header"] = header;
    out["detections"] = nlohmann::json::array();
    for (const auto& d : detections) {
      nlohmann::json j;
      j["rank"] = d.source_rank;
      j["source_correspondence"] = d.source_correspondence;
      j["accepted"] = d.accepted;
      j["coverage"] = d.coverage;
      std::vector<double> pose;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) pose.push_back(d.pose.rotation(r, c));
      }
      for (int k = 0; k < 3; ++k) pose.push_back(d.pose.translation(k));
      j["pose_row_major"] = pose;
      out["detections"].push_back(j);
    }
    std::ofstream os(args.output);
    if (!os) throw std::runtime_error("cannot open " + args.output);
    os << out.dump(2) << "\n";
  } else {
    save_detections_csv(args.output, detections, header);
  }

  std::size_t accepted = 0;
  for (const auto& d : detections) {
    if (!d.accepted) continue;
    ++accepted;
    if (!args.export_ply_prefix.empty()) {
      write_ply(args.export_ply_prefix + std::to_string(accepted) + ".ply",
                transformed(object, d.pose));
    }
  }
  std::cout << header << "\n";
  std::cout << "detections: " << accepted << " accepted of " << detections.size()
            << " hypotheses -> " << args.output << "\n";
}

// ---- bench ----

struct BenchArgs {
  std::string sizes = "10000,20000,40000";
  std::string output;
  std::size_t runs = 5;
  VoteOptions vote;
};

void run_bench(const BenchArgs& args, const CommonOptions& common) {
  const unsigned threads = resolve_threads(common.threads);
  std::vector<std::size_t> sizes;
  for (double v : parse_grid(args.sizes, "--sizes")) {
    sizes.push_back(static_cast<std::size_t>(v));
  }

  const std::string header =
      run_header("bench", common,
                 {{"sizes", args.sizes},
                  {"kappa", std::to_string(args.vote.kappa)},
                  {"runs", std::to_string(args.runs)}});

  std::ofstream out(args.output);
  if (!out) throw std::runtime_error("cannot open " + args.output);
  out << "# " << header << "\n";
  out << "size,runs,median_ms,ratio_vs_prev\n";
  std::cout << header << "\n";

  double prev_median = 0.0;
  for (std::size_t size : sizes) {
    // Dense self-matching correspondences over a synthetic model: voting
    // cost is what the bench isolates, so features are synthesized.
    const PointCloud model = make_bumpy_model(size, common.seed);
    Rng rng(common.seed + size);
    CorrespondenceSet cs;
    std::vector<LocalReferenceFrame> frames(size);
    for (std::size_t i = 0; i < size; ++i) {
      Correspondence c;
      c.object_index = i;
      c.scene_index = i;
      c.feature_distance_2 = rng.uniform(0.2, 1.0);
      c.feature_distance_1 = c.feature_distance_2 * rng.uniform();
      cs.items.push_back(c);
      frames[i].origin = model.point(i);
      frames[i].axes = rng.rotation();
      frames[i].valid = true;
    }

    VotingParams params;
    params.kappa = args.vote.kappa;
    params.sigma_sim = args.vote.sigma_sim;
    params.t_ratio = args.vote.t_ratio;
    params.delta = 5.0 * estimate_resolution(model);

    std::vector<double> times;
    for (std::size_t run = 0; run < args.runs; ++run) {
      const auto start = std::chrono::steady_clock::now();
      const VotingResult r =
          run_voting(cs, model, model, frames, frames, params, threads);
      const auto stop = std::chrono::steady_clock::now();
      (void)r;
      times.push_back(
          std::chrono::duration<double, std::milli>(stop - start).count());
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    const double ratio = prev_median > 0.0 ? median / prev_median : 0.0;
    prev_median = median;

    out << size << "," << args.runs << "," << format_double(median) << ","
        << format_double(ratio) << "\n";
    std::printf("size %8zu: median %10.2f ms%s\n", size, median,
                ratio > 0.0 ? (" (x" + std::to_string(ratio) + ")").c_str() : "");
  }
}

// ---- synth ----

struct SynthArgs {
  std::string model_out;
  std::string scene_out;
  std::size_t points = 10000;
  double sigma_mm = 0.0;
  bool rigid_offset = false;
};

void run_synth(const SynthArgs& args, const CommonOptions& common) {
  const PointCloud model = make_bumpy_model(args.points, common.seed);
  write_ply(args.model_out, model);
  std::cout << run_header("synth", common,
                          {{"points", std::to_string(args.points)},
                           {"model", args.model_out}})
            << "\n";
  if (!args.scene_out.empty()) {
    std::optional<RigidTransform> offset;
    if (args.rigid_offset) {
      Rng rng(common.seed ^ 0x9e3779b97f4a7c15ull);
      offset = random_rigid_transform(rng, 0.2);
    }
    const NoisyPair pair =
        make_noisy_pair(model, args.sigma_mm * 1e-3, common.seed + 1, offset);
    write_ply(args.scene_out, pair.scene);
    std::cout << "scene: " << args.scene_out
              << " sigma_mm=" << format_double(args.sigma_mm) << "\n";
  }
}

void add_feature_options(CLI::App* cmd, FeatureOptions& opts) {
  cmd->add_option("--radius", opts.radius, "Descriptor support radius, meters")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--normal-radius", opts.normal_radius,
                  "Normal estimation radius, meters (0 = 4 x resolution)");
  cmd->add_option("--normal-orientation", opts.normal_orientation,
                  "Normal orientation rule: centroid | local")
      ->check(CLI::IsMember({"centroid", "local"}));
  cmd->add_option("--features-object", opts.features_object,
                  "Load object features from CSV instead of computing them");
  cmd->add_option("--features-scene", opts.features_scene,
                  "Load scene features from CSV instead of computing them");
  cmd->add_option("--dump-features-object", opts.dump_features_object,
                  "Write computed object features to CSV");
  cmd->add_option("--dump-features-scene", opts.dump_features_scene,
                  "Write computed scene features to CSV");
}

void add_vote_options(CLI::App* cmd, VoteOptions& opts) {
  cmd->add_option("--kappa", opts.kappa, "Voter sample size")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  cmd->add_option("--sigma-sim", opts.sigma_sim,
                  "Similarity threshold in [0, 1)")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--t-ratio", opts.t_ratio, "Ratio-score threshold")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--delta", opts.delta,
                  "Covariant tolerance, meters (0 = 5 x scene resolution)");
  cmd->add_option("--bins", opts.bins, "Histogram bins for the decision threshold")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  cmd->add_option("--degenerate-policy", opts.degenerate_policy,
                  "When all scores are identical: accept | reject")
      ->check(CLI::IsMember({"accept", "reject"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrvote: inlier/outlier separation for 3D feature "
               "correspondences by local and global voting"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--threads may follow the subcommand

  CommonOptions common;
  app.add_option("--threads", common.threads,
                 "Worker threads (0 = all hardware threads)");
  app.add_option("--seed", common.seed, "Random seed recorded in output headers");

  MatchArgs match_args;
  CLI::App* match_cmd =
      app.add_subcommand("match", "Dense feature matching between two PLY clouds");
  match_cmd->add_option("object", match_args.object_path, "Object PLY")->required();
  match_cmd->add_option("scene", match_args.scene_path, "Scene PLY")->required();
  match_cmd->add_option("-o,--output", match_args.output, "Correspondence CSV out")
      ->required();
  add_feature_options(match_cmd, match_args.features);

  VoteArgs vote_args;
  CLI::App* vote_cmd = app.add_subcommand(
      "vote", "Two-stage correspondence voting with an automatic decision threshold");
  vote_cmd->add_option("object", vote_args.object_path, "Object PLY")->required();
  vote_cmd->add_option("scene", vote_args.scene_path, "Scene PLY")->required();
  vote_cmd->add_option("-o,--output", vote_args.output, "Tally CSV out")->required();
  vote_cmd->add_option("--correspondences", vote_args.correspondences,
                       "External correspondence CSV (else matched internally)");
  add_feature_options(vote_cmd, vote_args.features);
  add_vote_options(vote_cmd, vote_args.vote);

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Controlled synthetic experiments (noise and parameter sweeps)");
  eval_cmd->add_option("--experiment", eval_args.experiment,
                       "noise | kappa | sigma-sim | single");
  eval_cmd->add_option("-o,--output", eval_args.output, "Report CSV out")->required();
  eval_cmd->add_option("--curves", eval_args.curves, "Curve CSV out (optional)");
  eval_cmd->add_option("--points", eval_args.points, "Synthetic model size")
      ->check(CLI::Range(std::size_t{100}, std::size_t{10000000}));
  eval_cmd->add_option("--sigma-mm", eval_args.sigma_mm,
                       "Noise level for single/kappa/sigma-sim experiments, mm");
  eval_cmd->add_option("--grid", eval_args.grid,
                       "Comma-separated grid override for the active experiment");
  eval_cmd->add_flag("--offset", eval_args.rigid_offset,
                     "Apply a random rigid offset to the noisy scene");
  add_feature_options(eval_cmd, eval_args.features);
  add_vote_options(eval_cmd, eval_args.vote);

  DetectArgs detect_args;
  CLI::App* detect_cmd =
      app.add_subcommand("detect", "Top-ranked pose hypotheses + ICP refinement");
  detect_cmd->add_option("object", detect_args.object_path, "Object PLY")->required();
  detect_cmd->add_option("scene", detect_args.scene_path, "Scene PLY")->required();
  detect_cmd->add_option("-o,--output", detect_args.output,
                         "Detections out (.csv or .json)")
      ->required();
  detect_cmd->add_option("--export-ply", detect_args.export_ply_prefix,
                         "Write accepted detections as transformed PLYs "
                         "(prefixN.ply)");
  detect_cmd->add_option("--top-n", detect_args.detection.top_n,
                         "Ranked hypotheses to refine");
  detect_cmd->add_option("--overlap-max", detect_args.detection.overlap_max,
                         "Max overlap with earlier detections")
      ->check(CLI::Range(0.0, 1.0));
  detect_cmd->add_option("--coverage-min", detect_args.detection.coverage_min,
                         "Min scene coverage to accept")
      ->check(CLI::Range(0.0, 1.0));
  detect_cmd->add_option("--icp-iters", detect_args.detection.icp_iterations,
                         "ICP iterations");
  detect_cmd->add_option("--dist-tol", detect_args.detection.dist_tol,
                         "Coverage/overlap tolerance, meters (0 = 2 x resolution)");
  detect_cmd->add_option("--max-corr-dist", detect_args.detection.max_corr_dist,
                         "ICP pairing gate, meters (0 = 3 x resolution)");
  add_feature_options(detect_cmd, detect_args.features);
  add_vote_options(detect_cmd, detect_args.vote);

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Voting wall time on synthetic clouds of increasing size");
  bench_cmd->add_option("--sizes", bench_args.sizes, "Comma-separated point counts");
  bench_cmd->add_option("-o,--output", bench_args.output, "Timing CSV out")
      ->required();
  bench_cmd->add_option("--runs", bench_args.runs, "Repetitions per size (median)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100}));
  add_vote_options(bench_cmd, bench_args.vote);

  SynthArgs synth_args;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic model (and noisy scene)");
  synth_cmd->add_option("-o,--output", synth_args.model_out, "Model PLY out")
      ->required();
  synth_cmd->add_option("--scene", synth_args.scene_out, "Noisy scene PLY out");
  synth_cmd->add_option("--points", synth_args.points, "Point count");
  synth_cmd->add_option("--sigma-mm", synth_args.sigma_mm, "Scene noise, mm");
  synth_cmd->add_flag("--offset", synth_args.rigid_offset,
                      "Move the scene by a random rigid transform");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (match_cmd->parsed()) run_match(match_args, common);
    if (vote_cmd->parsed()) run_vote(vote_args, common);
    if (eval_cmd->parsed()) run_eval(eval_args, common);
    if (detect_cmd->parsed()) run_detect(detect_args, common);
    if (bench_cmd->parsed()) run_bench(bench_args, common);
    if (synth_cmd->parsed()) run_synth(synth_args, common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
