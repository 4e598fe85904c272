#include "corrvote/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "corrvote/csv.hpp"
#include "corrvote/threading.hpp"

namespace corrvote {

namespace {

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

}  // namespace

std::vector<char> label_inliers(const CorrespondenceSet& cs, const PointCloud& object,
                                const PointCloud& scene, const GroundTruth& gt) {
  if (!(gt.tolerance > 0.0)) {
    throw std::invalid_argument("label_inliers: ground-truth tolerance must be > 0");
  }
  std::vector<char> labels(cs.size(), 0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Correspondence& c = cs.items[i];
    const Point3 mapped = gt.transform.apply(object.point(c.object_index));
    if ((mapped - scene.point(c.scene_index)).norm() < gt.tolerance) {
      labels[i] = 1;
    }
  }
  return labels;
}

EvaluationReport pr_curve(const std::vector<char>& labels,
                          const std::vector<double>& scores) {
  if (labels.size() != scores.size()) {
    throw std::invalid_argument("pr_curve: label/score count mismatch");
  }
  EvaluationReport report;
  report.labels = labels;

  const std::size_t n = labels.size();
  const std::size_t total_inliers =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), char{1}));
  report.inlier_fraction =
      n == 0 ? 0.0 : static_cast<double>(total_inliers) / static_cast<double>(n);
  if (total_inliers == 0) {
    report.zero_inliers = true;
    return report;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  });

  std::size_t tp = 0;
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < n;) {
    const double t = scores[order[i]];
    // Accept the whole tie group: the rule is score >= t.
    while (i < n && scores[order[i]] == t) {
      accepted += 1;
      tp += labels[order[i]] ? 1 : 0;
      ++i;
    }
    CurvePoint pt;
    pt.threshold = t;
    pt.precision = static_cast<double>(tp) / static_cast<double>(accepted);
    pt.recall = static_cast<double>(tp) / static_cast<double>(total_inliers);
    report.curve.push_back(pt);
    report.max_f1 = std::max(report.max_f1, f1_score(pt.precision, pt.recall));
  }
  return report;
}

void set_decision_metrics(EvaluationReport& report, const std::vector<char>& labels,
                          const std::vector<double>& scores, double threshold,
                          bool degenerate_threshold) {
  report.decision_threshold = threshold;
  report.degenerate_threshold = degenerate_threshold;

  std::size_t tp = 0;
  std::size_t accepted = 0;
  std::size_t total_inliers = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total_inliers += labels[i] ? 1 : 0;
    if (scores[i] >= threshold) {
      ++accepted;
      tp += labels[i] ? 1 : 0;
    }
  }
  report.precision_at_decision =
      accepted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(accepted);
  report.recall_at_decision =
      total_inliers == 0 ? 0.0
                         : static_cast<double>(tp) / static_cast<double>(total_inliers);
  report.f1_at_decision =
      f1_score(report.precision_at_decision, report.recall_at_decision);
}

NoisyPair make_noisy_pair(const PointCloud& model, double sigma, std::uint64_t seed,
                          const std::optional<RigidTransform>& offset) {
  NoisyPair pair;
  pair.object = model;
  PointCloud noisy = add_gaussian_noise(model, sigma, seed);
  if (offset) {
    pair.scene = transformed(noisy, *offset);
    pair.gt.transform = *offset;
  } else {
    pair.scene = std::move(noisy);
    pair.gt.transform = RigidTransform::identity();
  }
  return pair;
}

CorrespondenceSet control_inlier_fraction(const CorrespondenceSet& cs,
                                          const PointCloud& object,
                                          const PointCloud& scene,
                                          const GroundTruth& gt, double fraction,
                                          std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("control_inlier_fraction: fraction must lie in [0,1]");
  }
  CorrespondenceSet out = cs;
  Rng rng(seed);
  std::vector<char> labels = label_inliers(out, object, scene, gt);

  const std::size_t target = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(out.size())));

  std::vector<std::size_t> inliers;
  std::vector<std::size_t> outliers;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? inliers : outliers).push_back(i);
  }

  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng.uniform_index(i)]);
    }
  };
  shuffle(inliers);
  shuffle(outliers);

  // Surplus inliers become outliers by retargeting to a far random point.
  while (inliers.size() > target && !inliers.empty()) {
    const std::size_t ci = inliers.back();
    const Point3 mapped = gt.transform.apply(object.point(out.items[ci].object_index));
    std::size_t tries = 0;
    for (; tries < 1000; ++tries) {
      const std::size_t si = rng.uniform_index(scene.size());
      if ((mapped - scene.point(si)).norm() >= gt.tolerance) {
        out.items[ci].scene_index = si;
        break;
      }
    }
    if (tries == 1000) {
      throw std::runtime_error(
          "control_inlier_fraction: could not find an outlier target");
    }
    inliers.pop_back();
  }

  // Missing inliers: snap an outlier onto the ground-truth match if the
  // mapped point is close enough to any scene point.
  std::size_t cursor = 0;
  while (inliers.size() < target) {
    if (cursor >= outliers.size()) {
      throw std::runtime_error(
          "control_inlier_fraction: not enough recoverable inliers to reach the "
          "requested fraction");
    }
    const std::size_t ci = outliers[cursor++];
    const Point3 mapped = gt.transform.apply(object.point(out.items[ci].object_index));
    const auto hits = scene.knn(mapped, 1);
    if (hits.empty() || hits[0].distance >= gt.tolerance) continue;
    out.items[ci].scene_index = hits[0].index;
    inliers.push_back(ci);
  }
  return out;
}

MatchedInstance build_noisy_instance(const PointCloud& model, double sigma,
                                     const ExperimentParams& params,
                                     std::uint64_t seed) {
  MatchedInstance inst;

  const double model_resolution = estimate_resolution(model);
  const double normal_radius = params.normal_radius_factor * model_resolution;

  std::optional<RigidTransform> offset;
  if (params.rigid_offset) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    offset = random_rigid_transform(rng, 4.0 * params.base_radius);
  }

  NoisyPair pair = make_noisy_pair(model, sigma, seed, offset);

  inst.object = estimate_normals(pair.object, normal_radius, std::nullopt,
                                 params.threads);
  if (params.inherit_normals) {
    // Carry the model normals through the noise, rotated by the offset.
    std::vector<Vec3> normals = inst.object.normals();
    if (offset) {
      for (auto& n : normals) n = offset->rotation * n;
    }
    inst.scene = PointCloud(pair.scene.points(), std::move(normals),
                            inst.object.normal_reliability());
  } else {
    inst.scene = estimate_normals(pair.scene, normal_radius, std::nullopt,
                                  params.threads);
  }

  inst.scene_resolution = estimate_resolution(inst.scene);
  inst.gt = pair.gt;
  inst.gt.tolerance = 2.0 * inst.scene_resolution;

  inst.object_features =
      compute_all_features(inst.object, params.descriptor_radius, params.threads);
  inst.scene_features =
      compute_all_features(inst.scene, params.descriptor_radius, params.threads);
  inst.correspondences =
      match_features(inst.object_features, inst.scene_features, params.threads);
  inst.labels = label_inliers(inst.correspondences, inst.object, inst.scene, inst.gt);
  return inst;
}

ExperimentRow evaluate_instance(const MatchedInstance& instance,
                                const ExperimentParams& params, double sigma,
                                const VotingParams& voting) {
  const auto start = std::chrono::steady_clock::now();

  PipelineOptions options;
  options.voting = voting;
  options.histogram_bins = params.histogram_bins;
  options.degenerate_policy = params.degenerate_policy;
  options.threads = resolve_threads(params.threads);

  const PipelineResult pipeline =
      run_vote_pipeline(instance.correspondences, instance.object, instance.scene,
                        instance.object_features.frames,
                        instance.scene_features.frames, options);

  const std::vector<double> scores = final_scores(pipeline.voting);

  ExperimentRow row;
  row.sigma = sigma;
  row.kappa = voting.kappa;
  row.sigma_sim = voting.sigma_sim;
  row.t_ratio = voting.t_ratio;
  row.delta = pipeline.delta;
  row.report = pr_curve(instance.labels, scores);
  set_decision_metrics(row.report, instance.labels, scores,
                       pipeline.decision_threshold, pipeline.degenerate_threshold);
  row.report.seed = params.seed;

  const auto stop = std::chrono::steady_clock::now();
  row.report.wall_time_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return row;
}

std::vector<ExperimentRow> run_noise_sweep(const ExperimentParams& params,
                                           const std::vector<double>& sigmas) {
  const PointCloud model =
      make_bumpy_model(params.model_points, params.seed, params.base_radius);

  std::vector<ExperimentRow> rows;
  rows.reserve(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const std::uint64_t level_seed = params.seed + 1000 * (i + 1);
    const MatchedInstance instance =
        build_noisy_instance(model, sigmas[i], params, level_seed);
    rows.push_back(evaluate_instance(instance, params, sigmas[i], params.voting));
  }
  return rows;
}

std::vector<ExperimentRow> run_kappa_sweep(const ExperimentParams& params,
                                           double sigma,
                                           const std::vector<std::size_t>& kappas) {
  const PointCloud model =
      make_bumpy_model(params.model_points, params.seed, params.base_radius);
  const MatchedInstance instance =
      build_noisy_instance(model, sigma, params, params.seed + 17);

  std::vector<ExperimentRow> rows;
  rows.reserve(kappas.size());
  for (std::size_t kappa : kappas) {
    VotingParams voting = params.voting;
    voting.kappa = kappa;
    rows.push_back(evaluate_instance(instance, params, sigma, voting));
  }
  return rows;
}

std::vector<ExperimentRow> run_sigma_sim_sweep(const ExperimentParams& params,
                                               double sigma,
                                               const std::vector<double>& sigma_sims) {
  const PointCloud model =
      make_bumpy_model(params.model_points, params.seed, params.base_radius);
  const MatchedInstance instance =
      build_noisy_instance(model, sigma, params, params.seed + 17);

  std::vector<ExperimentRow> rows;
  rows.reserve(sigma_sims.size());
  for (double s : sigma_sims) {
    VotingParams voting = params.voting;
    voting.sigma_sim = s;
    rows.push_back(evaluate_instance(instance, params, sigma, voting));
  }
  return rows;
}

void save_report_csv(const std::string& path, const std::vector<ExperimentRow>& rows,
                     const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "sigma,kappa,sigma_sim,t_ratio,delta,inlier_fraction,precision,recall,f1,"
         "max_f1,decision_threshold,degenerate,zero_inliers,seed,wall_time_ms\n";
  for (const auto& r : rows) {
    out << format_double(r.sigma) << "," << r.kappa << ","
        << format_double(r.sigma_sim) << "," << format_double(r.t_ratio) << ","
        << format_double(r.delta) << "," << format_double(r.report.inlier_fraction)
        << "," << format_double(r.report.precision_at_decision) << ","
        << format_double(r.report.recall_at_decision) << ","
        << format_double(r.report.f1_at_decision) << ","
        << format_double(r.report.max_f1) << ","
        << format_double(r.report.decision_threshold) << ","
        << (r.report.degenerate_threshold ? 1 : 0) << ","
        << (r.report.zero_inliers ? 1 : 0) << "," << r.report.seed << ","
        << format_double(r.report.wall_time_ms) << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed writing report CSV: " + path);
  }
}

void save_curves_csv(const std::string& path, const std::vector<ExperimentRow>& rows,
                     const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "sigma,kappa,sigma_sim,threshold,precision,recall\n";
  for (const auto& r : rows) {
    for (const auto& pt : r.report.curve) {
      out << format_double(r.sigma) << "," << r.kappa << ","
          << format_double(r.sigma_sim) << "," << format_double(pt.threshold) << ","
          << format_double(pt.precision) << "," << format_double(pt.recall) << "\n";
    }
  }
  if (!out) {
    throw std::runtime_error("failed writing curves CSV: " + path);
  }
}

}  // namespace corrvote
