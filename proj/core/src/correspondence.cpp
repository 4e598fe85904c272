#include "corrvote/correspondence.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "corrvote/csv.hpp"
#include "corrvote/kdtree.hpp"
#include "corrvote/threading.hpp"

namespace corrvote {

CorrespondenceSet match_features(const FeatureSet& object_features,
                                 const FeatureSet& scene_features,
                                 unsigned threads) {
  // Tree over valid scene descriptors only; slot -> original scene index.
  std::vector<std::array<double, kDescriptorSize>> scene_points;
  std::vector<std::size_t> scene_map;
  for (std::size_t i = 0; i < scene_features.size(); ++i) {
    if (!scene_features.descriptors[i].valid) continue;
    std::array<double, kDescriptorSize> a;
    std::copy(scene_features.descriptors[i].values.begin(),
              scene_features.descriptors[i].values.end(), a.begin());
    scene_points.push_back(a);
    scene_map.push_back(i);
  }
  if (scene_map.size() < 2) {
    throw std::invalid_argument(
        "match_features: need at least 2 valid scene features for the ratio score");
  }
  const KdTree<kDescriptorSize> tree(std::move(scene_points));

  const std::size_t n = object_features.size();
  std::vector<char> has_match(n, 0);
  std::vector<Correspondence> slots(n);

  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Descriptor& d = object_features.descriptors[i];
      if (!d.valid) continue;
      std::array<double, kDescriptorSize> q;
      std::copy(d.values.begin(), d.values.end(), q.begin());
      const auto hits = tree.knn(q, 2);
      Correspondence c;
      c.object_index = i;
      c.scene_index = scene_map[hits[0].index];
      c.feature_distance_1 = hits[0].distance;
      c.feature_distance_2 = hits[1].distance;
      c.score = score_ratio(c);
      slots[i] = c;
      has_match[i] = 1;
    }
  });

  CorrespondenceSet cs;
  cs.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (has_match[i]) cs.items.push_back(slots[i]);
  }
  return cs;
}

double score_ratio(const Correspondence& c) {
  if (c.feature_distance_2 <= 0.0) {
    return 0.0;
  }
  return 1.0 - c.feature_distance_1 / c.feature_distance_2;
}

std::vector<char> ratio_set(const CorrespondenceSet& cs, double t_ratio) {
  std::vector<char> mask(cs.size(), 0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (score_ratio(cs.items[i]) >= t_ratio) mask[i] = 1;
  }
  return mask;
}

void save_correspondences_csv(const std::string& path, const CorrespondenceSet& cs,
                              const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "object_index,scene_index,feature_distance_1,feature_distance_2,score\n";
  for (const auto& c : cs.items) {
    out << c.object_index << "," << c.scene_index << ","
        << format_double(c.feature_distance_1) << ","
        << format_double(c.feature_distance_2) << "," << format_double(c.score)
        << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed writing correspondences CSV: " + path);
  }
}

CorrespondenceSet load_correspondences_csv(const std::string& path,
                                           std::size_t object_size,
                                           std::size_t scene_size) {
  CsvReader reader(
      path, "object_index,scene_index,feature_distance_1,feature_distance_2,score");
  CorrespondenceSet cs;
  std::set<std::size_t> seen;
  std::vector<std::string> fields;
  while (reader.next_row(fields)) {
    const std::string where = path + ":" + std::to_string(reader.line_number());
    if (fields.size() != 5) {
      throw std::runtime_error(where + ": expected 5 fields");
    }
    Correspondence c;
    const auto oi = parse_int(fields[0], where);
    const auto si = parse_int(fields[1], where);
    if (oi < 0 || static_cast<std::size_t>(oi) >= object_size) {
      throw std::runtime_error(where + ": object_index " + fields[0] +
                               " out of range [0, " + std::to_string(object_size) +
                               ")");
    }
    if (si < 0 || static_cast<std::size_t>(si) >= scene_size) {
      throw std::runtime_error(where + ": scene_index " + fields[1] +
                               " out of range [0, " + std::to_string(scene_size) + ")");
    }
    c.object_index = static_cast<std::size_t>(oi);
    c.scene_index = static_cast<std::size_t>(si);
    c.feature_distance_1 = parse_double(fields[2], where);
    c.feature_distance_2 = parse_double(fields[3], where);
    c.score = parse_double(fields[4], where);
    if (c.feature_distance_1 < 0.0 || c.feature_distance_1 > c.feature_distance_2) {
      throw std::runtime_error(where + ": feature distances must satisfy 0 <= d1 <= d2");
    }
    if (!seen.insert(c.object_index).second) {
      throw std::runtime_error(where + ": duplicate object_index " + fields[0]);
    }
    cs.items.push_back(c);
  }
  std::sort(cs.items.begin(), cs.items.end(),
            [](const Correspondence& a, const Correspondence& b) {
              return a.object_index < b.object_index;
            });
  return cs;
}

}  // namespace corrvote
