#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "corrvote/descriptor.hpp"

namespace corrvote {

// A putative match: object point -> scene point, with the two closest
// feature distances and the currently active score.
struct Correspondence {
  std::size_t object_index = 0;
  std::size_t scene_index = 0;
  double feature_distance_1 = 0.0;
  double feature_distance_2 = 0.0;
  double score = 0.0;
};

// Dense one-to-one set: at most one correspondence per object point,
// ordered by ascending object_index.
struct CorrespondenceSet {
  std::vector<Correspondence> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

// For every valid object feature, the closest and second-closest valid scene
// features by descriptor L2 distance (exact k-d tree, k=2). Invalid object
// features produce no correspondence. Each item's score is set to its ratio
// score. Throws std::invalid_argument with fewer than 2 valid scene features.
CorrespondenceSet match_features(const FeatureSet& object_features,
                                 const FeatureSet& scene_features,
                                 unsigned threads = 1);

inline double score_l2(const Correspondence& c) { return -c.feature_distance_1; }

// Lowe ratio score 1 - d1/d2 in [0, 1]. The doubly-degenerate case
// d1 = d2 = 0 scores 0: the match carries no uniqueness evidence.
double score_ratio(const Correspondence& c);

// Mask of correspondences with score_ratio >= t_ratio.
std::vector<char> ratio_set(const CorrespondenceSet& cs, double t_ratio = 0.2);

// CSV: object_index,scene_index,feature_distance_1,feature_distance_2,score.
void save_correspondences_csv(const std::string& path, const CorrespondenceSet& cs,
                              const std::string& header_comment = "");

// Validates indices against the given cloud sizes and the one-per-object
// invariant; errors name the offending row.
CorrespondenceSet load_correspondences_csv(const std::string& path,
                                           std::size_t object_size,
                                           std::size_t scene_size);

}  // namespace corrvote
