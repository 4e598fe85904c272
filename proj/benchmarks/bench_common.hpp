#pragma once

#include "corrvote/correspondence.hpp"
#include "corrvote/descriptor.hpp"
#include "corrvote/rng.hpp"
#include "corrvote/synthetic.hpp"
#include "corrvote/voting.hpp"

namespace corrvote::bench {

// Dense self-matching correspondences with synthetic features over a bumpy
// model, the standing input for the voting benchmarks.
struct VotingFixture {
  PointCloud model;
  CorrespondenceSet cs;
  std::vector<LocalReferenceFrame> frames;
  VotingParams params;

  explicit VotingFixture(std::size_t n, std::size_t kappa = 250)
      : model(make_bumpy_model(n, 1)) {
    Rng rng(n);
    frames.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
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
    params.kappa = kappa;
    params.delta = 5.0 * estimate_resolution(model);
  }
};

}  // namespace corrvote::bench
