#pragma once

#include <array>
#include <vector>

#include "blendsim/ctrl/cv_controller.hpp"
#include "blendsim/sim/track.hpp"
#include "blendsim/sim/vehicle.hpp"
#include "blendsim/util/rng.hpp"

namespace blendsim::ctrl {

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
};

struct LdReport {
  double accuracy = 0.0;
  int n = 0;
  std::array<ClassScore, 4> per_class;  // indexed by CvLabel
  std::array<std::array<int, 4>, 4> confusion{};  // [truth][predicted]
};

// Accuracy plus per-class precision/recall/F1 over (predicted, truth) pairs.
LdReport ld_accuracy(const std::vector<std::pair<CvLabel, CvLabel>>& pairs);

// Deterministic pose sweep used to benchmark the raster pipeline against the
// geometric visibility rule: arc positions cover the track uniformly, lateral
// offsets and heading errors are clamped Gaussians around the centerline.
std::vector<sim::VehicleState> make_pose_sweep(const sim::Track& track, int n,
                                               util::Rng& rng);

}  // namespace blendsim::ctrl
