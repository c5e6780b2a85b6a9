#pragma once

#include <vector>

#include "blendsim/ctrl/lec_surrogate.hpp"
#include "blendsim/rl/qlearn.hpp"
#include "blendsim/sim/calibration.hpp"
#include "blendsim/sim/sensors.hpp"
#include "blendsim/sim/track.hpp"
#include "blendsim/sim/vehicle.hpp"

namespace blendsim::rl {

struct RlHyperparams {
  double alpha = 0.1;
  double gamma = 0.4;
  int steps_per_run = 1000;
  int runs = 5;
  double eps0 = 0.5;
  double eps_decay = 0.8;    // per episode
  double alpha_decay = 0.9;  // per episode
  int start_w_idx = 10;      // W_L = 0.5
  int start_v_idx = 10;      // duty 15.590

  void validate() const;
};

// Synchronous training environment: the same physics, sensing, and blending
// as the deployed pipeline, stepped at the control period without the actor
// machinery.
struct TrainEnv {
  const sim::Track* track = nullptr;
  sim::Calibration cal;
  sim::VehicleParams vehicle;
  sim::PerceptionGeometry geo;
  // Zeroed thresholds mean "derive from the track's lane width".
  sim::DeviationThresholds deviation{0.0, 0.0};
  ctrl::LecParams lec;
  double dt_control = 0.13;
  std::uint64_t seed = 1;
};

struct StepRecord {
  int episode = 0;
  int step = 0;
  RlState state;
  int action = 0;  // action index
  double reward = 0.0;
  double cumulative = 0.0;
  bool out = false;  // the step ended off the track and triggered a reset
};

struct ExploreResult {
  QTable table;
  std::vector<StepRecord> log;
  int out_events = 0;
};

// Runs the exploration protocol: hp.runs episodes of hp.steps_per_run steps,
// epsilon and alpha decayed per episode, start poses taken round-robin.
// Leaving the track applies the penalty reward and recenters the car without
// ending the episode.
ExploreResult explore_run(const TrainEnv& env, const RlHyperparams& hp,
                          const std::vector<double>& start_arc_positions);

}  // namespace blendsim::rl
