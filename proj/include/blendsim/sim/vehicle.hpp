#pragma once

#include "blendsim/sim/calibration.hpp"
#include "blendsim/sim/track.hpp"

namespace blendsim::sim {

struct VehicleParams {
  double wheelbase = 0.33;  // meters
};

struct VehicleState {
  Pose2 pose;
  double speed = 0.0;  // m/s, from the last applied speed duty
  double t = 0.0;      // simulated seconds
  double arc_position = 0.0;
  double lateral_offset = 0.0;
};

// Monotonic simulated clock for drivers that step outside the actor scheduler.
struct SimClock {
  double now = 0.0;
  double dt_control = 0.13;  // nominal seconds per control cycle
  void advance(double dt) { now += dt; }
};

// Centerline pose at arc position s, shifted laterally (left-positive).
VehicleState place_on_track(const Track& track, double s, double lateral = 0.0);

// Kinematic bicycle step under constant duties over dt. Steering sign
// convention: positive degrees turn the vehicle rightward (heading decreases).
// Position advances along the midpoint heading; projection onto the
// centerline refreshes arc_position and lateral_offset.
VehicleState step_vehicle(const Track& track, const VehicleState& state,
                          double steer_duty, double speed_duty, double dt,
                          const VehicleParams& params, const Calibration& cal);

// wrap(heading - tangent heading) to (-pi, pi]; positive means the vehicle
// points left of the local track direction.
double heading_error(const Track& track, const VehicleState& state);

}  // namespace blendsim::sim
