#pragma once

#include <cstdint>
#include <variant>

#include "blendsim/ctrl/cv_controller.hpp"
#include "blendsim/sim/sensors.hpp"
#include "blendsim/sim/vehicle.hpp"

namespace blendsim::mw {

using Label = std::uint64_t;

// plant -> device actors, emitted at the camera cadence while the world advances
struct PlantSnapshot {
  sim::VehicleState state;
};
struct OptoSample {
  double t = 0.0;
  double tick_frequency = 0.0;  // wheel marker pulses per second
};

// device actors -> buffer
struct FramePublish {
  sim::SensorFrame frame;  // label assigned by the buffer
};
struct SpeedPublish {
  double t = 0.0;
  double speed = 0.0;
};

// buffer -> subscribed controllers (data fan-out; never triggers computation)
struct FramePush {
  Label label = 0;
  sim::SensorFrame frame;
};

// decision manager <-> buffer
struct FrameRequest {};
struct FrameReply {
  bool ready = false;
  Label label = 0;
  sim::SensorFrame frame;
};

// decision manager -> controllers: compute exactly once per prompt
struct LecPrompt {
  double applied_speed_duty = sim::Calibration::kSpeedMin;
};
struct CvPrompt {};
struct RlPrompt {
  double theta_l_prev = sim::Calibration::kSteerCenter;
  double theta_c_prev = sim::Calibration::kSteerCenter;
};

// controllers -> decision manager
struct LecReply {
  Label label = 0;
  double theta_l = sim::Calibration::kSteerCenter;
};
struct CvReply {
  Label label = 0;
  ctrl::CvOutput out;
};
struct RlReply {
  Label label = 0;
  int w_idx = 10;
  int v_idx = 10;
  double w_l = 0.5;
  double speed_duty = 15.59;
};

// decision manager -> actuator -> plant
struct Actuate {
  double steer_duty = sim::Calibration::kSteerCenter;
  double speed_duty = sim::Calibration::kSpeedMin;
};
struct Advance {
  double to_t = 0.0;
  double steer_duty = sim::Calibration::kSteerCenter;
  double speed_duty = sim::Calibration::kSpeedMin;
  // Startup nudge that makes the plant publish its initial sensor view. It
  // yields to any actuator-driven advance that got there first.
  bool kick = false;
};

// plant -> decision manager: odometry at the end of an advance
struct AdvanceDone {
  double t = 0.0;
  double arc_position = 0.0;
  double lateral_offset = 0.0;
  double speed = 0.0;
  int laps_completed = 0;
};

// control-plane maintenance
struct Tick {};
struct SmoothingReset {};
struct VehicleReset {};

// resource manager <-> decision manager
struct SpeedCap {
  double duty = sim::Calibration::kSpeedMax;
};
struct Placement {
  bool offloaded = false;
  double rtt = 0.0;  // control-path round-trip to the hosting device
};
struct CycleReport {
  double t_r = 0.0;
};

using Msg = std::variant<PlantSnapshot, OptoSample, FramePublish, SpeedPublish,
                         FramePush, FrameRequest, FrameReply, LecPrompt,
                         CvPrompt, RlPrompt, LecReply, CvReply, RlReply,
                         Actuate, Advance, AdvanceDone, Tick, SmoothingReset,
                         VehicleReset, SpeedCap, Placement, CycleReport>;

struct Envelope {
  double at = 0.0;
  std::uint64_t seq = 0;  // global enqueue order; ties on `at` resolve by seq
  int to = -1;
  Msg msg;
};

}  // namespace blendsim::mw
