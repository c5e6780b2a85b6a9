#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "blendsim/ctrl/lec_surrogate.hpp"
#include "blendsim/mw/scheduler.hpp"
#include "blendsim/rl/qlearn.hpp"
#include "blendsim/sim/deviation.hpp"
#include "blendsim/sim/sensors.hpp"
#include "blendsim/sim/track.hpp"
#include "blendsim/simplex/strategies.hpp"

namespace blendsim::mw {

enum class Strategy { LecOnly, CvOnly, Conventional, Fixed, Dynamic };

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

enum class ActorKind { Device, Buffer, Controller, Rl, DecisionManager, Actuator };

struct ActorSpec {
  std::string name;
  ActorKind kind = ActorKind::Device;
  double compute_latency = 0.0;  // simulated seconds
  bool fog = false;
  std::string fog_device;
};

// Per-actor compute times, tuned so the critical path lands on the measured
// cycle means: lec-only 80 ms, fixed 120 ms, dynamic 130 ms.
struct LatencyModel {
  double lec = 0.065;
  double cv = 0.105;
  double rl = 0.115;
  double dma = 0.010;       // label verification + blending
  double actuator = 0.005;
  double jitter_sd = 0.0;   // lognormal sigma on controller compute times
};

struct PipelineConfig {
  Strategy strategy = Strategy::Dynamic;
  LatencyModel latency;
  double camera_hz = 30.0;
  double speed_setpoint = sim::Calibration::kSpeedRlMax;  // duty
  double speed_cap = sim::Calibration::kSpeedMax;         // duty; resource-manager driven
  simplex::FixedStrategyParams fixed;
  double conventional_speed_threshold = 0.35;  // m/s
  sim::Calibration cal;
  sim::VehicleParams vehicle;
  sim::PerceptionGeometry geo;
  sim::OptoParams opto;
  sim::DeviationThresholds deviation{0.0, 0.0};  // zeroed -> lane-width rule
  ctrl::LecParams lec;
  std::uint64_t seed = 1;
  // Evaluation mode treats STOP and physical excursions as out-of-track
  // events followed by a centerline reset; otherwise STOP halts the pipeline.
  bool evaluation_mode = true;
  double start_arc = 0.0;
  double start_offset = 0.0;
  int start_w_idx = 10;
  int start_v_idx = 10;
  const rl::QTable* qtable = nullptr;  // dynamic strategy only
  bool rl_offloaded = false;
  double rl_rtt = 0.0;  // per-cycle round-trip when the RL actor runs remotely
  // Fault-injection knobs (tests): extra delay on a controller's data-push
  // subscription, and a delayed first sensor sample at startup.
  double push_delay_lec = 0.0;
  double push_delay_cv = 0.0;
  double push_delay_rl = 0.0;
  double first_frame_delay = 0.0;
};

// Actor-side counters, mostly for asserting the computation discipline:
// controllers see many data pushes per cycle but compute once per prompt.
struct PipelineStats {
  int lec_computes = 0;
  int cv_computes = 0;
  int rl_computes = 0;
  int lec_pushes = 0;
  int actuations = 0;
  int plant_advances = 0;  // actuator-driven only; the startup nudge is not counted
};

struct CycleRecord {
  int cycle = 0;
  Label label = 0;
  double tick_t = 0.0;
  double t_r = 0.0;
  double theta_l = sim::Calibration::kSteerCenter;
  double theta_c = sim::Calibration::kSteerCenter;
  double theta_applied = sim::Calibration::kSteerCenter;
  ctrl::CvLabel segment_estimate = ctrl::CvLabel::Straight;
  sim::SegmentKind segment = sim::SegmentKind::Straight;  // truth at sensing
  double w_l = 1.0;
  double v_set = sim::Calibration::kSpeedMin;  // duty handed to the actuator
  double speed = 0.0;                          // measured m/s at sensing
  double lateral_offset = 0.0;                 // after the advance
  int label_retries = 0;
  bool fault = false;
  bool out_event = false;
  bool stopped = false;
  bool offloaded = false;  // placement in force when the decision was made
};

struct SegmentStats {
  int cycles = 0;
  int out_events = 0;
  double mean_speed = 0.0;
  double mean_w_l = 0.0;
  double modal_w_l = 1.0;
};

struct EvaluationReport {
  std::string strategy;
  std::uint64_t seed = 0;
  int laps = 0;
  int cycles = 0;
  int out_events = 0;
  int faults = 0;
  bool stopped = false;
  double sim_time = 0.0;
  double mean_speed = 0.0;
  double max_speed = 0.0;
  double t_r_mean = 0.0;
  double t_r_min = 0.0;
  double t_r_max = 0.0;
  SegmentStats straight;
  SegmentStats left_curve;
  SegmentStats right_curve;
  double modal_w_straight = 1.0;
  double modal_w_curve = 1.0;
};

// The assembled control loop: plant, camera/opto devices, one buffer, the
// controller actors the strategy needs, one decision manager, one actuator.
class Pipeline {
 public:
  Pipeline(const sim::Track& track, const PipelineConfig& cfg,
           Runtime* runtime = nullptr);
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  // One full decision cycle; returns its record. Throws if already stopped.
  CycleRecord run_cycle();
  EvaluationReport run_laps(int laps);
  EvaluationReport run_cycles(int n);
  EvaluationReport run_for(double seconds);

  // Registers a supervisor actor (the resource manager): it receives a
  // CycleReport after every decision cycle plus a Tick at first_tick_at, and
  // may send SpeedCap/Placement back. Returns the decision manager's id.
  int attach_manager(Actor* a, double first_tick_at);

  const std::vector<CycleRecord>& records() const;
  const std::vector<ActorSpec>& roster() const { return roster_; }
  PipelineStats stats() const;
  bool stopped() const;
  double sim_now() const { return rt_->now(); }

  // Schedules an extra buffer publication; label-mismatch drills in tests.
  void inject_frame(double at, const sim::SensorFrame& frame);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Runtime* rt_ = nullptr;
  std::unique_ptr<Runtime> owned_rt_;
  std::vector<ActorSpec> roster_;
  int buffer_id_ = -1;
};

EvaluationReport summarize(const std::vector<CycleRecord>& records,
                           Strategy strategy, std::uint64_t seed, int laps);

std::string report_json(const EvaluationReport& r);
void write_cycle_csv(std::ostream& os, const std::vector<CycleRecord>& records);

}  // namespace blendsim::mw
