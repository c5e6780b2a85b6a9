#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "blendsim/mw/pipeline.hpp"
#include "blendsim/res/fog.hpp"
#include "blendsim/res/forecast.hpp"
#include "blendsim/res/offload.hpp"
#include "blendsim/res/thermal.hpp"

namespace blendsim::res {

struct ManagerConfig {
  ThermalParams thermal;
  mw::Strategy strategy = mw::Strategy::Dynamic;
  double threshold = 70.0;   // deg C soft limit
  double hysteresis = 2.0;   // return band below the limit
  double monitor_period = 30.0;
  double ping_period = 10.0;
  double d_s = 0.09;         // safe stopping distance, meters
  int t_r_window = 10;       // cycles in the rolling cycle-time mean
  bool offload_enabled = true;
  bool cap_enabled = true;
  std::vector<FogDevice> devices;
  sim::Calibration cal;
  std::uint64_t seed = 1;
  // Gaussian read noise on the temperature sensor, floored at ambient. The
  // recorded reading, not the latent model state, drives every decision.
  double sensor_noise_sd = 0.2;
  // When set, placement decisions use the predicted temperature one period
  // ahead instead of the current reading.
  const MlpForecaster* forecaster = nullptr;
};

// One monitoring row plus the context the decision saw.
struct TraceRow {
  double t = 0.0;
  double temperature = 0.0;
  double cpu_load = 0.0;
  bool offloaded = false;
  std::string device;  // empty while onboard
  double forecast = 0.0;
};

struct OffloadEvent {
  double t = 0.0;
  bool to_offloaded = false;
  std::string device;
  double forecast = 0.0;
};

// Supervisor actor: pings fog devices every ping period, samples the thermal
// model every monitor period, and steers the decision manager with placement
// and speed-cap messages. Runs entirely on the simulated clock.
class ResourceManager : public mw::Actor {
 public:
  explicit ResourceManager(const ManagerConfig& cfg);

  void wire(int dm) { dm_ = dm; }

  void handle(const mw::Msg& m, mw::Context& ctx) override;

  const std::vector<ResourceSample>& samples() const { return samples_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const std::vector<OffloadEvent>& events() const { return events_; }
  const OffloadState& state() const { return state_; }
  double temperature() const { return temp_; }
  int warnings() const { return warnings_; }

 private:
  void monitor(mw::Context& ctx);

  ManagerConfig cfg_;
  FogSelector selector_;
  util::Rng ping_rng_;
  util::Rng noise_rng_;
  OffloadState state_;
  RollingMean t_r_mean_;
  double temp_;
  int ticks_ = 0;
  int ticks_per_monitor_;
  int warnings_ = 0;
  int dm_ = -1;

  std::vector<ResourceSample> samples_;
  std::vector<TraceRow> trace_;
  std::vector<OffloadEvent> events_;
};

void write_resource_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace blendsim::res
