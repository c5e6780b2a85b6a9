#include "blendsim/res/manager.hpp"

#include <cmath>
#include <stdexcept>

#include "blendsim/util/text.hpp"

namespace blendsim::res {

ResourceManager::ResourceManager(const ManagerConfig& cfg)
    : cfg_(cfg),
      ping_rng_(util::derive_seed(cfg.seed, 20)),
      noise_rng_(util::derive_seed(cfg.seed, 21)),
      t_r_mean_(cfg.t_r_window),
      temp_(cfg.thermal.ambient) {
  cfg_.thermal.validate();
  if (cfg_.sensor_noise_sd < 0.0) {
    throw std::invalid_argument("sensor noise sd must be >= 0");
  }
  if (!(cfg_.monitor_period > 0.0) || !(cfg_.ping_period > 0.0)) {
    throw std::invalid_argument("manager periods must be > 0");
  }
  double ratio = cfg_.monitor_period / cfg_.ping_period;
  ticks_per_monitor_ = static_cast<int>(std::lround(ratio));
  if (ticks_per_monitor_ < 1 ||
      std::abs(ratio - ticks_per_monitor_) > 1e-9) {
    throw std::invalid_argument("monitor period must be a multiple of the ping period");
  }
  for (const FogDevice& d : cfg_.devices) selector_.add_device(d);
}

void ResourceManager::handle(const mw::Msg& m, mw::Context& ctx) {
  if (const auto* r = std::get_if<mw::CycleReport>(&m)) {
    t_r_mean_.add(r->t_r);
    return;
  }
  if (!std::holds_alternative<mw::Tick>(m)) return;
  ++ticks_;
  if (selector_.count() > 0) selector_.ping_all(ctx.now(), ping_rng_);
  if (ticks_ % ticks_per_monitor_ == 0) monitor(ctx);
  ctx.send(ctx.self(), mw::Tick{}, cfg_.ping_period);
}

void ResourceManager::monitor(mw::Context& ctx) {
  double now = ctx.now();
  double load = cfg_.thermal.load_for(cfg_.strategy, state_.offloaded());
  temp_ = thermal_step(temp_, load, cfg_.thermal, cfg_.monitor_period);
  // Sensors report the latent state plus read noise; the floor mirrors a
  // sensor that never indicates below ambient.
  double reading = temp_;
  if (cfg_.sensor_noise_sd > 0.0) {
    reading = std::max(cfg_.thermal.ambient,
                       temp_ + noise_rng_.gaussian(0.0, cfg_.sensor_noise_sd));
  }

  double forecast = cfg_.forecaster != nullptr
                        ? cfg_.forecaster->predict(reading, load)
                        : reading;
  int selected = -1;
  if (selector_.count() > 0) selected = selector_.select();

  if (cfg_.offload_enabled) {
    OffloadDecision d = offload_decide(forecast, state_, now, cfg_.threshold,
                                       cfg_.hysteresis, selected);
    warnings_ += d.warning;
    if (d.changed) {
      state_ = d.state;
      double rtt =
          state_.offloaded() ? selector_.device(state_.device).base_latency : 0.0;
      if (dm_ >= 0) ctx.send(dm_, mw::Placement{state_.offloaded(), rtt});
      events_.push_back({now, state_.offloaded(),
                         state_.offloaded() ? selector_.device(state_.device).id
                                            : std::string{},
                         forecast});
    }
  }
  if (cfg_.cap_enabled && dm_ >= 0 && t_r_mean_.count() > 0) {
    ctx.send(dm_, mw::SpeedCap{
                      saturate_speed(cfg_.d_s, t_r_mean_.mean(), cfg_.cal).duty});
  }

  // Rows record the load now in force, so consecutive rows form consistent
  // training pairs: (T_t, load_t) is exactly what drives the step to T_t+1.
  double next_load = cfg_.thermal.load_for(cfg_.strategy, state_.offloaded());
  samples_.push_back({now, reading, next_load, state_.offloaded()});
  trace_.push_back({now, reading, next_load, state_.offloaded(),
                    state_.offloaded() ? selector_.device(state_.device).id
                                       : std::string{},
                    forecast});
}

void write_resource_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "time,temperature,cpu,offloaded,selected_device,forecast\n";
  for (const TraceRow& r : rows) {
    os << util::strfmt("%.3f,%.6f,%.4f,%d,%s,%.6f\n", r.t, r.temperature,
                       r.cpu_load, static_cast<int>(r.offloaded),
                       r.device.c_str(), r.forecast);
  }
}

}  // namespace blendsim::res
