#pragma once

#include <map>
#include <stdexcept>

#include "blendsim/mw/pipeline.hpp"

namespace blendsim::res {

// One row of the monitoring log, emitted every monitor period.
struct ResourceSample {
  double time = 0.0;         // simulated seconds
  double temperature = 0.0;  // deg C
  double cpu_load = 0.0;     // fraction in [0, 1]
  bool offloaded = false;
};

// First-order linear heating model: load pumps heat in, the difference to
// ambient bleeds it out. Tuned so the heaviest strategy settles above the
// 70 deg C soft limit onboard and cools below the return band when its
// learner runs remotely: steady state = ambient + heat_gain*load/cool_rate,
// i.e. 80.25 at load 0.85 and 54.25 at 0.45. The time constant (250 s) keeps
// each offloaded stretch longer than one monitor period, so the speed cap
// computed from remote cycle times has a chance to take effect.
struct ThermalParams {
  double ambient = 25.0;
  double heat_gain = 0.26;   // deg C per second at full load
  double cool_rate = 0.004;  // 1/s
  std::map<mw::Strategy, double> load_profile = {
      {mw::Strategy::LecOnly, 0.50},      {mw::Strategy::CvOnly, 0.45},
      {mw::Strategy::Conventional, 0.55}, {mw::Strategy::Fixed, 0.60},
      {mw::Strategy::Dynamic, 0.85},
  };
  // load share freed when the learner's table queries run on a fog device
  double offload_relief = 0.40;

  void validate() const {
    if (!(heat_gain > 0.0)) throw std::invalid_argument("heat_gain must be > 0");
    if (!(cool_rate > 0.0)) throw std::invalid_argument("cool_rate must be > 0");
  }

  double steady_state(double load) const {
    return ambient + heat_gain * load / cool_rate;
  }

  double load_for(mw::Strategy s, bool offloaded) const {
    auto it = load_profile.find(s);
    if (it == load_profile.end()) {
      throw std::invalid_argument("no load entry for strategy");
    }
    double load = it->second;
    if (offloaded) load = std::max(0.05, load - offload_relief);
    return load;
  }
};

inline double thermal_step(double temperature, double load,
                           const ThermalParams& p, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  return temperature +
         (p.heat_gain * load - p.cool_rate * (temperature - p.ambient)) * dt;
}

}  // namespace blendsim::res
