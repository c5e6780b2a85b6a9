#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "blendsim/sim/calibration.hpp"

namespace blendsim::res {

struct OffloadState {
  enum class Placement { Onboard, Offloaded };
  Placement placement = Placement::Onboard;
  int device = -1;  // selector index while offloaded
  double since = 0.0;

  bool offloaded() const { return placement == Placement::Offloaded; }
};

struct OffloadDecision {
  OffloadState state;
  bool changed = false;
  bool warning = false;  // wanted to offload but no device was selectable
};

// Threshold rule with a return band: go remote when the temperature estimate
// exceeds the soft limit, come back once it has fallen a full hysteresis
// below it. The band keeps the placement from chattering around the limit.
inline OffloadDecision offload_decide(double forecast, const OffloadState& s,
                                      double now, double threshold,
                                      double hysteresis, int selected_device) {
  OffloadDecision d{s, false, false};
  if (!s.offloaded() && forecast > threshold) {
    if (selected_device < 0) {
      d.warning = true;
      return d;
    }
    d.state.placement = OffloadState::Placement::Offloaded;
    d.state.device = selected_device;
    d.state.since = now;
    d.changed = true;
  } else if (s.offloaded() && forecast < threshold - hysteresis) {
    d.state.placement = OffloadState::Placement::Onboard;
    d.state.device = -1;
    d.state.since = now;
    d.changed = true;
  }
  return d;
}

struct SpeedLimit {
  double v_max = 0.0;  // m/s
  double duty = sim::Calibration::kSpeedMin;
};

// Top speed that keeps the car within the safe stopping distance over one
// control cycle: v_max = d_s / t_r, converted back to a command duty.
inline SpeedLimit saturate_speed(double d_s, double t_r,
                                 const sim::Calibration& cal) {
  if (!(t_r > 0.0)) throw std::invalid_argument("t_r must be > 0");
  SpeedLimit lim;
  lim.v_max = d_s / t_r;
  lim.duty = cal.speed_to_duty(std::clamp(lim.v_max, 0.0, 1.0));
  return lim;
}

// Mean over the newest `window` entries; older ones fall off the back.
class RollingMean {
 public:
  explicit RollingMean(int window) : window_(window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
  }

  void add(double v) {
    values_.push_back(v);
    if (static_cast<int>(values_.size()) > window_) values_.pop_front();
  }

  int count() const { return static_cast<int>(values_.size()); }

  double mean() const {
    if (values_.empty()) throw std::logic_error("rolling mean of nothing");
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
  }

 private:
  int window_;
  std::deque<double> values_;
};

}  // namespace blendsim::res
