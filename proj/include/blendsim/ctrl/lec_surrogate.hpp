#pragma once

#include <algorithm>

#include "blendsim/sim/calibration.hpp"
#include "blendsim/sim/sensors.hpp"
#include "blendsim/util/rng.hpp"

namespace blendsim::ctrl {

// Stochastic error model layered on the analytic steering law. The Gaussian
// noise widens linearly once speed passes degrade_speed, which is what makes
// the learned controller lose its edge at high speed.
struct LecErrorModel {
  double bias = 0.0;           // duty-%
  double noise_sd = 0.0;       // duty-% at low speed
  double degrade_speed = 0.45; // m/s
  double degrade_slope = 0.0;  // duty-% per m/s above degrade_speed
};

struct LecParams {
  double gain = 25.0;         // duty-% per meter of lateral offset
  double heading_gain = 8.0;  // duty-% per radian of heading error
  double smoothing = 0.55;    // exponential smoothing on the output
  LecErrorModel error;
};

// Operating point used by the stock configuration: a mild steering bias,
// some always-on noise, and linear degradation past degrade_speed. This is
// what makes the learned controller strong on straights but beatable in
// curves at speed, which the blended strategies exploit.
inline LecErrorModel reference_error_model() {
  return {0.3, 0.2, 0.45, 3.0};
}

// Stand-in for the learned steering network: an analytic lane-keeping law fed
// by the ground truth captured in the sensor frame, with an injectable error
// model. Stateful because of the output smoothing.
class LecSurrogate {
 public:
  explicit LecSurrogate(const LecParams& p, const sim::Calibration& cal)
      : p_(p), cal_(cal) {}

  void reset() { has_last_ = false; }

  // speed_duty is the currently applied speed command; rng may be null when
  // the error model is silent.
  double predict(const sim::SensorFrame& frame, double speed_duty, util::Rng* rng) {
    double v = cal_.duty_to_speed(speed_duty);
    double raw = sim::Calibration::kSteerCenter +
                 p_.gain * frame.truth_offset +
                 p_.heading_gain * frame.truth_heading_error;
    raw += p_.error.bias;
    double sd = p_.error.noise_sd +
                p_.error.degrade_slope * std::max(0.0, v - p_.error.degrade_speed);
    if (rng != nullptr && sd > 0.0) raw += rng->gaussian(0.0, sd);
    double out = has_last_ ? p_.smoothing * last_ + (1.0 - p_.smoothing) * raw : raw;
    out = std::clamp(out, sim::Calibration::kSteerMin, sim::Calibration::kSteerMax);
    last_ = out;
    has_last_ = true;
    return out;
  }

  static double noise_sd_at(const LecErrorModel& e, double v) {
    return e.noise_sd + e.degrade_slope * std::max(0.0, v - e.degrade_speed);
  }

 private:
  LecParams p_;
  sim::Calibration cal_;
  double last_ = sim::Calibration::kSteerCenter;
  bool has_last_ = false;
};

}  // namespace blendsim::ctrl
