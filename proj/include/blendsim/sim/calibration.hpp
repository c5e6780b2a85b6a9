#pragma once

#include <algorithm>
#include <stdexcept>

namespace blendsim::sim {

// PWM duty-cycle actuation ranges. Steering is an affine map, speed is a
// piecewise-linear profile with two supported calibrations:
//   linear-full : 15.58% -> 0 m/s, 15.70% -> 1.0 m/s
//   rl-range    : 15.58% -> 0 m/s, 15.62% -> 0.65 m/s, 15.70% -> 1.0 m/s
// The learner only commands duties inside [15.58, 15.62], so rl-range is the
// default profile for closed-loop runs.
enum class SpeedProfile { LinearFull, RlRange };

struct Calibration {
  static constexpr double kSteerMin = 10.0;
  static constexpr double kSteerCenter = 15.0;
  static constexpr double kSteerMax = 20.0;
  static constexpr double kSteerDegMax = 30.0;  // duty 20 -> +30 deg (rightward)

  static constexpr double kSpeedMin = 15.58;
  static constexpr double kSpeedRlMax = 15.62;
  static constexpr double kSpeedMax = 15.70;
  static constexpr double kRlTopSpeed = 0.65;  // m/s at duty 15.62 (rl-range)

  SpeedProfile profile = SpeedProfile::RlRange;

  static double duty_to_steering_deg(double duty) {
    check_steer(duty);
    return (duty - kSteerCenter) * (kSteerDegMax / 5.0);
  }

  static double steering_deg_to_duty(double deg) {
    if (deg < -kSteerDegMax - 1e-9 || deg > kSteerDegMax + 1e-9) {
      throw std::out_of_range("steering angle outside [-30, 30] deg");
    }
    return kSteerCenter + deg * (5.0 / kSteerDegMax);
  }

  double duty_to_speed(double duty) const {
    check_speed(duty);
    double v;
    if (profile == SpeedProfile::LinearFull) {
      v = (duty - kSpeedMin) * (1.0 / (kSpeedMax - kSpeedMin));
    } else if (duty <= kSpeedRlMax) {
      v = (duty - kSpeedMin) * (kRlTopSpeed / (kSpeedRlMax - kSpeedMin));
    } else {
      v = kRlTopSpeed +
          (duty - kSpeedRlMax) * ((1.0 - kRlTopSpeed) / (kSpeedMax - kSpeedRlMax));
    }
    return std::clamp(v, 0.0, 1.0);
  }

  double speed_to_duty(double v) const {
    if (v < -1e-12 || v > 1.0 + 1e-12) {
      throw std::out_of_range("speed outside [0, 1] m/s");
    }
    v = std::clamp(v, 0.0, 1.0);
    double duty;
    if (profile == SpeedProfile::LinearFull) {
      duty = kSpeedMin + v * (kSpeedMax - kSpeedMin);
    } else if (v <= kRlTopSpeed) {
      duty = kSpeedMin + v * ((kSpeedRlMax - kSpeedMin) / kRlTopSpeed);
    } else {
      duty = kSpeedRlMax +
             (v - kRlTopSpeed) * ((kSpeedMax - kSpeedRlMax) / (1.0 - kRlTopSpeed));
    }
    return std::clamp(duty, kSpeedMin, kSpeedMax);
  }

  static void check_steer(double duty) {
    if (duty < kSteerMin - 1e-9 || duty > kSteerMax + 1e-9) {
      throw std::out_of_range("steering duty outside [10, 20]%");
    }
  }

  static void check_speed(double duty) {
    if (duty < kSpeedMin - 1e-9 || duty > kSpeedMax + 1e-9) {
      throw std::out_of_range("speed duty outside [15.58, 15.70]%");
    }
  }
};

// Validated duty wrappers used at module hand-off points.
struct SteerDuty {
  explicit SteerDuty(double p) : pct(p) { Calibration::check_steer(p); }
  double pct;
};

struct SpeedDuty {
  explicit SpeedDuty(double p) : pct(p) { Calibration::check_speed(p); }
  double pct;
};

}  // namespace blendsim::sim
