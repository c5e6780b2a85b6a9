#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blendsim/ctrl/cv_controller.hpp"
#include "blendsim/sim/calibration.hpp"

namespace blendsim::simplex {

// Convex weights over (learned controller, lane-view controller).
struct EnsembleWeights {
  double w_l = 1.0;
  double w_c = 0.0;

  EnsembleWeights() = default;
  EnsembleWeights(double wl, double wc) : w_l(wl), w_c(wc) { validate(); }

  // weight on the learned controller; the complement goes to the lane-view one
  static EnsembleWeights from_wl(double wl) { return {wl, 1.0 - wl}; }

  void validate() const {
    if (!(w_l >= 0.0 && w_l <= 1.0 && w_c >= 0.0 && w_c <= 1.0) ||
        std::abs(w_l + w_c - 1.0) > 1e-12) {
      throw std::invalid_argument("ensemble weights must be convex");
    }
  }
};

// Weighted combination of the two steering commands. Computed in the affine
// form theta_c + w_l*(theta_l - theta_c), which is algebraically the convex
// combination w_l*theta_l + w_c*theta_c but keeps the endpoints, monotonicity
// in w_l, and the [min, max] envelope exact in floating point (the duty
// difference is exact by Sterbenz's lemma on the duty range).
inline double blend(double theta_l, double theta_c, const EnsembleWeights& w) {
  return theta_c + w.w_l * (theta_l - theta_c);
}

enum class SpeedDir { Inc, Dec, Nop };

// Speed duty nudged by delta_v and saturated to the learning speed band.
inline double speed_update(double v, SpeedDir dir, double delta_v) {
  if (!(delta_v > 0.0)) throw std::invalid_argument("delta_v must be positive");
  if (dir == SpeedDir::Inc) v += delta_v;
  if (dir == SpeedDir::Dec) v -= delta_v;
  return std::clamp(v, sim::Calibration::kSpeedMin, sim::Calibration::kSpeedRlMax);
}

struct FixedStrategyParams {
  double tau_sw = 1.0;  // duty-% disagreement that triggers blending
  EnsembleWeights weights{0.8, 0.2};
  double delta_v = 0.001;  // duty-% speed step per cycle

  void validate() const {
    if (!(tau_sw > 0.0)) throw std::invalid_argument("tau_sw must be positive");
    if (!(delta_v > 0.0)) throw std::invalid_argument("delta_v must be positive");
    weights.validate();
  }
};

struct FixedDecision {
  double steer = sim::Calibration::kSteerCenter;
  double v_next = sim::Calibration::kSpeedMin;
  bool blended = false;
};

// Arguing-machines rule: when the controllers disagree by more than tau_sw,
// blend them and back off the speed; on consensus trust the learned
// controller and creep the speed up.
inline FixedDecision fixed_strategy(double theta_l, double theta_c, double v,
                                    const FixedStrategyParams& p) {
  p.validate();
  FixedDecision d;
  if (std::abs(theta_l - theta_c) > p.tau_sw) {
    d.steer = blend(theta_l, theta_c, p.weights);
    d.v_next = speed_update(v, SpeedDir::Dec, p.delta_v);
    d.blended = true;
  } else {
    d.steer = theta_l;
    d.v_next = speed_update(v, SpeedDir::Inc, p.delta_v);
    d.blended = false;
  }
  return d;
}

// Classic switching logic: the unverified controller drives until the safety
// predicate trips, then control passes wholesale to the baseline.
inline double conventional_simplex(double theta_l, double theta_c, bool unsafe) {
  return unsafe ? theta_c : theta_l;
}

// Baseline stand-in predicate for the conventional strategy: the lane view
// reports anything but a straight ahead while the car is moving fast.
inline bool conventional_unsafe(ctrl::CvLabel label, double speed_mps,
                                double speed_threshold = 0.35) {
  return label != ctrl::CvLabel::Straight && speed_mps > speed_threshold;
}

}  // namespace blendsim::simplex
