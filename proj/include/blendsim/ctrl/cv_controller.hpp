#pragma once

#include "blendsim/sim/calibration.hpp"
#include "blendsim/sim/sensors.hpp"

namespace blendsim::ctrl {

enum class CvLabel { Straight, Left, Right, Out };

inline const char* cv_label_name(CvLabel l) {
  switch (l) {
    case CvLabel::Straight: return "straight";
    case CvLabel::Left: return "left";
    case CvLabel::Right: return "right";
    case CvLabel::Out: return "out";
  }
  return "?";
}

struct CvOutput {
  CvLabel label = CvLabel::Straight;
  double steer_duty = sim::Calibration::kSteerCenter;
  bool stop = false;
};

// Deterministic lane-view classifier:
//   both lanes visible -> Straight, neutral steer
//   left only          -> Right segment, full right steer (duty 20)
//   right only         -> Left segment, full left steer (duty 10)
//   neither            -> Out, neutral steer plus stop signal
inline CvOutput cv_classify(const sim::LaneView& v) {
  if (v.left && v.right) return {CvLabel::Straight, 15.0, false};
  if (v.left) return {CvLabel::Right, 20.0, false};
  if (v.right) return {CvLabel::Left, 10.0, false};
  return {CvLabel::Out, 15.0, true};
}

}  // namespace blendsim::ctrl
