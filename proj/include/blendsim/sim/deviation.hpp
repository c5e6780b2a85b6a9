#pragma once

#include <cmath>
#include <stdexcept>

namespace blendsim::sim {

enum class Deviation { Center, OffCenter, Out };

inline const char* deviation_name(Deviation d) {
  switch (d) {
    case Deviation::Center: return "center";
    case Deviation::OffCenter: return "offcenter";
    case Deviation::Out: return "out";
  }
  return "?";
}

struct DeviationThresholds {
  double center;  // |offset| <= center      -> Center
  double out;     // |offset| >  out         -> Out

  static DeviationThresholds defaults_for(double lane_width) {
    return {lane_width / 6.0, lane_width / 2.0};
  }

  void validate(double lane_width) const {
    if (!(0.0 < center && center < out && out <= lane_width)) {
      throw std::invalid_argument(
          "deviation thresholds must satisfy 0 < center < out <= lane_width");
    }
  }
};

inline Deviation deviation_class(double lateral_offset, const DeviationThresholds& th) {
  double a = std::abs(lateral_offset);
  if (a <= th.center) return Deviation::Center;
  if (a <= th.out) return Deviation::OffCenter;
  return Deviation::Out;
}

}  // namespace blendsim::sim
