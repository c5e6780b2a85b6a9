#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blendsim/sim/track.hpp"
#include "blendsim/sim/vehicle.hpp"
#include "blendsim/util/rng.hpp"

namespace blendsim::sim {

struct LaneView {
  bool left = false;
  bool right = false;
};

// Top-down grayscale strip rendered in the vehicle frame: row 0 is the far
// edge of the forward window, column 0 the left edge of the lateral span.
struct Raster {
  static constexpr int kWidth = 200;
  static constexpr int kHeight = 66;
  std::vector<std::uint8_t> px;

  Raster() : px(static_cast<size_t>(kWidth) * kHeight, 0) {}
  std::uint8_t& at(int row, int col) { return px[static_cast<size_t>(row) * kWidth + col]; }
  std::uint8_t at(int row, int col) const { return px[static_cast<size_t>(row) * kWidth + col]; }
};

// Camera visibility model. A lane boundary counts as visible when its sampled
// points, transformed into the camera frame, fall inside the forward wedge
// AND inside the side's lateral window (d_min, d_max], covering at least
// min_depth_cover meters of depth. On a straight with zero heading error the
// camera-frame lateral position equals the car-to-boundary distance, so the
// one-lane onset sits at |offset| = lane_width/2 - d_max and the both-lost
// point at lane_width/2 - d_min. The raster strip maps the same window onto
// its detection bands, so the pixel pipeline and this rule agree up to pixel
// quantization.
struct PerceptionGeometry {
  double wedge_half_angle_deg = 40.0;
  double forward_near = 0.15;  // meters ahead
  double forward_far = 0.85;
  double d_min = 0.08;  // camera-frame lateral window per side
  double d_max = 0.56;
  double min_depth_cover = 0.16;  // depth extent required in the window; 15 rows
  double sample_span = 1.6;  // boundary arc length sampled ahead of the car
  double sample_back = 0.2;  // and behind
  double sample_step = 0.01;
  double lane_noise = 0.0;  // per-side flip probability

  // raster mapping
  double strip_half_width = 1.6;  // meters; 200 px -> 16 mm/px
  int line_width_px = 3;
  std::uint8_t background = 30;
  std::uint8_t line_value = 255;
};

enum class SenseMode { Geometric, Raster };

struct SensorFrame {
  std::uint64_t label = 0;  // camera sequence number, strictly increasing
  double t = 0.0;
  LaneView lanes;
  double measured_speed = 0.0;  // opto-derived, m/s
  // ground-truth channels captured with the frame; the learned-controller
  // surrogate consumes these in place of pixels
  double truth_offset = 0.0;
  double truth_heading_error = 0.0;
  double truth_speed = 0.0;
  double truth_arc = 0.0;
  std::optional<Raster> raster;
};

// Geometric lane visibility; rng may be null when lane_noise == 0.
LaneView sense_lanes(const Track& track, const VehicleState& state,
                     const PerceptionGeometry& geo, util::Rng* rng);

// Renders both lane boundaries into the strip, culled by the same wedge.
Raster render_strip(const Track& track, const VehicleState& state,
                    const PerceptionGeometry& geo);

// Slot-type opto-coupler: speed = tick_frequency * pi * wheel_diameter.
// Frequencies outside [1/t_zd, 1/t_bt] (inclusive) are rejected: below is a
// zero-detection timeout, above is switch bounce.
struct OptoParams {
  double wheel_diameter = 0.065;  // meters
  double t_zd = 3.0;              // zero-detection timeout, seconds
  double t_bt = 0.01;             // bounce threshold, seconds
};

std::optional<double> opto_speed(double tick_frequency, const OptoParams& p);

// Arc-position dead reckoning between opto samples.
inline double dead_reckon(double position, double speed, double dt) {
  return position + speed * dt;
}

}  // namespace blendsim::sim
