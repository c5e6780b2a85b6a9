#include "blendsim/sim/sensors.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace blendsim::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Frame {
  double cx, cy, cos_h, sin_h;
  // world -> vehicle frame (x forward, y left)
  void to_local(double wx, double wy, double& lx, double& ly) const {
    double dx = wx - cx;
    double dy = wy - cy;
    lx = cos_h * dx + sin_h * dy;
    ly = -sin_h * dx + cos_h * dy;
  }
};

bool in_wedge(double lx, double ly, const PerceptionGeometry& geo) {
  if (lx < geo.forward_near || lx > geo.forward_far) return false;
  double bearing = std::atan2(std::abs(ly), lx) * 180.0 / kPi;
  return bearing <= geo.wedge_half_angle_deg;
}

// side: +1 left boundary, -1 right boundary. Counts the distinct depth rows
// (the raster's row grid) whose boundary sample sits inside the wedge and the
// side's camera-frame lateral window; this is the set of rows the pixel
// pipeline could vote from.
int covered_rows(const Track& track, const VehicleState& state, int side,
                 const PerceptionGeometry& geo, const Frame& f) {
  double half = track.lane_width() / 2.0;
  double px_depth = (geo.forward_far - geo.forward_near) / Raster::kHeight;
  double s0 = state.arc_position - geo.sample_back;
  double s1 = state.arc_position + geo.sample_span;
  std::array<bool, Raster::kHeight> hit{};
  int n = 0;
  for (double s = s0; s <= s1; s += geo.sample_step) {
    TrackPoint p = track.at(s);
    double bx = p.pose.x - std::sin(p.pose.heading) * half * side;
    double by = p.pose.y + std::cos(p.pose.heading) * half * side;
    double lx, ly;
    f.to_local(bx, by, lx, ly);
    if (!in_wedge(lx, ly, geo)) continue;
    double lat = side > 0 ? ly : -ly;
    if (!(lat > geo.d_min && lat <= geo.d_max)) continue;
    int row = static_cast<int>((geo.forward_far - lx) / px_depth);
    if (row < 0 || row >= Raster::kHeight || hit[static_cast<size_t>(row)]) continue;
    hit[static_cast<size_t>(row)] = true;
    ++n;
  }
  return n;
}

}  // namespace

LaneView sense_lanes(const Track& track, const VehicleState& state,
                     const PerceptionGeometry& geo, util::Rng* rng) {
  Frame f{state.pose.x, state.pose.y, std::cos(state.pose.heading),
          std::sin(state.pose.heading)};
  double px_depth = (geo.forward_far - geo.forward_near) / Raster::kHeight;
  int min_rows = static_cast<int>(std::lround(geo.min_depth_cover / px_depth));

  LaneView v;
  v.left = covered_rows(track, state, +1, geo, f) >= min_rows;
  v.right = covered_rows(track, state, -1, geo, f) >= min_rows;

  if (rng != nullptr && geo.lane_noise > 0.0) {
    if (rng->bernoulli(geo.lane_noise)) v.left = !v.left;
    if (rng->bernoulli(geo.lane_noise)) v.right = !v.right;
  }
  return v;
}

Raster render_strip(const Track& track, const VehicleState& state,
                    const PerceptionGeometry& geo) {
  Raster img;
  std::fill(img.px.begin(), img.px.end(), geo.background);

  Frame f{state.pose.x, state.pose.y, std::cos(state.pose.heading),
          std::sin(state.pose.heading)};
  double half = track.lane_width() / 2.0;
  double px_lat = 2.0 * geo.strip_half_width / Raster::kWidth;
  double px_depth = (geo.forward_far - geo.forward_near) / Raster::kHeight;
  int r_half = geo.line_width_px / 2;

  double step = std::min(px_lat, px_depth) / 2.0;
  double s0 = state.arc_position - geo.sample_back;
  double s1 = state.arc_position + geo.sample_span;
  for (int side = -1; side <= 1; side += 2) {
    for (double s = s0; s <= s1; s += step) {
      TrackPoint p = track.at(s);
      double bx = p.pose.x - std::sin(p.pose.heading) * half * side;
      double by = p.pose.y + std::cos(p.pose.heading) * half * side;
      double lx, ly;
      f.to_local(bx, by, lx, ly);
      if (!in_wedge(lx, ly, geo)) continue;
      int row = static_cast<int>((geo.forward_far - lx) / px_depth);
      int col = static_cast<int>((geo.strip_half_width - ly) / px_lat);
      if (row < 0 || row >= Raster::kHeight) continue;
      // lines get their width laterally only; depth coverage comes from the
      // sample density, so inked rows track the boundary's true depth extent
      for (int dc = -r_half; dc <= r_half; ++dc) {
        int c = col + dc;
        if (c >= 0 && c < Raster::kWidth) img.at(row, c) = geo.line_value;
      }
    }
  }
  return img;
}

std::optional<double> opto_speed(double tick_frequency, const OptoParams& p) {
  if (!(p.t_zd > p.t_bt && p.t_bt > 0.0)) {
    throw std::invalid_argument("opto params require t_zd > t_bt > 0");
  }
  if (tick_frequency < 1.0 / p.t_zd || tick_frequency > 1.0 / p.t_bt) {
    return std::nullopt;
  }
  return tick_frequency * kPi * p.wheel_diameter;
}

}  // namespace blendsim::sim
