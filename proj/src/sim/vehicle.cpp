#include "blendsim/sim/vehicle.hpp"

#include <cmath>
#include <stdexcept>

namespace blendsim::sim {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}
}  // namespace

VehicleState place_on_track(const Track& track, double s, double lateral) {
  TrackPoint p = track.at(s);
  VehicleState st;
  st.pose = p.pose;
  st.pose.x += -std::sin(p.pose.heading) * lateral;
  st.pose.y += std::cos(p.pose.heading) * lateral;
  Projection proj = track.project(st.pose.x, st.pose.y);
  st.arc_position = proj.arc_position;
  st.lateral_offset = proj.lateral_offset;
  return st;
}

VehicleState step_vehicle(const Track& track, const VehicleState& state,
                          double steer_duty, double speed_duty, double dt,
                          const VehicleParams& params, const Calibration& cal) {
  if (dt < 0.0) throw std::invalid_argument("step_vehicle: dt must be >= 0");
  double v = cal.duty_to_speed(speed_duty);
  double steer_deg = Calibration::duty_to_steering_deg(steer_duty);

  VehicleState next = state;
  next.speed = v;
  next.t = state.t + dt;
  if (dt == 0.0 || v == 0.0) {
    next.speed = v;
    return next;
  }

  // positive steering degrees = rightward = clockwise, so the CCW heading
  // decreases; midpoint heading keeps straight-line motion exact.
  double dpsi = (v / params.wheelbase) * std::tan(steer_deg * kPi / 180.0) * dt;
  double h_mid = state.pose.heading - 0.5 * dpsi;
  next.pose.x = state.pose.x + v * dt * std::cos(h_mid);
  next.pose.y = state.pose.y + v * dt * std::sin(h_mid);
  next.pose.heading = wrap_pi(state.pose.heading - dpsi);

  Projection proj = track.project(next.pose.x, next.pose.y);
  next.arc_position = proj.arc_position;
  next.lateral_offset = proj.lateral_offset;
  return next;
}

double heading_error(const Track& track, const VehicleState& state) {
  TrackPoint p = track.at(state.arc_position);
  return wrap_pi(state.pose.heading - p.pose.heading);
}

}  // namespace blendsim::sim
