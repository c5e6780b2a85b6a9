#include "blendsim/rl/explore.hpp"

#include <stdexcept>

#include "blendsim/ctrl/cv_controller.hpp"
#include "blendsim/simplex/strategies.hpp"

namespace blendsim::rl {

void RlHyperparams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0 && gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("alpha and gamma must lie in [0, 1]");
  }
  if (!(eps0 >= 0.0 && eps0 <= 1.0)) {
    throw std::invalid_argument("eps0 must lie in [0, 1]");
  }
  if (!(eps_decay > 0.0 && eps_decay <= 1.0) ||
      !(alpha_decay > 0.0 && alpha_decay <= 1.0)) {
    throw std::invalid_argument("decay factors must lie in (0, 1]");
  }
  if (steps_per_run < 0 || runs < 0) {
    throw std::invalid_argument("step and run counts must be non-negative");
  }
  if (start_w_idx < 0 || start_w_idx >= kWCount || start_v_idx < 0 ||
      start_v_idx >= kVCount) {
    throw std::invalid_argument("start indices off the grid");
  }
}

ExploreResult explore_run(const TrainEnv& env, const RlHyperparams& hp,
                          const std::vector<double>& start_arc_positions) {
  hp.validate();
  if (env.track == nullptr) throw std::invalid_argument("environment needs a track");
  if (start_arc_positions.empty()) {
    throw std::invalid_argument("at least one start pose is required");
  }
  const sim::Track& track = *env.track;
  sim::DeviationThresholds dev_th = env.deviation;
  if (dev_th.center <= 0.0 && dev_th.out <= 0.0) {
    dev_th = sim::DeviationThresholds::defaults_for(track.lane_width());
  }
  dev_th.validate(track.lane_width());
  util::Rng action_rng(util::derive_seed(env.seed, 0));
  util::Rng lec_rng(util::derive_seed(env.seed, 1));
  util::Rng lane_rng(util::derive_seed(env.seed, 2));

  ExploreResult result;
  ctrl::LecSurrogate lec(env.lec, env.cal);

  for (int ep = 0; ep < hp.runs; ++ep) {
    double start_s = start_arc_positions[static_cast<size_t>(ep) %
                                         start_arc_positions.size()];
    sim::VehicleState car = sim::place_on_track(track, start_s, 0.0);
    lec.reset();

    RlState s;
    s.w_idx = hp.start_w_idx;
    s.v_idx = hp.start_v_idx;
    s.theta_l = theta_l_bucket(sim::Calibration::kSteerCenter);
    s.theta_c = theta_c_bucket(sim::Calibration::kSteerCenter);

    double eps = hp.eps0;
    double alpha = hp.alpha;
    for (int d = 0; d < ep; ++d) {
      eps *= hp.eps_decay;
      alpha *= hp.alpha_decay;
    }

    double cumulative = 0.0;
    double applied_duty = speed_duty_of(s.v_idx);
    std::uint64_t frame_label = 0;
    for (int step = 0; step < hp.steps_per_run; ++step) {
      RlAction a = select_action(result.table, s, eps, action_rng);
      RlState moved = transition(s, a);
      double w_l = w_of(moved.w_idx);
      double speed_duty = speed_duty_of(moved.v_idx);

      sim::SensorFrame frame;
      frame.label = ++frame_label;
      frame.t = car.t;
      frame.lanes = sim::sense_lanes(track, car, env.geo, &lane_rng);
      frame.truth_offset = car.lateral_offset;
      frame.truth_heading_error = sim::heading_error(track, car);
      frame.truth_speed = car.speed;
      frame.truth_arc = car.arc_position;
      frame.measured_speed = car.speed;

      // stop requests are ignored while learning; physical excursions below
      // already reset the car
      double theta_c = ctrl::cv_classify(frame.lanes).steer_duty;
      // the surrogate runs before this cycle's command lands, so its
      // speed-dependent noise keys on the still-applied duty
      double theta_l = lec.predict(frame, applied_duty, &lec_rng);
      double theta_d =
          simplex::blend(theta_l, theta_c, simplex::EnsembleWeights::from_wl(w_l));

      car = sim::step_vehicle(track, car, theta_d, speed_duty, env.dt_control,
                              env.vehicle, env.cal);
      applied_duty = speed_duty;

      sim::Deviation dev =
          sim::deviation_class(std::abs(car.lateral_offset), dev_th);
      double r = reward(env.cal.duty_to_speed(speed_duty), dev);
      cumulative += r;

      bool went_out = dev == sim::Deviation::Out;
      if (went_out) {
        double t_now = car.t;
        double v_now = car.speed;
        car = sim::place_on_track(track, car.arc_position, 0.0);
        car.t = t_now;
        car.speed = v_now;
        lec.reset();
        ++result.out_events;
      }

      RlState s_next = moved;
      s_next.theta_l = theta_l_bucket(theta_l);
      s_next.theta_c = theta_c_bucket(theta_c);

      q_update(result.table, s, a, r, s_next, alpha, hp.gamma);
      result.table.count_visit(s, a);

      result.log.push_back({ep, step, s, action_index(a), r, cumulative, went_out});
      s = s_next;
    }
  }
  return result;
}

}  // namespace blendsim::rl
