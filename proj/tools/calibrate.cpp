// Calibration sweep for the learned-controller error model. Trains with the
// stock exploration protocol on seeds 1..5, replays the greedy policy for ten
// laps, and prints the modal blend weights per segment class plus the
// out-of-track counts for each strategy, so candidate error models can be
// compared before freezing one as the reference operating point.
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "blendsim/ctrl/lec_surrogate.hpp"
#include "blendsim/mw/pipeline.hpp"
#include "blendsim/rl/explore.hpp"
#include "blendsim/sim/track.hpp"

using namespace blendsim;

int main(int argc, char** argv) {
  ctrl::LecErrorModel err = ctrl::reference_error_model();
  if (argc == 5) {
    err.bias = std::atof(argv[1]);
    err.noise_sd = std::atof(argv[2]);
    err.degrade_speed = std::atof(argv[3]);
    err.degrade_slope = std::atof(argv[4]);
  } else if (argc != 1) {
    std::fprintf(stderr, "usage: %s [bias noise_sd degrade_speed degrade_slope]\n",
                 argv[0]);
    return 2;
  }
  std::printf("error model: bias %.3f noise %.3f dspeed %.3f dslope %.3f\n",
              err.bias, err.noise_sd, err.degrade_speed, err.degrade_slope);

  sim::Track track = sim::Track::build(sim::default_track_spec());
  std::vector<double> starts;
  for (int k = 0; k < 5; ++k) starts.push_back(track.length() * k / 5.0);

  int agg_lec = 0, agg_cv = 0, agg_dyn = 0;
  int weights_ok = 0, ordering_ok = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    rl::TrainEnv env;
    env.track = &track;
    env.lec.error = err;
    env.seed = seed;
    rl::RlHyperparams hp;
    auto ex = rl::explore_run(env, hp, starts);

    auto evaluate = [&](mw::Strategy s) {
      mw::PipelineConfig pc;
      pc.strategy = s;
      pc.lec.error = err;
      pc.seed = seed;
      if (s == mw::Strategy::Dynamic) pc.qtable = &ex.table;
      mw::Pipeline p(track, pc);
      return p.run_laps(10);
    };
    auto dyn = evaluate(mw::Strategy::Dynamic);
    auto lec = evaluate(mw::Strategy::LecOnly);
    auto cv = evaluate(mw::Strategy::CvOnly);

    bool w_straight = std::abs(dyn.modal_w_straight - 0.95) <= 0.05 + 1e-12;
    bool w_curve = dyn.modal_w_curve >= 0.70 - 1e-12 &&
                   dyn.modal_w_curve <= 0.90 + 1e-12;
    bool ordered = dyn.out_events <= lec.out_events &&
                   dyn.out_events <= cv.out_events;
    weights_ok += (w_straight && w_curve) ? 1 : 0;
    ordering_ok += ordered ? 1 : 0;
    agg_dyn += dyn.out_events;
    agg_lec += lec.out_events;
    agg_cv += cv.out_events;

    std::printf(
        "seed %llu: train_outs %4d | modal w straight %.2f curve %.2f %s | "
        "outs dyn %3d lec %3d cv %3d %s | dyn mean v %.3f\n",
        static_cast<unsigned long long>(seed), ex.out_events,
        dyn.modal_w_straight, dyn.modal_w_curve,
        (w_straight && w_curve) ? "ok" : "MISS", dyn.out_events,
        lec.out_events, cv.out_events, ordered ? "ok" : "MISS",
        dyn.mean_speed);
  }

  double reduction =
      agg_lec > 0 ? 1.0 - static_cast<double>(agg_dyn) / agg_lec : 0.0;
  std::printf(
      "weights %d/5 (need >=3) | ordering %d/5 (need 5) | "
      "aggregate outs dyn %d lec %d cv %d | reduction vs lec %.1f%% (need >=30)\n",
      weights_ok, ordering_ok, agg_dyn, agg_lec, agg_cv, 100.0 * reduction);
  bool pass = weights_ok >= 3 && ordering_ok == 5 && reduction >= 0.30;
  std::printf("%s\n", pass ? "CANDIDATE OK" : "CANDIDATE REJECTED");
  return pass ? 0 : 1;
}
