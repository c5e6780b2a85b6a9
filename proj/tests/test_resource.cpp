#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blendsim/mw/pipeline.hpp"
#include "blendsim/res/fog.hpp"
#include "blendsim/res/forecast.hpp"
#include "blendsim/res/manager.hpp"
#include "blendsim/res/offload.hpp"
#include "blendsim/res/thermal.hpp"
#include "blendsim/rl/qlearn.hpp"
#include "blendsim/sim/track.hpp"
#include "blendsim/util/rng.hpp"

using namespace blendsim;
using doctest::Approx;

namespace {

sim::Track oval_right() {
  sim::TrackSpec spec;
  spec.lane_width = 0.8;
  spec.closed = true;
  spec.segments = {
      {sim::SegmentKind::Straight, 3.0, 0.0, 0.0},
      {sim::SegmentKind::RightArc, 0.0, 180.0, 0.8},
      {sim::SegmentKind::Straight, 3.0, 0.0, 0.0},
      {sim::SegmentKind::RightArc, 0.0, 180.0, 0.8},
  };
  return sim::Track::build(spec);
}

rl::QTable hold_table() {
  rl::QTable t;
  for (int w = 0; w <= 20; ++w)
    for (int v = 0; v <= 40; ++v)
      for (int tl = 0; tl <= 10; ++tl)
        for (int tc = 0; tc <= 2; ++tc)
          t.q({w, v, tl, tc}, {0, 0}) = 1.0;
  return t;
}

// Noisy sawtooth monitoring log: onboard at load 0.85 until the reading
// crosses 70, remote at 0.45 until it falls below 68. Each row records the
// load in force for the interval it opens, matching the manager's logs.
std::vector<res::ResourceSample> synth_trace(int n, std::uint64_t seed) {
  res::ThermalParams p;
  util::Rng noise(seed);
  std::vector<res::ResourceSample> out;
  double latent = p.ambient;
  bool off = false;
  for (int i = 0; i < n; ++i) {
    double load = off ? 0.45 : 0.85;
    latent = res::thermal_step(latent, load, p, 30.0);
    double reading = std::max(p.ambient, latent + noise.gaussian(0.0, 0.2));
    if (!off && reading > 70.0) {
      off = true;
    } else if (off && reading < 68.0) {
      off = false;
    }
    out.push_back({30.0 * (i + 1), reading, off ? 0.45 : 0.85, off});
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  REQUIRE(!v.empty());
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

// ------------------------------------------------------------- thermal --

TEST_CASE("ambient with no load is an exact equilibrium") {
  res::ThermalParams p;
  CHECK(res::thermal_step(25.0, 0.0, p, 30.0) == 25.0);
  CHECK(res::thermal_step(25.0, 0.0, p, 1.0) == 25.0);
}

TEST_CASE("the steady state is a fixed point of the update") {
  res::ThermalParams p;
  double hot = p.steady_state(0.85);
  CHECK(hot == Approx(80.25).epsilon(1e-12));
  CHECK(res::thermal_step(hot, 0.85, p, 30.0) == Approx(hot).epsilon(1e-12));
  double cool = p.steady_state(0.45);
  CHECK(cool == Approx(54.25).epsilon(1e-12));
  CHECK(res::thermal_step(cool, 0.45, p, 7.5) == Approx(cool).epsilon(1e-12));
}

TEST_CASE("an idle hot board decays monotonically to ambient") {
  res::ThermalParams p;
  double t = 80.0;
  for (int i = 0; i < 100; ++i) {
    double next = res::thermal_step(t, 0.0, p, 30.0);
    CHECK(next < t);
    CHECK(next > p.ambient);
    t = next;
  }
  CHECK(t == Approx(p.ambient).epsilon(1e-4));
}

TEST_CASE("thermal parameters and step arguments are validated") {
  res::ThermalParams p;
  CHECK_THROWS_AS(res::thermal_step(25.0, 0.5, p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(res::thermal_step(25.0, 0.5, p, -1.0), std::invalid_argument);
  res::ThermalParams bad = p;
  bad.heat_gain = 0.0;
  CHECK_THROWS_AS(res::thermal_step(25.0, 0.5, bad, 1.0), std::invalid_argument);
  bad = p;
  bad.cool_rate = -0.1;
  CHECK_THROWS_AS(res::thermal_step(25.0, 0.5, bad, 1.0), std::invalid_argument);
}

TEST_CASE("strategy loads straddle the offload band") {
  res::ThermalParams p;
  CHECK(p.load_for(mw::Strategy::Dynamic, false) == 0.85);
  CHECK(p.load_for(mw::Strategy::Dynamic, true) == Approx(0.45));
  CHECK(p.load_for(mw::Strategy::CvOnly, false) == 0.45);
  // heaviest strategy heats past the limit onboard, cools below the band remote
  CHECK(p.steady_state(p.load_for(mw::Strategy::Dynamic, false)) > 72.0);
  CHECK(p.steady_state(p.load_for(mw::Strategy::Dynamic, true)) < 68.0);

  res::ThermalParams floor = p;
  floor.load_profile[mw::Strategy::LecOnly] = 0.30;
  CHECK(floor.load_for(mw::Strategy::LecOnly, true) == Approx(0.05));

  res::ThermalParams missing = p;
  missing.load_profile.erase(mw::Strategy::Fixed);
  CHECK_THROWS_AS(missing.load_for(mw::Strategy::Fixed, false),
                  std::invalid_argument);
}

// ----------------------------------------------------------------- fog --

TEST_CASE("selection follows the mean of the latest three pings") {
  res::FogSelector sel;
  sel.add_device({"fog-a", 0.010, 0.0});
  sel.add_device({"fog-b", 0.013, 0.0});
  for (double l : {0.010, 0.012, 0.011}) sel.record_ping(0, 0.0, l);
  for (double l : {0.008, 0.030, 0.009}) sel.record_ping(1, 0.0, l);
  CHECK(sel.mean_latest3(0) == Approx(0.011).epsilon(1e-12));
  CHECK(sel.mean_latest3(1) == Approx(0.015666666666666666).epsilon(1e-12));
  // the burst on fog-b outweighs its better typical pings
  CHECK(sel.select() == 0);

  // a fourth ping pushes the oldest out of the window
  sel.record_ping(0, 1.0, 0.001);
  CHECK(sel.mean_latest3(0) == Approx(0.008).epsilon(1e-12));
}

TEST_CASE("equal means keep the earliest registered device") {
  res::FogSelector sel;
  sel.add_device({"first", 0.020, 0.0});
  sel.add_device({"second", 0.020, 0.0});
  sel.record_ping(0, 0.0, 0.010);
  sel.record_ping(1, 0.0, 0.010);
  CHECK(sel.select() == 0);
}

TEST_CASE("a lone device is always selected") {
  res::FogSelector sel;
  sel.add_device({"only", 0.050, 0.0});
  sel.record_ping(0, 0.0, 0.9);
  CHECK(sel.select() == 0);
}

TEST_CASE("fog error paths throw") {
  res::FogSelector sel;
  CHECK_THROWS_AS(sel.select(), std::logic_error);
  CHECK_THROWS_AS(sel.add_device({"zero", 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(sel.add_device({"neg", 0.01, -0.1}), std::invalid_argument);
  sel.add_device({"quiet", 0.010, 0.0});
  CHECK_THROWS_AS(sel.mean_latest3(0), std::logic_error);
  CHECK_THROWS_AS(sel.select(), std::logic_error);
}

TEST_CASE("ping latencies never drop below the floor") {
  res::FogSelector sel;
  sel.add_device({"tiny", 2e-6, 0.01});  // jitter dwarfs the base latency
  util::Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    sel.ping_all(static_cast<double>(i), rng);
    CHECK(sel.mean_latest3(0) >= 1e-6);
  }
}

// ------------------------------------------------------------ offload --

TEST_CASE("placement switches on the threshold with a return band") {
  res::OffloadState onboard;

  auto d = res::offload_decide(72.0, onboard, 120.0, 70.0, 2.0, 1);
  CHECK(d.changed);
  CHECK(d.state.offloaded());
  CHECK(d.state.device == 1);
  CHECK(d.state.since == 120.0);
  CHECK_FALSE(d.warning);

  // below the threshold nothing moves
  d = res::offload_decide(69.5, onboard, 120.0, 70.0, 2.0, 1);
  CHECK_FALSE(d.changed);
  CHECK_FALSE(d.state.offloaded());

  // hot but nowhere to go: warn and stay
  d = res::offload_decide(72.0, onboard, 120.0, 70.0, 2.0, -1);
  CHECK_FALSE(d.changed);
  CHECK(d.warning);
  CHECK_FALSE(d.state.offloaded());

  res::OffloadState remote;
  remote.placement = res::OffloadState::Placement::Offloaded;
  remote.device = 0;

  // inside the band the remote placement holds
  d = res::offload_decide(69.0, remote, 240.0, 70.0, 2.0, 0);
  CHECK_FALSE(d.changed);
  CHECK(d.state.offloaded());

  d = res::offload_decide(67.9, remote, 240.0, 70.0, 2.0, 0);
  CHECK(d.changed);
  CHECK_FALSE(d.state.offloaded());
  CHECK(d.state.device == -1);
  CHECK(d.state.since == 240.0);

  // both comparisons are strict
  d = res::offload_decide(70.0, onboard, 0.0, 70.0, 2.0, 0);
  CHECK_FALSE(d.changed);
  d = res::offload_decide(68.0, remote, 0.0, 70.0, 2.0, 0);
  CHECK_FALSE(d.changed);
}

TEST_CASE("the stopping-distance speed limit matches hand values") {
  sim::Calibration cal;

  // onboard cycle time: v_max above the learner's top speed, cap is slack
  auto lim = res::saturate_speed(0.09, 0.13, cal);
  CHECK(lim.v_max == Approx(0.6923076923076923).epsilon(1e-12));
  CHECK(lim.duty == Approx(15.62967032967033).epsilon(1e-9));
  CHECK(lim.duty > sim::Calibration::kSpeedRlMax);

  // remote cycle time: the cap lands below the learner's top duty and bites
  lim = res::saturate_speed(0.09, 0.14, cal);
  CHECK(lim.v_max == Approx(0.6428571428571429).epsilon(1e-12));
  CHECK(lim.duty == Approx(15.61956043956044).epsilon(1e-9));
  CHECK(lim.duty < sim::Calibration::kSpeedRlMax);

  // degenerate cycle times clamp to the duty range ends
  CHECK(res::saturate_speed(0.09, 1e9, cal).duty ==
        Approx(sim::Calibration::kSpeedMin).epsilon(1e-9));
  CHECK(res::saturate_speed(0.09, 0.05, cal).duty ==
        sim::Calibration::kSpeedMax);
  CHECK_THROWS_AS(res::saturate_speed(0.09, 0.0, cal), std::invalid_argument);
}

TEST_CASE("rolling mean keeps only the newest window") {
  CHECK_THROWS_AS(res::RollingMean(0), std::invalid_argument);
  res::RollingMean m(3);
  CHECK_THROWS_AS(m.mean(), std::logic_error);
  m.add(1.0);
  m.add(2.0);
  m.add(3.0);
  CHECK(m.count() == 3);
  CHECK(m.mean() == Approx(2.0));
  m.add(4.0);  // the 1 falls off
  CHECK(m.count() == 3);
  CHECK(m.mean() == Approx(3.0));
}

// ----------------------------------------------------------- forecast --

TEST_CASE("training pairs join consecutive rows") {
  std::vector<res::ResourceSample> h = {
      {30.0, 50.0, 0.8, false},
      {60.0, 52.0, 0.7, false},
      {90.0, 53.0, 0.6, false},
  };
  res::TrainingSet ts = res::make_training_pairs(h);
  REQUIRE(ts.x.rows() == 2);
  CHECK(ts.x(0, 0) == 50.0);
  CHECK(ts.x(0, 1) == 0.8);
  CHECK(ts.y(0) == 52.0);
  CHECK(ts.x(1, 0) == 52.0);
  CHECK(ts.x(1, 1) == 0.7);
  CHECK(ts.y(1) == 53.0);

  CHECK_THROWS_AS(res::make_training_pairs({{30.0, 50.0, 0.8, false}}),
                  std::invalid_argument);
}

TEST_CASE("least squares recovers the noiseless update exactly") {
  res::ThermalParams p;
  std::vector<res::ResourceSample> h;
  const double loads[] = {0.85, 0.45, 0.60, 0.70};
  double temp = 30.0;
  double load = 0.85;
  for (int i = 0; i < 40; ++i) {
    temp = res::thermal_step(temp, load, p, 30.0);
    double next_load = loads[i % 4];
    h.push_back({30.0 * (i + 1), temp, next_load, false});
    load = next_load;
  }
  res::LinearBaseline lin = res::LinearBaseline::fit(res::make_training_pairs(h));
  CHECK(lin.predict(60.0, 0.33) ==
        Approx(res::thermal_step(60.0, 0.33, p, 30.0)).epsilon(1e-9));
  CHECK(lin.predict(44.0, 0.91) ==
        Approx(res::thermal_step(44.0, 0.91, p, 30.0)).epsilon(1e-9));
}

TEST_CASE("the forecaster refuses a short history") {
  std::vector<res::ResourceSample> h(99, {0.0, 60.0, 0.5, false});
  CHECK_THROWS_AS(res::train_forecaster(h), std::invalid_argument);
}

TEST_CASE("a constant history forecasts that constant") {
  std::vector<res::ResourceSample> h(120, {0.0, 60.0, 0.5, false});
  for (size_t i = 0; i < h.size(); ++i) h[i].time = 30.0 * (i + 1);
  res::MlpForecaster m = res::train_forecaster(h);
  CHECK(m.predict(60.0, 0.5) == Approx(60.0).epsilon(0.1 / 60.0));
}

TEST_CASE("one-step error on a noisy sawtooth stays small") {
  std::vector<res::ResourceSample> full = synth_trace(320, 42);
  std::vector<res::ResourceSample> train(full.begin(), full.begin() + 220);
  std::vector<res::ResourceSample> held(full.begin() + 219, full.end());

  res::TrainingSet ts = res::make_training_pairs(train);
  res::LinearBaseline lin = res::LinearBaseline::fit(ts);
  res::MlpForecaster mlp = res::MlpForecaster::train(ts);

  double lin_mape = res::mape(
      [&](double t, double l) { return lin.predict(t, l); }, held);
  double mlp_mape = res::mape(
      [&](double t, double l) { return mlp.predict(t, l); }, held);

  // read noise of 0.2 degC near 65 degC puts the floor around a third of a
  // percent; both models must sit near it
  CHECK(lin_mape > 0.0);
  CHECK(lin_mape <= 2.0);
  CHECK(mlp_mape <= 2.0);
  CHECK(mlp_mape <= 2.0 * lin_mape);
}

// ------------------------------------------------------------ manager --

TEST_CASE("manager configuration is validated") {
  auto make = [](auto mutate) {
    res::ManagerConfig mc;
    mutate(mc);
    return res::ResourceManager(mc);
  };
  CHECK_THROWS_AS(make([](res::ManagerConfig& m) { m.ping_period = 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(make([](res::ManagerConfig& m) { m.monitor_period = 25.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(make([](res::ManagerConfig& m) { m.sensor_noise_sd = -0.1; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make([](res::ManagerConfig& m) { m.thermal.heat_gain = 0.0; }),
      std::invalid_argument);
  CHECK_THROWS_AS(make([](res::ManagerConfig& m) { m.devices = {{"z", 0.0, 0.0}}; }),
                  std::invalid_argument);
}

namespace {

struct SupervisedRun {
  std::vector<res::ResourceSample> samples;
  std::vector<res::TraceRow> trace;
  std::vector<res::OffloadEvent> events;
  std::vector<mw::CycleRecord> records;
  int warnings = 0;
  bool ended_offloaded = false;
  std::string resource_csv;
  std::string cycle_csv;
};

SupervisedRun supervised_run(double seconds, bool with_devices,
                             const res::MlpForecaster* forecaster = nullptr) {
  sim::Track track = oval_right();
  rl::QTable table = hold_table();

  mw::PipelineConfig cfg;
  cfg.strategy = mw::Strategy::Dynamic;
  cfg.qtable = &table;
  cfg.seed = 5;
  cfg.start_v_idx = 40;  // the hold policy keeps the learner at its top duty

  res::ManagerConfig mc;
  mc.seed = 5;
  mc.forecaster = forecaster;
  if (with_devices) {
    mc.devices = {{"fog-a", 0.010, 0.001}, {"fog-b", 0.013, 0.001}};
  }

  mw::Pipeline p(track, cfg);
  res::ResourceManager rm(mc);
  rm.wire(p.attach_manager(&rm, mc.ping_period));
  p.run_for(seconds);

  SupervisedRun out;
  out.samples = rm.samples();
  out.trace = rm.trace();
  out.events = rm.events();
  out.records = p.records();
  out.warnings = rm.warnings();
  out.ended_offloaded = rm.state().offloaded();
  std::ostringstream rcsv;
  res::write_resource_csv(rcsv, rm.trace());
  out.resource_csv = rcsv.str();
  std::ostringstream ccsv;
  mw::write_cycle_csv(ccsv, p.records());
  out.cycle_csv = ccsv.str();
  return out;
}

}  // namespace

TEST_CASE("the manager samples, offloads, caps and returns on schedule") {
  SupervisedRun run = supervised_run(1500.0, true);

  // one monitoring row per period, exactly on the grid
  REQUIRE(run.samples.size() == 50);
  for (size_t i = 0; i < run.samples.size(); ++i) {
    CHECK(run.samples[i].time == Approx(30.0 * (i + 1)).epsilon(1e-12));
    CHECK(run.samples[i].temperature >= 25.0);
    CHECK(run.samples[i].temperature < 73.0);
  }

  // heating to the limit takes about 400 s; the placement then alternates
  REQUIRE(run.events.size() >= 2);
  CHECK(run.events.front().to_offloaded);
  CHECK(run.events.front().t >= 330.0);
  CHECK(run.events.front().t <= 480.0);
  for (size_t i = 0; i < run.events.size(); ++i) {
    const res::OffloadEvent& e = run.events[i];
    CHECK(std::fmod(e.t, 30.0) == Approx(0.0).epsilon(1e-9));
    if (i > 0) CHECK(e.to_offloaded != run.events[i - 1].to_offloaded);
    if (e.to_offloaded) {
      CHECK(e.device == "fog-a");  // nearer device wins the selection
      CHECK(e.forecast > 70.0);
    } else {
      CHECK(e.device.empty());
      CHECK(e.forecast < 68.0);
    }
  }

  // trace placement flips exactly at the recorded events
  int flips = run.trace.front().offloaded ? 1 : 0;
  for (size_t i = 1; i < run.trace.size(); ++i) {
    if (run.trace[i].offloaded != run.trace[i - 1].offloaded) ++flips;
  }
  CHECK(flips == static_cast<int>(run.events.size()));
  CHECK(run.warnings == 0);

  // remote cycles carry the round-trip; onboard ones do not
  std::vector<double> t_on, t_off, v_on, v_off, s_on, s_off;
  for (const mw::CycleRecord& r : run.records) {
    if (r.tick_t < 10.0) continue;  // skip the standing start
    if (r.offloaded) {
      t_off.push_back(r.t_r);
      v_off.push_back(r.v_set);
      s_off.push_back(r.speed);
    } else {
      t_on.push_back(r.t_r);
      v_on.push_back(r.v_set);
      s_on.push_back(r.speed);
    }
  }
  REQUIRE(!t_on.empty());
  REQUIRE(!t_off.empty());
  for (double t : t_on) CHECK(t == Approx(0.130).epsilon(1e-9));
  for (double t : t_off) CHECK(t == Approx(0.140).epsilon(1e-9));

  // the remote stopping-distance cap trims the commanded duty
  bool saw_capped = false;
  for (double v : v_off) {
    if (v < sim::Calibration::kSpeedRlMax - 1e-9) {
      saw_capped = true;
      CHECK(v == Approx(15.61956043956044).epsilon(1e-9));
    }
  }
  CHECK(saw_capped);
  CHECK(mean_of(v_off) < mean_of(v_on));
  CHECK(mean_of(s_off) < mean_of(s_on));
}

TEST_CASE("with no registered device the manager warns and stays onboard") {
  SupervisedRun run = supervised_run(1500.0, false);
  CHECK(run.warnings >= 1);
  CHECK(run.events.empty());
  CHECK_FALSE(run.ended_offloaded);
  for (const mw::CycleRecord& r : run.records) CHECK_FALSE(r.offloaded);
  // unmanaged, the board sails past the limit
  double peak = 0.0;
  for (const auto& s : run.samples) peak = std::max(peak, s.temperature);
  CHECK(peak > 73.0);
}

TEST_CASE("a trained forecaster drives the placement decision") {
  res::MlpForecaster model = res::train_forecaster(synth_trace(320, 99));
  SupervisedRun run = supervised_run(600.0, true, &model);
  REQUIRE(!run.events.empty());
  CHECK(run.events.front().to_offloaded);
  // looking one period ahead moves the switch no later than the reactive rule
  CHECK(run.events.front().t >= 330.0);
  CHECK(run.events.front().t <= 450.0);
  // the trace logs the model output, not the raw reading
  bool differs = false;
  for (const res::TraceRow& r : run.trace) {
    if (std::abs(r.forecast - r.temperature) > 0.05) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("a supervised run reproduces its logs exactly") {
  SupervisedRun a = supervised_run(900.0, true);
  SupervisedRun b = supervised_run(900.0, true);
  CHECK(a.resource_csv == b.resource_csv);
  CHECK(a.cycle_csv == b.cycle_csv);
  CHECK(!a.resource_csv.empty());
}
