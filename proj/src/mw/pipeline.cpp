#include "blendsim/mw/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "blendsim/sim/vehicle.hpp"
#include "blendsim/util/text.hpp"

namespace blendsim::mw {

namespace {

constexpr double kPi = 3.14159265358979323846;

double lognormal_jitter(util::Rng& rng, double sd) {
  if (sd <= 0.0) return 1.0;
  // mean-preserving: E[exp(N(-sd^2/2, sd))] = 1
  return std::exp(rng.gaussian(-0.5 * sd * sd, sd));
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::LecOnly: return "lec-only";
    case Strategy::CvOnly: return "cv-only";
    case Strategy::Conventional: return "conventional";
    case Strategy::Fixed: return "fixed";
    case Strategy::Dynamic: return "dynamic";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "lec-only") return Strategy::LecOnly;
  if (name == "cv-only") return Strategy::CvOnly;
  if (name == "conventional") return Strategy::Conventional;
  if (name == "fixed") return Strategy::Fixed;
  if (name == "dynamic") return Strategy::Dynamic;
  return std::nullopt;
}

namespace {

// ---------------------------------------------------------------- plant ----

// Owns the only mutable copy of the vehicle state. Advances arrive from the
// actuator; sensor samples go out at the camera cadence while integrating.
class PlantActor : public Actor {
 public:
  PlantActor(const sim::Track& track, const PipelineConfig& cfg)
      : track_(track), cfg_(cfg), period_(1.0 / cfg.camera_hz) {
    state_ = sim::place_on_track(track, cfg.start_arc, cfg.start_offset);
  }

  void wire(int camera, int opto, int dm) {
    camera_ = camera;
    opto_ = opto;
    dm_ = dm;
  }

  int laps() const { return laps_; }
  int advances() const { return advances_; }
  const sim::VehicleState& state() const { return state_; }

  void handle(const Msg& m, Context& ctx) override {
    if (const auto* a = std::get_if<Advance>(&m)) {
      if (a->kick && saw_actuation_) return;  // stale startup nudge
      if (!a->kick) {
        saw_actuation_ = true;
        ++advances_;
      }
      advance(*a, ctx);
    } else if (std::get_if<VehicleReset>(&m)) {
      double t = state_.t;
      double v = state_.speed;
      state_ = sim::place_on_track(track_, state_.arc_position, 0.0);
      state_.t = t;
      state_.speed = v;
      emit_samples(ctx);  // the next frame must show the post-reset view
      ctx.send(dm_, AdvanceDone{state_.t, state_.arc_position,
                                state_.lateral_offset, state_.speed, laps_});
    }
  }

 private:
  void advance(const Advance& a, Context& ctx) {
    while (next_boundary_ * period_ <= a.to_t + 1e-12) {
      step_to(next_boundary_ * period_, a);
      emit_samples(ctx);
      ++next_boundary_;
    }
    step_to(a.to_t, a);
    ctx.send(dm_, AdvanceDone{state_.t, state_.arc_position,
                              state_.lateral_offset, state_.speed, laps_});
  }

  void step_to(double t, const Advance& a) {
    double dt = t - state_.t;
    if (dt <= 0.0) return;
    double prev_arc = state_.arc_position;
    state_ = sim::step_vehicle(track_, state_, a.steer_duty, a.speed_duty, dt,
                               cfg_.vehicle, cfg_.cal);
    if (track_.closed() &&
        state_.arc_position < prev_arc - 0.5 * track_.length()) {
      ++laps_;
    }
  }

  void emit_samples(Context& ctx) {
    double f = state_.speed / (kPi * cfg_.opto.wheel_diameter);
    ctx.send(opto_, OptoSample{state_.t, f});
    ctx.send(camera_, PlantSnapshot{state_});
  }

  const sim::Track& track_;
  PipelineConfig cfg_;
  double period_;
  sim::VehicleState state_;
  std::int64_t next_boundary_ = 0;
  int laps_ = 0;
  int advances_ = 0;
  bool saw_actuation_ = false;
  int camera_ = -1, opto_ = -1, dm_ = -1;
};

// --------------------------------------------------------------- devices ---

class CameraActor : public Actor {
 public:
  CameraActor(const sim::Track& track, const PipelineConfig& cfg,
              std::uint64_t seed)
      : track_(track), geo_(cfg.geo), rng_(util::derive_seed(seed, 2)) {}

  void wire(int buffer) { buffer_ = buffer; }

  void handle(const Msg& m, Context& ctx) override {
    const auto* s = std::get_if<PlantSnapshot>(&m);
    if (s == nullptr) return;
    sim::SensorFrame f;
    f.t = s->state.t;
    f.lanes = sim::sense_lanes(track_, s->state, geo_, &rng_);
    f.truth_offset = s->state.lateral_offset;
    f.truth_heading_error = sim::heading_error(track_, s->state);
    f.truth_speed = s->state.speed;
    f.truth_arc = s->state.arc_position;
    ctx.send(buffer_, FramePublish{std::move(f)});
  }

 private:
  const sim::Track& track_;
  sim::PerceptionGeometry geo_;
  util::Rng rng_;
  int buffer_ = -1;
};

class OptoActor : public Actor {
 public:
  explicit OptoActor(const sim::OptoParams& p) : params_(p) {}
  void wire(int buffer) { buffer_ = buffer; }

  void handle(const Msg& m, Context& ctx) override {
    const auto* s = std::get_if<OptoSample>(&m);
    if (s == nullptr) return;
    auto v = sim::opto_speed(s->tick_frequency, params_);
    ctx.send(buffer_, SpeedPublish{s->t, v.value_or(0.0)});
  }

 private:
  sim::OptoParams params_;
  int buffer_ = -1;
};

// ---------------------------------------------------------------- buffer ---

// One slot, sequence-labeled, overwritten by every publication; pushes each
// new frame to its subscribers and answers the decision manager's requests.
class BufferActor : public Actor {
 public:
  void subscribe(int id, double delay) { subs_.push_back({id, delay}); }
  void wire(int dm) { dm_ = dm; }
  Label label() const { return label_; }

  void handle(const Msg& m, Context& ctx) override {
    if (const auto* sp = std::get_if<SpeedPublish>(&m)) {
      last_speed_ = sp->speed;
    } else if (const auto* fp = std::get_if<FramePublish>(&m)) {
      slot_ = fp->frame;
      slot_.measured_speed = last_speed_;
      slot_.label = ++label_;
      has_frame_ = true;
      for (const auto& [id, delay] : subs_) {
        ctx.send(id, FramePush{label_, slot_}, delay);
      }
    } else if (std::get_if<FrameRequest>(&m)) {
      ctx.send(dm_, FrameReply{has_frame_, label_, slot_});
    }
  }

 private:
  std::vector<std::pair<int, double>> subs_;
  sim::SensorFrame slot_;
  double last_speed_ = 0.0;
  Label label_ = 0;
  bool has_frame_ = false;
  int dm_ = -1;
};

// ----------------------------------------------------------- controllers --

class LecActor : public Actor {
 public:
  LecActor(const PipelineConfig& cfg)
      : surrogate_(cfg.lec, cfg.cal),
        noise_rng_(util::derive_seed(cfg.seed, 1)),
        jitter_rng_(util::derive_seed(cfg.seed, 10)),
        latency_(cfg.latency.lec),
        jitter_sd_(cfg.latency.jitter_sd) {}

  void wire(int dm) { dm_ = dm; }
  int computes() const { return computes_; }
  int pushes() const { return pushes_; }

  void handle(const Msg& m, Context& ctx) override {
    if (const auto* push = std::get_if<FramePush>(&m)) {
      cache_ = *push;
      ++pushes_;
    } else if (const auto* p = std::get_if<LecPrompt>(&m)) {
      ++computes_;
      double theta =
          surrogate_.predict(cache_.frame, p->applied_speed_duty, &noise_rng_);
      ctx.send(dm_, LecReply{cache_.label, theta},
               latency_ * lognormal_jitter(jitter_rng_, jitter_sd_));
    } else if (std::get_if<SmoothingReset>(&m)) {
      surrogate_.reset();
    }
  }

 private:
  ctrl::LecSurrogate surrogate_;
  util::Rng noise_rng_;
  util::Rng jitter_rng_;
  double latency_;
  double jitter_sd_;
  FramePush cache_;
  int computes_ = 0;
  int pushes_ = 0;
  int dm_ = -1;
};

class CvActor : public Actor {
 public:
  explicit CvActor(const PipelineConfig& cfg)
      : jitter_rng_(util::derive_seed(cfg.seed, 11)),
        latency_(cfg.latency.cv),
        jitter_sd_(cfg.latency.jitter_sd) {}

  void wire(int dm) { dm_ = dm; }
  int computes() const { return computes_; }

  void handle(const Msg& m, Context& ctx) override {
    if (const auto* push = std::get_if<FramePush>(&m)) {
      cache_ = *push;
    } else if (std::get_if<CvPrompt>(&m)) {
      ++computes_;
      ctx.send(dm_, CvReply{cache_.label, ctrl::cv_classify(cache_.frame.lanes)},
               latency_ * lognormal_jitter(jitter_rng_, jitter_sd_));
    }
  }

 private:
  util::Rng jitter_rng_;
  double latency_;
  double jitter_sd_;
  FramePush cache_;
  int computes_ = 0;
  int dm_ = -1;
};

class RlActor : public Actor {
 public:
  explicit RlActor(const PipelineConfig& cfg)
      : table_(cfg.qtable),
        jitter_rng_(util::derive_seed(cfg.seed, 12)),
        latency_(cfg.latency.rl),
        jitter_sd_(cfg.latency.jitter_sd),
        w_idx_(cfg.start_w_idx),
        v_idx_(cfg.start_v_idx) {}

  void wire(int dm) { dm_ = dm; }
  int computes() const { return computes_; }

  void handle(const Msg& m, Context& ctx) override {
    if (const auto* push = std::get_if<FramePush>(&m)) {
      label_ = push->label;
    } else if (const auto* p = std::get_if<RlPrompt>(&m)) {
      ++computes_;
      rl::RlState s{w_idx_, v_idx_, rl::theta_l_bucket(p->theta_l_prev),
                    rl::theta_c_bucket(p->theta_c_prev)};
      rl::RlAction a =
          table_ != nullptr ? rl::exploit_action(*table_, s) : rl::RlAction{};
      rl::RlState next = rl::transition(s, a);
      w_idx_ = next.w_idx;
      v_idx_ = next.v_idx;
      ctx.send(dm_,
               RlReply{label_, w_idx_, v_idx_, rl::w_of(w_idx_),
                       rl::speed_duty_of(v_idx_)},
               latency_ * lognormal_jitter(jitter_rng_, jitter_sd_));
    }
  }

 private:
  const rl::QTable* table_;
  util::Rng jitter_rng_;
  double latency_;
  double jitter_sd_;
  Label label_ = 0;
  int w_idx_;
  int v_idx_;
  int computes_ = 0;
  int dm_ = -1;
};

class ActuatorActor : public Actor {
 public:
  explicit ActuatorActor(double latency) : latency_(latency) {}
  void wire(int plant) { plant_ = plant; }
  int actuations() const { return actuations_; }

  void handle(const Msg& m, Context& ctx) override {
    const auto* a = std::get_if<Actuate>(&m);
    if (a == nullptr) return;
    ++actuations_;
    ctx.send(plant_, Advance{ctx.now() + latency_, a->steer_duty, a->speed_duty},
             latency_);
  }

 private:
  double latency_;
  int actuations_ = 0;
  int plant_ = -1;
};

// -------------------------------------------------------- decision manager -

class DmActor : public Actor {
 public:
  DmActor(const sim::Track& track, const PipelineConfig& cfg,
          sim::DeviationThresholds dev)
      : track_(track), cfg_(cfg), dev_(dev) {
    applied_duty_ = sim::Calibration::kSpeedMin;
    fixed_duty_ = std::clamp(cfg.speed_setpoint, sim::Calibration::kSpeedMin,
                             sim::Calibration::kSpeedRlMax);
    speed_cap_ = cfg.speed_cap;
    rl_offloaded_ = cfg.rl_offloaded;
    rl_rtt_ = cfg.rl_rtt;
  }

  void wire(int self, int buffer, int actuator, int plant, int lec, int cv,
            int rl) {
    self_ = self;
    buffer_ = buffer;
    actuator_ = actuator;
    plant_ = plant;
    lec_ = lec;
    cv_ = cv;
    rl_ = rl;
  }

  void set_targets(int cycles, int laps, double until_t = -1.0) {
    target_cycles_ = cycles;
    target_laps_ = laps;
    target_time_ = until_t;
    done_ = false;
  }

  void set_manager(int rm) { rm_ = rm; }

  bool done() const { return done_; }
  bool stopped() const { return stopped_; }
  int faults() const { return faults_; }
  const std::vector<CycleRecord>& records() const { return records_; }

  void handle(const Msg& m, Context& ctx) override {
    if (std::get_if<Tick>(&m)) {
      begin_cycle(ctx);
    } else if (const auto* fr = std::get_if<FrameReply>(&m)) {
      on_frame(*fr, ctx);
    } else if (const auto* lr = std::get_if<LecReply>(&m)) {
      if (phase_ == Phase::AwaitReplies) {
        lec_r_ = *lr;
        have_lec_ = true;
        if (all_replies()) verify(ctx);
      }
    } else if (const auto* cr = std::get_if<CvReply>(&m)) {
      if (phase_ == Phase::AwaitReplies) {
        cv_r_ = *cr;
        have_cv_ = true;
        if (all_replies()) verify(ctx);
      }
    } else if (const auto* rr = std::get_if<RlReply>(&m)) {
      if (phase_ == Phase::AwaitReplies) {
        rl_r_ = *rr;
        have_rl_ = true;
        if (all_replies()) verify(ctx);
      }
    } else if (const auto* ad = std::get_if<AdvanceDone>(&m)) {
      on_advance_done(*ad, ctx);
    } else if (const auto* sc = std::get_if<SpeedCap>(&m)) {
      speed_cap_ = sc->duty;
    } else if (const auto* pl = std::get_if<Placement>(&m)) {
      if (uses_rl()) {
        rl_offloaded_ = pl->offloaded;
        rl_rtt_ = pl->rtt;
      }
    }
  }

 private:
  enum class Phase { Idle, AwaitFrame, AwaitReplies, AwaitAdvance, AwaitReset };

  bool uses_lec() const { return cfg_.strategy != Strategy::CvOnly; }
  bool uses_cv() const { return cfg_.strategy != Strategy::LecOnly; }
  bool uses_rl() const { return cfg_.strategy == Strategy::Dynamic; }

  double decision_delay() const {
    double d = cfg_.latency.dma;
    if (uses_rl() && rl_offloaded_) d += rl_rtt_;
    return d;
  }

  bool all_replies() const { return have_lec_ && have_cv_ && have_rl_; }

  void begin_cycle(Context& ctx) {
    if (done_ || stopped_ || phase_ != Phase::Idle) return;
    cur_ = CycleRecord{};
    cur_.cycle = static_cast<int>(records_.size());
    cur_.tick_t = ctx.now();
    retries_ = 0;
    phase_ = Phase::AwaitFrame;
    ctx.send(buffer_, FrameRequest{});
  }

  void on_frame(const FrameReply& r, Context& ctx) {
    if (phase_ != Phase::AwaitFrame) return;
    if (!r.ready) {
      // nothing sensed yet: retry at the camera cadence (simulated blocking)
      phase_ = Phase::Idle;
      ctx.send(self_, Tick{}, 1.0 / cfg_.camera_hz);
      return;
    }
    frame_ = r.frame;
    cur_.label = r.label;
    prompt(ctx);
  }

  void prompt(Context& ctx) {
    have_lec_ = !uses_lec();
    have_cv_ = !uses_cv();
    have_rl_ = !uses_rl();
    phase_ = Phase::AwaitReplies;
    if (uses_lec()) ctx.send(lec_, LecPrompt{applied_duty_});
    if (uses_cv()) ctx.send(cv_, CvPrompt{});
    if (uses_rl()) ctx.send(rl_, RlPrompt{theta_l_prev_, theta_c_prev_});
  }

  void verify(Context& ctx) {
    Label seen = 0;
    bool first = true;
    bool coherent = true;
    auto check = [&](Label l) {
      if (first) {
        seen = l;
        first = false;
      } else if (l != seen) {
        coherent = false;
      }
      seen = std::max(seen, l);
    };
    if (uses_lec()) check(lec_r_.label);
    if (uses_cv()) check(cv_r_.label);
    if (uses_rl()) check(rl_r_.label);

    if (!coherent && retries_ == 0) {
      // stale mix: drop the batch and request fresh computations once
      retries_ = 1;
      cur_.label_retries = 1;
      prompt(ctx);
      return;
    }
    if (!coherent) {
      cur_.fault = true;
      ++faults_;
    }
    cur_.label = seen;
    decide(ctx);
  }

  void decide(Context& ctx) {
    double theta_l = uses_lec() ? lec_r_.theta_l : sim::Calibration::kSteerCenter;
    double theta_c = uses_cv() ? cv_r_.out.steer_duty : sim::Calibration::kSteerCenter;
    cur_.theta_l = theta_l;
    cur_.theta_c = theta_c;
    cur_.segment_estimate =
        uses_cv() ? cv_r_.out.label : ctrl::CvLabel::Straight;
    cur_.segment = track_.kind_at(track_.wrap(frame_.truth_arc));
    cur_.speed = frame_.measured_speed;

    double theta = theta_l;
    double w_l = 1.0;
    double v_duty = cfg_.speed_setpoint;
    switch (cfg_.strategy) {
      case Strategy::LecOnly:
        break;
      case Strategy::CvOnly:
        theta = theta_c;
        w_l = 0.0;
        break;
      case Strategy::Conventional: {
        bool unsafe =
            simplex::conventional_unsafe(cv_r_.out.label, frame_.measured_speed,
                                         cfg_.conventional_speed_threshold);
        theta = simplex::conventional_simplex(theta_l, theta_c, unsafe);
        w_l = unsafe ? 0.0 : 1.0;
        break;
      }
      case Strategy::Fixed: {
        simplex::FixedDecision d =
            simplex::fixed_strategy(theta_l, theta_c, fixed_duty_, cfg_.fixed);
        theta = d.steer;
        fixed_duty_ = d.v_next;
        v_duty = d.v_next;
        w_l = d.blended ? cfg_.fixed.weights.w_l : 1.0;
        break;
      }
      case Strategy::Dynamic:
        w_l = rl_r_.w_l;
        theta = simplex::blend(theta_l, theta_c,
                               simplex::EnsembleWeights::from_wl(w_l));
        v_duty = rl_r_.speed_duty;
        break;
    }
    v_duty = std::min({v_duty, cfg_.speed_setpoint, speed_cap_});
    v_duty = std::max(v_duty, sim::Calibration::kSpeedMin);

    cur_.w_l = w_l;
    cur_.theta_applied = theta;
    cur_.v_set = v_duty;
    cur_.offloaded = uses_rl() && rl_offloaded_;
    theta_l_prev_ = theta_l;
    theta_c_prev_ = theta_c;

    double delay = decision_delay();
    bool stop = uses_cv() && cv_r_.out.stop;
    if (stop && !cfg_.evaluation_mode) {
      // halt: no actuation message leaves the manager after this point
      cur_.stopped = true;
      cur_.t_r = ctx.now() + delay - cur_.tick_t;
      cur_.lateral_offset = frame_.truth_offset;
      stopped_ = true;
      finish_record(ctx, false);
      return;
    }
    if (stop) {
      // evaluation override: count as out-of-track, reset, keep driving
      cur_.out_event = true;
      cur_.t_r = ctx.now() + delay - cur_.tick_t;
      cur_.lateral_offset = frame_.truth_offset;
      phase_ = Phase::AwaitReset;
      ctx.send(plant_, VehicleReset{}, delay);
      if (uses_lec()) ctx.send(lec_, SmoothingReset{}, delay);
      return;
    }
    phase_ = Phase::AwaitAdvance;
    applied_duty_ = v_duty;
    ctx.send(actuator_, Actuate{theta, v_duty}, delay);
  }

  void on_advance_done(const AdvanceDone& d, Context& ctx) {
    laps_ = d.laps_completed;
    if (phase_ == Phase::AwaitReset) {
      // reset acknowledged; the record was finalized before the reset
      finish_record(ctx, true);
      return;
    }
    if (phase_ != Phase::AwaitAdvance) return;  // startup kick
    cur_.t_r = d.t - cur_.tick_t;
    cur_.lateral_offset = d.lateral_offset;
    if (std::abs(d.lateral_offset) > dev_.out) {
      cur_.out_event = true;
      if (cfg_.evaluation_mode) {
        phase_ = Phase::AwaitReset;
        ctx.send(plant_, VehicleReset{});
        if (uses_lec()) ctx.send(lec_, SmoothingReset{});
        return;
      }
    }
    finish_record(ctx, false);
  }

  void finish_record(Context& ctx, bool /*after_reset*/) {
    records_.push_back(cur_);
    phase_ = Phase::Idle;
    if (rm_ >= 0) ctx.send(rm_, CycleReport{cur_.t_r});
    if (stopped_) {
      done_ = true;
      return;
    }
    if (target_cycles_ > 0 &&
        static_cast<int>(records_.size()) >= target_cycles_) {
      done_ = true;
    }
    if (target_laps_ > 0 && laps_ >= target_laps_) done_ = true;
    if (target_time_ > 0 && ctx.now() >= target_time_) done_ = true;
    if (!done_) ctx.send(self_, Tick{});
  }

  const sim::Track& track_;
  PipelineConfig cfg_;
  sim::DeviationThresholds dev_;

  Phase phase_ = Phase::Idle;
  CycleRecord cur_;
  sim::SensorFrame frame_;
  LecReply lec_r_;
  CvReply cv_r_;
  RlReply rl_r_;
  bool have_lec_ = false, have_cv_ = false, have_rl_ = false;
  int retries_ = 0;

  double applied_duty_;
  double fixed_duty_;
  double theta_l_prev_ = sim::Calibration::kSteerCenter;
  double theta_c_prev_ = sim::Calibration::kSteerCenter;
  double speed_cap_;
  bool rl_offloaded_;
  double rl_rtt_;

  std::vector<CycleRecord> records_;
  int laps_ = 0;
  int faults_ = 0;
  bool stopped_ = false;
  bool done_ = true;
  int target_cycles_ = -1;
  int target_laps_ = -1;
  double target_time_ = -1.0;
  int rm_ = -1;

  int self_ = -1, buffer_ = -1, actuator_ = -1, plant_ = -1;
  int lec_ = -1, cv_ = -1, rl_ = -1;
};

}  // namespace

// -------------------------------------------------------------- pipeline ---

struct Pipeline::Impl {
  std::unique_ptr<PlantActor> plant;
  std::unique_ptr<CameraActor> camera;
  std::unique_ptr<OptoActor> opto;
  std::unique_ptr<BufferActor> buffer;
  std::unique_ptr<LecActor> lec;
  std::unique_ptr<CvActor> cv;
  std::unique_ptr<RlActor> rl;
  std::unique_ptr<ActuatorActor> actuator;
  std::unique_ptr<DmActor> dm;
  PipelineConfig cfg;
  int dm_id = -1;
};

Pipeline::Pipeline(const sim::Track& track, const PipelineConfig& cfg,
                   Runtime* runtime)
    : impl_(std::make_unique<Impl>()) {
  const LatencyModel& lat = cfg.latency;
  if (lat.lec < 0 || lat.cv < 0 || lat.rl < 0 || lat.dma < 0 ||
      lat.actuator < 0 || lat.jitter_sd < 0) {
    throw std::invalid_argument("actor latencies must be >= 0");
  }
  if (cfg.camera_hz <= 0) throw std::invalid_argument("camera rate must be > 0");
  if (cfg.rl_rtt < 0) throw std::invalid_argument("round-trip must be >= 0");
  if (cfg.strategy == Strategy::Dynamic && cfg.qtable == nullptr) {
    throw std::invalid_argument("dynamic strategy needs a q-table");
  }
  cfg.fixed.validate();

  sim::DeviationThresholds dev = cfg.deviation;
  if (dev.center <= 0.0 && dev.out <= 0.0) {
    dev = sim::DeviationThresholds::defaults_for(track.lane_width());
  }
  dev.validate(track.lane_width());

  if (runtime != nullptr) {
    rt_ = runtime;
  } else {
    owned_rt_ = std::make_unique<SimScheduler>();
    rt_ = owned_rt_.get();
  }

  impl_->cfg = cfg;
  impl_->plant = std::make_unique<PlantActor>(track, cfg);
  impl_->camera = std::make_unique<CameraActor>(track, cfg, cfg.seed);
  impl_->opto = std::make_unique<OptoActor>(cfg.opto);
  impl_->buffer = std::make_unique<BufferActor>();
  impl_->actuator = std::make_unique<ActuatorActor>(lat.actuator);
  impl_->dm = std::make_unique<DmActor>(track, cfg, dev);

  bool uses_lec = cfg.strategy != Strategy::CvOnly;
  bool uses_cv = cfg.strategy != Strategy::LecOnly;
  bool uses_rl = cfg.strategy == Strategy::Dynamic;

  int plant_id = rt_->add_actor(impl_->plant.get());
  int camera_id = rt_->add_actor(impl_->camera.get());
  int opto_id = rt_->add_actor(impl_->opto.get());
  buffer_id_ = rt_->add_actor(impl_->buffer.get());
  int lec_id = -1, cv_id = -1, rl_id = -1;
  if (uses_lec) {
    impl_->lec = std::make_unique<LecActor>(cfg);
    lec_id = rt_->add_actor(impl_->lec.get());
    impl_->buffer->subscribe(lec_id, cfg.push_delay_lec);
  }
  if (uses_cv) {
    impl_->cv = std::make_unique<CvActor>(cfg);
    cv_id = rt_->add_actor(impl_->cv.get());
    impl_->buffer->subscribe(cv_id, cfg.push_delay_cv);
  }
  if (uses_rl) {
    impl_->rl = std::make_unique<RlActor>(cfg);
    rl_id = rt_->add_actor(impl_->rl.get());
    impl_->buffer->subscribe(rl_id, cfg.push_delay_rl);
  }
  int actuator_id = rt_->add_actor(impl_->actuator.get());
  impl_->dm_id = rt_->add_actor(impl_->dm.get());

  impl_->plant->wire(camera_id, opto_id, impl_->dm_id);
  impl_->camera->wire(buffer_id_);
  impl_->opto->wire(buffer_id_);
  impl_->buffer->wire(impl_->dm_id);
  if (impl_->lec) impl_->lec->wire(impl_->dm_id);
  if (impl_->cv) impl_->cv->wire(impl_->dm_id);
  if (impl_->rl) impl_->rl->wire(impl_->dm_id);
  impl_->actuator->wire(plant_id);
  impl_->dm->wire(impl_->dm_id, buffer_id_, actuator_id, plant_id, lec_id,
                  cv_id, rl_id);

  roster_.push_back({"camera", ActorKind::Device, 0.0, false, ""});
  roster_.push_back({"opto", ActorKind::Device, 0.0, false, ""});
  roster_.push_back({"buffer", ActorKind::Buffer, 0.0, false, ""});
  if (uses_lec) roster_.push_back({"lec", ActorKind::Controller, lat.lec, false, ""});
  if (uses_cv) roster_.push_back({"cv", ActorKind::Controller, lat.cv, false, ""});
  if (uses_rl) {
    roster_.push_back({"rl", ActorKind::Rl, lat.rl, cfg.rl_offloaded,
                       cfg.rl_offloaded ? "fog" : ""});
  }
  roster_.push_back({"dm", ActorKind::DecisionManager, lat.dma, false, ""});
  roster_.push_back({"actuator", ActorKind::Actuator, lat.actuator, false, ""});

  int dm_count = 0, buffer_count = 0;
  for (const ActorSpec& a : roster_) {
    dm_count += a.kind == ActorKind::DecisionManager;
    buffer_count += a.kind == ActorKind::Buffer;
  }
  if (dm_count != 1 || buffer_count != 1) {
    throw std::logic_error("pipeline needs exactly one manager and one buffer");
  }

  // startup: the plant announces its initial view, then the manager may tick
  Advance kick;
  kick.to_t = cfg.first_frame_delay;
  kick.kick = true;
  rt_->post(plant_id, kick, cfg.first_frame_delay);
}

Pipeline::~Pipeline() = default;

const std::vector<CycleRecord>& Pipeline::records() const {
  return impl_->dm->records();
}

PipelineStats Pipeline::stats() const {
  PipelineStats s;
  if (impl_->lec) {
    s.lec_computes = impl_->lec->computes();
    s.lec_pushes = impl_->lec->pushes();
  }
  if (impl_->cv) s.cv_computes = impl_->cv->computes();
  if (impl_->rl) s.rl_computes = impl_->rl->computes();
  s.actuations = impl_->actuator->actuations();
  s.plant_advances = impl_->plant->advances();
  return s;
}

bool Pipeline::stopped() const { return impl_->dm->stopped(); }

void Pipeline::inject_frame(double at, const sim::SensorFrame& frame) {
  rt_->post(buffer_id_, FramePublish{frame}, at);
}

CycleRecord Pipeline::run_cycle() {
  if (impl_->dm->stopped()) throw std::logic_error("pipeline already stopped");
  impl_->dm->set_targets(static_cast<int>(records().size()) + 1, -1);
  rt_->post(impl_->dm_id, Tick{}, rt_->now());
  rt_->run([this] { return impl_->dm->done(); });
  return records().back();
}

EvaluationReport Pipeline::run_laps(int laps) {
  if (laps < 1) throw std::invalid_argument("lap count must be >= 1");
  if (impl_->dm->stopped()) throw std::logic_error("pipeline already stopped");
  impl_->dm->set_targets(-1, laps);
  rt_->post(impl_->dm_id, Tick{}, rt_->now());
  rt_->run([this] { return impl_->dm->done(); });
  EvaluationReport r =
      summarize(records(), impl_->cfg.strategy, impl_->cfg.seed, laps);
  r.faults = impl_->dm->faults();
  return r;
}

EvaluationReport Pipeline::run_cycles(int n) {
  if (n < 1) throw std::invalid_argument("cycle count must be >= 1");
  if (impl_->dm->stopped()) throw std::logic_error("pipeline already stopped");
  impl_->dm->set_targets(static_cast<int>(records().size()) + n, -1);
  rt_->post(impl_->dm_id, Tick{}, rt_->now());
  rt_->run([this] { return impl_->dm->done(); });
  EvaluationReport r =
      summarize(records(), impl_->cfg.strategy, impl_->cfg.seed, 0);
  r.faults = impl_->dm->faults();
  return r;
}

EvaluationReport Pipeline::run_for(double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (impl_->dm->stopped()) throw std::logic_error("pipeline already stopped");
  impl_->dm->set_targets(-1, -1, rt_->now() + seconds);
  rt_->post(impl_->dm_id, Tick{}, rt_->now());
  rt_->run([this] { return impl_->dm->done(); });
  EvaluationReport r =
      summarize(records(), impl_->cfg.strategy, impl_->cfg.seed, 0);
  r.faults = impl_->dm->faults();
  return r;
}

int Pipeline::attach_manager(Actor* a, double first_tick_at) {
  int id = rt_->add_actor(a);
  impl_->dm->set_manager(id);
  rt_->post(id, Tick{}, first_tick_at);
  return impl_->dm_id;
}

// --------------------------------------------------------------- reports ---

namespace {

int w_grid_index(double w_l) {
  return std::clamp(static_cast<int>(std::lround(w_l * 20.0)), 0, 20);
}

void finish_stats(SegmentStats& s, const std::map<int, int>& modal,
                  double speed_sum, double w_sum) {
  if (s.cycles == 0) return;
  s.mean_speed = speed_sum / s.cycles;
  s.mean_w_l = w_sum / s.cycles;
  int best = -1, best_count = -1;
  for (const auto& [idx, count] : modal) {
    if (count > best_count) {
      best = idx;
      best_count = count;
    }
  }
  s.modal_w_l = best / 20.0;
}

}  // namespace

EvaluationReport summarize(const std::vector<CycleRecord>& records,
                           Strategy strategy, std::uint64_t seed, int laps) {
  EvaluationReport r;
  r.strategy = strategy_name(strategy);
  r.seed = seed;
  r.laps = laps;
  r.cycles = static_cast<int>(records.size());
  if (records.empty()) return r;

  double speed_sum = 0.0, tr_sum = 0.0;
  r.t_r_min = records.front().t_r;
  r.t_r_max = records.front().t_r;
  std::map<int, int> modal_s, modal_l, modal_r, modal_curve;
  double sp_s = 0, sp_l = 0, sp_r = 0;
  double w_s = 0, w_l_sum = 0, w_r = 0;

  for (const CycleRecord& c : records) {
    r.out_events += c.out_event;
    r.stopped = r.stopped || c.stopped;
    speed_sum += c.speed;
    r.max_speed = std::max(r.max_speed, c.speed);
    tr_sum += c.t_r;
    r.t_r_min = std::min(r.t_r_min, c.t_r);
    r.t_r_max = std::max(r.t_r_max, c.t_r);
    int wi = w_grid_index(c.w_l);
    switch (c.segment) {
      case sim::SegmentKind::Straight:
        ++r.straight.cycles;
        r.straight.out_events += c.out_event;
        sp_s += c.speed;
        w_s += c.w_l;
        ++modal_s[wi];
        break;
      case sim::SegmentKind::LeftArc:
        ++r.left_curve.cycles;
        r.left_curve.out_events += c.out_event;
        sp_l += c.speed;
        w_l_sum += c.w_l;
        ++modal_l[wi];
        ++modal_curve[wi];
        break;
      case sim::SegmentKind::RightArc:
        ++r.right_curve.cycles;
        r.right_curve.out_events += c.out_event;
        sp_r += c.speed;
        w_r += c.w_l;
        ++modal_r[wi];
        ++modal_curve[wi];
        break;
    }
  }
  r.mean_speed = speed_sum / r.cycles;
  r.t_r_mean = tr_sum / r.cycles;
  r.sim_time = records.back().tick_t + records.back().t_r;
  finish_stats(r.straight, modal_s, sp_s, w_s);
  finish_stats(r.left_curve, modal_l, sp_l, w_l_sum);
  finish_stats(r.right_curve, modal_r, sp_r, w_r);
  r.modal_w_straight = r.straight.modal_w_l;
  int best = -1, best_count = -1;
  for (const auto& [idx, count] : modal_curve) {
    if (count > best_count) {
      best = idx;
      best_count = count;
    }
  }
  r.modal_w_curve = best >= 0 ? best / 20.0 : 1.0;
  return r;
}

std::string report_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["strategy"] = r.strategy;
  j["seed"] = r.seed;
  j["laps"] = r.laps;
  j["cycles"] = r.cycles;
  j["out_events"] = r.out_events;
  j["faults"] = r.faults;
  j["stopped"] = r.stopped;
  j["sim_time_s"] = r.sim_time;
  j["mean_speed_mps"] = r.mean_speed;
  j["max_speed_mps"] = r.max_speed;
  j["t_r_mean_s"] = r.t_r_mean;
  j["t_r_min_s"] = r.t_r_min;
  j["t_r_max_s"] = r.t_r_max;
  auto seg = [](const SegmentStats& s) {
    nlohmann::json o;
    o["cycles"] = s.cycles;
    o["out_events"] = s.out_events;
    o["mean_speed_mps"] = s.mean_speed;
    o["mean_w_l"] = s.mean_w_l;
    o["modal_w_l"] = s.modal_w_l;
    return o;
  };
  j["straight"] = seg(r.straight);
  j["left_curve"] = seg(r.left_curve);
  j["right_curve"] = seg(r.right_curve);
  j["modal_w_straight"] = r.modal_w_straight;
  j["modal_w_curve"] = r.modal_w_curve;
  return j.dump(2) + "\n";
}

void write_cycle_csv(std::ostream& os,
                     const std::vector<CycleRecord>& records) {
  os << "cycle,label,tick_t,t_r,theta_l,theta_c,theta_applied,w_l,v_set,"
        "segment,segment_estimate,speed,lateral_offset,label_retries,fault,"
        "out_event,stopped,offloaded\n";
  for (const CycleRecord& c : records) {
    os << util::strfmt(
        "%d,%llu,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%s,%s,%.9f,%.9f,%d,%d,%d,"
        "%d,%d\n",
        c.cycle, static_cast<unsigned long long>(c.label), c.tick_t, c.t_r,
        c.theta_l, c.theta_c, c.theta_applied, c.w_l, c.v_set,
        sim::segment_kind_name(c.segment), ctrl::cv_label_name(c.segment_estimate),
        c.speed, c.lateral_offset, c.label_retries, static_cast<int>(c.fault),
        static_cast<int>(c.out_event), static_cast<int>(c.stopped),
        static_cast<int>(c.offloaded));
  }
}

}  // namespace blendsim::mw
