#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "blendsim/bn/confidence.hpp"
#include "blendsim/sim/track.hpp"

using namespace blendsim;
using namespace blendsim::bn;
using doctest::Approx;

namespace {

// Independent transcription of both published tables, yes AND no rows, used
// as the oracle the implementation must match.
constexpr double kSafeYes[3][3][3] = {
    {{1.0, 0.8, 0.8}, {0.9, 0.6, 0.6}, {0.2, 0.1, 0.1}},
    {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}},
    {{0.9, 0.9, 0.9}, {0.8, 0.7, 0.7}, {0.5, 0.2, 0.2}},
};
constexpr double kSafeNo[3][3][3] = {
    {{0.0, 0.2, 0.2}, {0.1, 0.4, 0.4}, {0.8, 0.9, 0.9}},
    {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}},
    {{0.1, 0.1, 0.1}, {0.2, 0.3, 0.3}, {0.5, 0.8, 0.8}},
};
constexpr double kTrackYes[2][3][3] = {
    {{0.6, 0.2, 0.0}, {0.7, 0.5, 0.0}, {1.0, 0.9, 0.0}},
    {{0.2, 0.1, 0.0}, {0.3, 0.2, 0.0}, {0.5, 0.4, 0.0}},
};
constexpr double kTrackNo[2][3][3] = {
    {{0.4, 0.8, 1.0}, {0.3, 0.5, 1.0}, {0.0, 0.1, 1.0}},
    {{0.8, 0.9, 1.0}, {0.7, 0.8, 1.0}, {0.5, 0.6, 1.0}},
};

struct JointRow {
  int pos, vel, steer, cmd, safe, track;
  double prob;
};

// Materialize every joint configuration with its probability.
std::vector<JointRow> joint_table(const RootPriors& priors) {
  std::vector<JointRow> rows;
  for (int p = 0; p < 3; ++p)
    for (int v = 0; v < 3; ++v)
      for (int s = 0; s < 3; ++s)
        for (int c = 0; c < 3; ++c)
          for (int safe = 0; safe < 2; ++safe)
            for (int track = 0; track < 2; ++track) {
              double pr = priors.position[p] * priors.velocity[v] *
                          priors.steering[s] * priors.cmd_steering[c];
              pr *= safe == 0 ? kSafeYes[p][v][s] : kSafeNo[p][v][s];
              pr *= track == 0 ? kTrackYes[safe][c][v] : kTrackNo[safe][c][v];
              rows.push_back({p, v, s, c, safe, track, pr});
            }
  return rows;
}

struct BrutePosteriors {
  double safe_yes, track_yes;
};

BrutePosteriors brute_infer(const std::vector<JointRow>& joint,
                            const Evidence& e) {
  double total = 0.0, safe = 0.0, track = 0.0;
  for (const JointRow& r : joint) {
    if (e.position && static_cast<int>(*e.position) != r.pos) continue;
    if (e.velocity && static_cast<int>(*e.velocity) != r.vel) continue;
    if (e.steering && static_cast<int>(*e.steering) != r.steer) continue;
    if (e.cmd_steering && static_cast<int>(*e.cmd_steering) != r.cmd) continue;
    total += r.prob;
    if (r.safe == 0) safe += r.prob;
    if (r.track == 0) track += r.prob;
  }
  REQUIRE(total > 0.0);
  return {safe / total, track / total};
}

// All 256 evidence patterns: each root unset or set to one of its 3 states.
std::vector<Evidence> all_evidence_patterns() {
  std::vector<Evidence> out;
  for (int p = -1; p < 3; ++p)
    for (int v = -1; v < 3; ++v)
      for (int s = -1; s < 3; ++s)
        for (int c = -1; c < 3; ++c) {
          Evidence e;
          if (p >= 0) e.position = static_cast<Position>(p);
          if (v >= 0) e.velocity = static_cast<Velocity>(v);
          if (s >= 0) e.steering = static_cast<Steering>(s);
          if (c >= 0) e.cmd_steering = static_cast<CmdSteering>(c);
          out.push_back(e);
        }
  return out;
}

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

}  // namespace

TEST_CASE("table columns are complementary and match the implementation") {
  for (int p = 0; p < 3; ++p)
    for (int v = 0; v < 3; ++v)
      for (int s = 0; s < 3; ++s) {
        CHECK(kSafeYes[p][v][s] + kSafeNo[p][v][s] == Approx(1.0).epsilon(1e-9));
        CHECK(ConfidenceNet::cpt_safe_turn_yes(static_cast<Position>(p),
                                               static_cast<Velocity>(v),
                                               static_cast<Steering>(s)) ==
              kSafeYes[p][v][s]);
      }
  for (int safe = 0; safe < 2; ++safe)
    for (int c = 0; c < 3; ++c)
      for (int v = 0; v < 3; ++v) {
        CHECK(kTrackYes[safe][c][v] + kTrackNo[safe][c][v] ==
              Approx(1.0).epsilon(1e-9));
        CHECK(ConfidenceNet::cpt_in_track_yes(safe == 0,
                                              static_cast<CmdSteering>(c),
                                              static_cast<Velocity>(v)) ==
              kTrackYes[safe][c][v]);
      }
}

TEST_CASE("published spot values hold") {
  CHECK(ConfidenceNet::cpt_safe_turn_yes(Position::Far, Velocity::Medium,
                                         Steering::Straight) == 0.8);
  // on a turn entry the region is certain for every velocity and steering
  for (int v = 0; v < 3; ++v)
    for (int s = 0; s < 3; ++s)
      CHECK(ConfidenceNet::cpt_safe_turn_yes(Position::On,
                                             static_cast<Velocity>(v),
                                             static_cast<Steering>(s)) == 1.0);
  // fast never stays on track, whatever the other parents say
  for (int safe = 0; safe < 2; ++safe)
    for (int c = 0; c < 3; ++c)
      CHECK(ConfidenceNet::cpt_in_track_yes(safe == 0,
                                            static_cast<CmdSteering>(c),
                                            Velocity::Fast) == 0.0);
}

TEST_CASE("full root evidence reproduces the hand-computed posteriors") {
  ConfidenceNet net;
  Evidence e;
  e.position = Position::Far;
  e.velocity = Velocity::Medium;
  e.steering = Steering::Straight;
  QueryResult r = net.infer(e);
  CHECK(r.safe_turn.yes == Approx(0.80).epsilon(1e-12));

  e.cmd_steering = CmdSteering::Right;
  r = net.infer(e);
  // 0.8 * 0.9 through the safe region plus 0.2 * 0.4 outside it
  CHECK(r.in_track.yes == Approx(0.80).epsilon(1e-12));
}

TEST_CASE("fast velocity forces the on-track posterior to zero") {
  ConfidenceNet net;
  for (int p = -1; p < 3; ++p)
    for (int s = -1; s < 3; ++s)
      for (int c = -1; c < 3; ++c) {
        Evidence e;
        e.velocity = Velocity::Fast;
        if (p >= 0) e.position = static_cast<Position>(p);
        if (s >= 0) e.steering = static_cast<Steering>(s);
        if (c >= 0) e.cmd_steering = static_cast<CmdSteering>(c);
        QueryResult r = net.infer(e);
        CHECK(r.in_track.yes == 0.0);
        CHECK(r.in_track.no == 1.0);
      }
}

TEST_CASE("inference matches the joint-table oracle on every evidence pattern") {
  RootPriors priors;  // defaults
  ConfidenceNet net(priors);
  std::vector<JointRow> joint = joint_table(priors);
  REQUIRE(joint.size() == 324);

  for (const Evidence& e : all_evidence_patterns()) {
    BrutePosteriors want = brute_infer(joint, e);
    QueryResult got = net.infer(e);
    CHECK(got.safe_turn.yes == Approx(want.safe_yes).epsilon(1e-12));
    CHECK(got.in_track.yes == Approx(want.track_yes).epsilon(1e-12));
    CHECK(got.safe_turn.yes + got.safe_turn.no == Approx(1.0).epsilon(1e-12));
    CHECK(got.in_track.yes + got.in_track.no == Approx(1.0).epsilon(1e-12));
  }

  // a skewed prior must flow through identically
  RootPriors skew;
  skew.position = {0.5, 0.2, 0.3};
  skew.velocity = {0.1, 0.3, 0.6};
  skew.steering = {0.2, 0.5, 0.3};
  skew.cmd_steering = {0.4, 0.4, 0.2};
  ConfidenceNet net2(skew);
  std::vector<JointRow> joint2 = joint_table(skew);
  for (const Evidence& e : all_evidence_patterns()) {
    BrutePosteriors want = brute_infer(joint2, e);
    QueryResult got = net2.infer(e);
    CHECK(got.safe_turn.yes == Approx(want.safe_yes).epsilon(1e-12));
    CHECK(got.in_track.yes == Approx(want.track_yes).epsilon(1e-12));
  }
}

TEST_CASE("slowing down never hurts the on-track posterior") {
  ConfidenceNet net;
  for (int p = -1; p < 3; ++p)
    for (int s = -1; s < 3; ++s)
      for (int c = -1; c < 3; ++c) {
        Evidence e;
        if (p >= 0) e.position = static_cast<Position>(p);
        if (s >= 0) e.steering = static_cast<Steering>(s);
        if (c >= 0) e.cmd_steering = static_cast<CmdSteering>(c);
        e.velocity = Velocity::Fast;
        double fast = net.infer(e).in_track.yes;
        e.velocity = Velocity::Medium;
        double medium = net.infer(e).in_track.yes;
        e.velocity = Velocity::Slow;
        double slow = net.infer(e).in_track.yes;
        CHECK(fast == 0.0);
        CHECK(medium >= fast);
        CHECK(slow >= medium);
      }
}

TEST_CASE("default priors land the unconditioned posteriors at the operating point") {
  ConfidenceNet net;
  QueryResult r = net.infer(Evidence{});
  CHECK(r.in_track.yes == Approx(0.69787).epsilon(1e-9));
  CHECK(r.safe_turn.yes == Approx(0.8533333333333333).epsilon(1e-9));
}

TEST_CASE("bad priors and impossible evidence are rejected") {
  RootPriors bad;
  bad.position = {0.5, 0.5, 0.1};  // sums to 1.1
  CHECK_THROWS_AS(ConfidenceNet{bad}, std::invalid_argument);
  bad = RootPriors{};
  bad.velocity = {-0.1, 1.0, 0.1};
  CHECK_THROWS_AS(ConfidenceNet{bad}, std::invalid_argument);

  RootPriors zero;
  zero.velocity = {0.5, 0.5, 0.0};
  ConfidenceNet net(zero);
  Evidence e;
  e.velocity = Velocity::Fast;
  CHECK_THROWS_AS(net.infer(e), std::domain_error);
}

TEST_CASE("state names parse case-insensitively and round-trip") {
  CHECK(parse_position("far") == Position::Far);
  CHECK(parse_position("NEAR") == Position::Near);
  CHECK(parse_velocity("Medium") == Velocity::Medium);
  CHECK(parse_steering("straight") == Steering::Straight);
  CHECK(parse_cmd_steering("Right") == CmdSteering::Right);
  CHECK_FALSE(parse_position("center").has_value());
  CHECK_FALSE(parse_velocity("").has_value());
  for (Velocity v : {Velocity::Slow, Velocity::Medium, Velocity::Fast}) {
    CHECK(parse_velocity(name_of(v)) == v);
  }
}

TEST_CASE("vehicle state maps onto the node domains at the stated thresholds") {
  CHECK(velocity_state(0.10) == Velocity::Slow);
  CHECK(velocity_state(0.24999) == Velocity::Slow);
  CHECK(velocity_state(0.25) == Velocity::Medium);
  CHECK(velocity_state(0.60) == Velocity::Medium);
  CHECK(velocity_state(0.601) == Velocity::Fast);

  CHECK(steering_state(-11.0) == Steering::Left);
  CHECK(steering_state(-10.0) == Steering::Straight);
  CHECK(steering_state(0.0) == Steering::Straight);
  CHECK(steering_state(10.0) == Steering::Straight);
  CHECK(steering_state(10.5) == Steering::Right);

  sim::Track track = oval_right();
  CHECK(position_state(track, 0.5) == Position::Far);   // 2.5 m to the curve
  CHECK(position_state(track, 2.7) == Position::Near);  // 0.3 m out
  CHECK(position_state(track, 2.5) == Position::Near);  // exactly at the band
  CHECK(position_state(track, 3.1) == Position::On);    // inside the curve

  sim::TrackSpec open;
  open.closed = false;
  open.segments = {{sim::SegmentKind::Straight, 3.0, 0.0, 0.0}};
  sim::Track line = sim::Track::build(open);
  CHECK(position_state(line, 1.0) == Position::Far);  // no curve ahead
}
