#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "blendsim/sim/track.hpp"

namespace blendsim::bn {

// Discrete states of the four observation nodes. Enumerator order matches
// the conditional-probability tables, so enums index straight into them.
enum class Position { Near, On, Far };
enum class Velocity { Slow, Medium, Fast };
enum class Steering { Straight, Left, Right };
enum class CmdSteering { Left, Straight, Right };

const char* name_of(Position s);
const char* name_of(Velocity s);
const char* name_of(Steering s);
const char* name_of(CmdSteering s);

// Case-insensitive state lookup; empty optional for unknown names.
std::optional<Position> parse_position(std::string_view name);
std::optional<Velocity> parse_velocity(std::string_view name);
std::optional<Steering> parse_steering(std::string_view name);
std::optional<CmdSteering> parse_cmd_steering(std::string_view name);

// Categorical priors over the observation nodes. The defaults follow the
// qualitative guidance the tables came with: positions equally likely,
// velocity mostly medium, steering rarely left, turn commands mostly right.
// Under these defaults the unconditioned chance of staying on track lands
// at 0.6979, near the reported 0.7 operating point.
struct RootPriors {
  std::array<double, 3> position{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::array<double, 3> velocity{0.25, 0.70, 0.05};
  std::array<double, 3> steering{0.60, 0.10, 0.30};
  std::array<double, 3> cmd_steering{0.10, 0.20, 0.70};

  void validate() const;  // entries in [0, 1], each node summing to 1
};

// Partial assignment of the observation nodes.
struct Evidence {
  std::optional<Position> position;
  std::optional<Velocity> velocity;
  std::optional<Steering> steering;
  std::optional<CmdSteering> cmd_steering;
};

struct Posterior {
  double yes = 0.0;
  double no = 0.0;
};

struct QueryResult {
  Posterior safe_turn;
  Posterior in_track;
};

// Two-layer discrete network: four observation roots feed SafeTurnRegion
// (parents: position, velocity, steering), which joins CmdSteering and
// velocity as the parents of InTrack. CPTs are fixed; priors are supplied.
// Immutable after construction, safe for concurrent queries.
class ConfidenceNet {
 public:
  explicit ConfidenceNet(const RootPriors& priors = RootPriors{});

  // Exact inference by enumerating the full joint (at most 324 terms).
  // Throws if the evidence has zero prior mass.
  QueryResult infer(const Evidence& evidence) const;

  const RootPriors& priors() const { return priors_; }

  static double cpt_safe_turn_yes(Position p, Velocity v, Steering s);
  static double cpt_in_track_yes(bool safe_turn_yes, CmdSteering c, Velocity v);

 private:
  RootPriors priors_;
};

// Thresholds mapping continuous vehicle state onto the node domains.
struct StateThresholds {
  double slow_max = 0.25;       // m/s; at or above is Medium
  double fast_min = 0.60;       // m/s; above is Fast
  double steer_band_deg = 10.0; // |angle| inside the band counts as Straight
  double near_distance = 0.5;   // m along the track to the next curve entry
};

Velocity velocity_state(double speed, const StateThresholds& th = {});
// Positive angles steer rightward, matching the plant convention.
Steering steering_state(double steer_deg, const StateThresholds& th = {});
Position position_state(const sim::Track& track, double arc,
                        const StateThresholds& th = {});

}  // namespace blendsim::bn
