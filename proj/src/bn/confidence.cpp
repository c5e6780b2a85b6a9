#include "blendsim/bn/confidence.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blendsim::bn {

namespace {

// P(SafeTurnRegion = Yes | position, velocity, steering). Steering columns
// run Straight, Left, Right. On a turn entry the region is certain.
constexpr double kSafeTurnYes[3][3][3] = {
    // Near
    {{1.0, 0.8, 0.8},    // Slow
     {0.9, 0.6, 0.6},    // Medium
     {0.2, 0.1, 0.1}},   // Fast
    // On
    {{1.0, 1.0, 1.0},
     {1.0, 1.0, 1.0},
     {1.0, 1.0, 1.0}},
    // Far
    {{0.9, 0.9, 0.9},
     {0.8, 0.7, 0.7},
     {0.5, 0.2, 0.2}},
};

// P(InTrack = Yes | safe-turn, command, velocity). Velocity columns run
// Slow, Medium, Fast; Fast never stays on track.
constexpr double kInTrackYes[2][3][3] = {
    // SafeTurnRegion = Yes
    {{0.6, 0.2, 0.0},    // command Left
     {0.7, 0.5, 0.0},    // command Straight
     {1.0, 0.9, 0.0}},   // command Right
    // SafeTurnRegion = No
    {{0.2, 0.1, 0.0},
     {0.3, 0.2, 0.0},
     {0.5, 0.4, 0.0}},
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

void check_distribution(const std::array<double, 3>& d, const char* node) {
  double sum = 0.0;
  for (double p : d) {
    if (p < 0.0 || p > 1.0) {
      throw std::invalid_argument(std::string(node) +
                                  " prior entries must lie in [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(node) + " priors must sum to 1");
  }
}

}  // namespace

const char* name_of(Position s) {
  switch (s) {
    case Position::Near: return "Near";
    case Position::On: return "On";
    case Position::Far: return "Far";
  }
  return "?";
}

const char* name_of(Velocity s) {
  switch (s) {
    case Velocity::Slow: return "Slow";
    case Velocity::Medium: return "Medium";
    case Velocity::Fast: return "Fast";
  }
  return "?";
}

const char* name_of(Steering s) {
  switch (s) {
    case Steering::Straight: return "Straight";
    case Steering::Left: return "Left";
    case Steering::Right: return "Right";
  }
  return "?";
}

const char* name_of(CmdSteering s) {
  switch (s) {
    case CmdSteering::Left: return "Left";
    case CmdSteering::Straight: return "Straight";
    case CmdSteering::Right: return "Right";
  }
  return "?";
}

std::optional<Position> parse_position(std::string_view name) {
  for (Position s : {Position::Near, Position::On, Position::Far}) {
    if (iequals(name, name_of(s))) return s;
  }
  return std::nullopt;
}

std::optional<Velocity> parse_velocity(std::string_view name) {
  for (Velocity s : {Velocity::Slow, Velocity::Medium, Velocity::Fast}) {
    if (iequals(name, name_of(s))) return s;
  }
  return std::nullopt;
}

std::optional<Steering> parse_steering(std::string_view name) {
  for (Steering s : {Steering::Straight, Steering::Left, Steering::Right}) {
    if (iequals(name, name_of(s))) return s;
  }
  return std::nullopt;
}

std::optional<CmdSteering> parse_cmd_steering(std::string_view name) {
  for (CmdSteering s :
       {CmdSteering::Left, CmdSteering::Straight, CmdSteering::Right}) {
    if (iequals(name, name_of(s))) return s;
  }
  return std::nullopt;
}

void RootPriors::validate() const {
  check_distribution(position, "position");
  check_distribution(velocity, "velocity");
  check_distribution(steering, "steering");
  check_distribution(cmd_steering, "cmd_steering");
}

ConfidenceNet::ConfidenceNet(const RootPriors& priors) : priors_(priors) {
  priors_.validate();
}

double ConfidenceNet::cpt_safe_turn_yes(Position p, Velocity v, Steering s) {
  return kSafeTurnYes[static_cast<int>(p)][static_cast<int>(v)]
                     [static_cast<int>(s)];
}

double ConfidenceNet::cpt_in_track_yes(bool safe_turn_yes, CmdSteering c,
                                       Velocity v) {
  return kInTrackYes[safe_turn_yes ? 0 : 1][static_cast<int>(c)]
                    [static_cast<int>(v)];
}

QueryResult ConfidenceNet::infer(const Evidence& evidence) const {
  double total = 0.0;
  double safe_yes = 0.0;
  double track_yes = 0.0;

  for (int p = 0; p < 3; ++p) {
    if (evidence.position && static_cast<int>(*evidence.position) != p) continue;
    for (int v = 0; v < 3; ++v) {
      if (evidence.velocity && static_cast<int>(*evidence.velocity) != v)
        continue;
      for (int s = 0; s < 3; ++s) {
        if (evidence.steering && static_cast<int>(*evidence.steering) != s)
          continue;
        for (int c = 0; c < 3; ++c) {
          if (evidence.cmd_steering &&
              static_cast<int>(*evidence.cmd_steering) != c)
            continue;
          double root = priors_.position[p] * priors_.velocity[v] *
                        priors_.steering[s] * priors_.cmd_steering[c];
          double p_safe = kSafeTurnYes[p][v][s];
          for (int safe = 0; safe < 2; ++safe) {
            double w_safe = root * (safe == 0 ? p_safe : 1.0 - p_safe);
            double p_track = kInTrackYes[safe][c][v];
            for (int track = 0; track < 2; ++track) {
              double w = w_safe * (track == 0 ? p_track : 1.0 - p_track);
              total += w;
              if (safe == 0) safe_yes += w;
              if (track == 0) track_yes += w;
            }
          }
        }
      }
    }
  }

  if (!(total > 0.0)) {
    throw std::domain_error("evidence has zero prior probability");
  }
  QueryResult r;
  r.safe_turn.yes = safe_yes / total;
  r.safe_turn.no = (total - safe_yes) / total;
  r.in_track.yes = track_yes / total;
  r.in_track.no = (total - track_yes) / total;
  return r;
}

Velocity velocity_state(double speed, const StateThresholds& th) {
  if (speed < th.slow_max) return Velocity::Slow;
  if (speed <= th.fast_min) return Velocity::Medium;
  return Velocity::Fast;
}

Steering steering_state(double steer_deg, const StateThresholds& th) {
  if (steer_deg < -th.steer_band_deg) return Steering::Left;
  if (steer_deg <= th.steer_band_deg) return Steering::Straight;
  return Steering::Right;
}

Position position_state(const sim::Track& track, double arc,
                        const StateThresholds& th) {
  double d = track.distance_to_next_turn(arc);
  if (d == 0.0) return Position::On;
  return d <= th.near_distance ? Position::Near : Position::Far;
}

}  // namespace blendsim::bn
