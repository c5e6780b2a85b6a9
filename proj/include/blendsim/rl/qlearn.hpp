#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blendsim/sim/deviation.hpp"
#include "blendsim/util/rng.hpp"

namespace blendsim::rl {

// Discretized learning state: ensemble weight, speed duty, and the two
// steering commands from the previous cycle, bucketed.
struct RlState {
  int w_idx = 10;   // W_L = 0.05 * w_idx, 0..20
  int v_idx = 10;   // speed duty = 15.58 + 0.001 * v_idx, 0..40
  int theta_l = 5;  // learned steer bucket: duty 10..20 step 1, stored as 0..10
  int theta_c = 1;  // lane-view steer bucket: duty {10, 15, 20} as 0..2

  bool operator==(const RlState&) const = default;
};

inline constexpr int kWCount = 21;
inline constexpr int kVCount = 41;
inline constexpr int kThetaLCount = 11;
inline constexpr int kThetaCCount = 3;
inline constexpr int kStateCount = kWCount * kVCount * kThetaLCount * kThetaCCount;
inline constexpr int kActionCount = 9;

double w_of(int w_idx);
double speed_duty_of(int v_idx);

// Nearest-integer duty bucket; a half-way value rounds toward the 15 center.
int theta_l_bucket(double steer_duty);
// Lane-view commands are hard {10, 15, 20}; nearest of the three.
int theta_c_bucket(double steer_duty);

// One grid move per axis: dwi/dvi in {-1, 0, +1} meaning {-0.05, 0, +0.05}
// on the weight and {-0.001, 0, +0.001} on the speed duty.
struct RlAction {
  int dwi = 0;
  int dvi = 0;

  bool operator==(const RlAction&) const = default;
};

int action_index(const RlAction& a);
RlAction action_from_index(int idx);

// Applies the grid move; the steering buckets are environment observations
// and pass through unchanged. Throws std::out_of_range when the move exits
// the grid.
RlState transition(const RlState& s, const RlAction& a);

// The subset of the 9 actions that stay on the grid, in action-index order.
std::vector<RlAction> enumerate_actions(const RlState& s);

// r = v * (1 - t_hat), t_hat in {0, 1/2, 10} by deviation class.
double reward(double v_mps, sim::Deviation dev);

class QTable {
 public:
  QTable();

  static int state_index(const RlState& s);

  double q(const RlState& s, const RlAction& a) const;
  double& q(const RlState& s, const RlAction& a);
  std::uint32_t visits(const RlState& s, const RlAction& a) const;
  void count_visit(const RlState& s, const RlAction& a);

  // highest Q among the valid actions of s; 0 for a fresh table
  double max_q(const RlState& s) const;

  const std::vector<double>& values() const { return q_; }
  const std::vector<std::uint32_t>& visit_counts() const { return visits_; }

  // wholesale state swap for persistence; sizes must match the grid
  void restore(std::vector<double> values, std::vector<std::uint32_t> visit_counts);

  bool operator==(const QTable&) const = default;

 private:
  std::vector<double> q_;
  std::vector<std::uint32_t> visits_;
};

// Bellman update toward r + gamma * max_a' Q(s', a'); returns the new value.
double q_update(QTable& table, const RlState& s, const RlAction& a, double r,
                const RlState& s_next, double alpha, double gamma);

// Argmax over the valid actions, ties broken by lowest action index.
RlAction exploit_action(const QTable& table, const RlState& s);

// Epsilon-greedy: with probability epsilon a uniform valid action, otherwise
// the exploit choice.
RlAction select_action(const QTable& table, const RlState& s, double epsilon,
                       util::Rng& rng);

// Versioned binary snapshot: magic, grid dimensions, values, visit counts.
void save_qtable(const QTable& table, const std::string& path);
QTable load_qtable(const std::string& path);

}  // namespace blendsim::rl
