#include "blendsim/rl/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "blendsim/sim/calibration.hpp"

namespace blendsim::rl {

double w_of(int w_idx) { return 0.05 * w_idx; }

double speed_duty_of(int v_idx) { return 15.58 + 0.001 * v_idx; }

int theta_l_bucket(double steer_duty) {
  // round half toward the neutral duty so e.g. 17.5 -> 17 but 12.5 -> 13
  double b = steer_duty >= sim::Calibration::kSteerCenter
                 ? std::ceil(steer_duty - 0.5)
                 : std::floor(steer_duty + 0.5);
  b = std::clamp(b, sim::Calibration::kSteerMin, sim::Calibration::kSteerMax);
  return static_cast<int>(b) - 10;
}

int theta_c_bucket(double steer_duty) {
  if (steer_duty < 12.5) return 0;
  if (steer_duty > 17.5) return 2;
  return 1;
}

int action_index(const RlAction& a) { return (a.dwi + 1) * 3 + (a.dvi + 1); }

RlAction action_from_index(int idx) {
  if (idx < 0 || idx >= kActionCount) throw std::out_of_range("action index");
  return {idx / 3 - 1, idx % 3 - 1};
}

namespace {

void check_state(const RlState& s) {
  if (s.w_idx < 0 || s.w_idx >= kWCount || s.v_idx < 0 || s.v_idx >= kVCount ||
      s.theta_l < 0 || s.theta_l >= kThetaLCount || s.theta_c < 0 ||
      s.theta_c >= kThetaCCount) {
    throw std::out_of_range("rl state off the grid");
  }
}

}  // namespace

RlState transition(const RlState& s, const RlAction& a) {
  check_state(s);
  RlState n = s;
  n.w_idx += a.dwi;
  n.v_idx += a.dvi;
  if (n.w_idx < 0 || n.w_idx >= kWCount || n.v_idx < 0 || n.v_idx >= kVCount) {
    throw std::out_of_range("action exits the weight/speed grid");
  }
  return n;
}

std::vector<RlAction> enumerate_actions(const RlState& s) {
  check_state(s);
  std::vector<RlAction> out;
  out.reserve(kActionCount);
  for (int idx = 0; idx < kActionCount; ++idx) {
    RlAction a = action_from_index(idx);
    int w = s.w_idx + a.dwi;
    int v = s.v_idx + a.dvi;
    if (w >= 0 && w < kWCount && v >= 0 && v < kVCount) out.push_back(a);
  }
  return out;
}

double reward(double v_mps, sim::Deviation dev) {
  double t_hat = 0.0;
  switch (dev) {
    case sim::Deviation::Center: t_hat = 0.0; break;
    case sim::Deviation::OffCenter: t_hat = 0.5; break;
    case sim::Deviation::Out: t_hat = 10.0; break;
  }
  return v_mps * (1.0 - t_hat);
}

QTable::QTable()
    : q_(static_cast<size_t>(kStateCount) * kActionCount, 0.0),
      visits_(static_cast<size_t>(kStateCount) * kActionCount, 0) {
  static_assert(kStateCount == 28413, "state grid is 21 x 41 x 11 x 3");
}

int QTable::state_index(const RlState& s) {
  check_state(s);
  return ((s.w_idx * kVCount + s.v_idx) * kThetaLCount + s.theta_l) * kThetaCCount +
         s.theta_c;
}

double QTable::q(const RlState& s, const RlAction& a) const {
  return q_[static_cast<size_t>(state_index(s)) * kActionCount + action_index(a)];
}

double& QTable::q(const RlState& s, const RlAction& a) {
  return q_[static_cast<size_t>(state_index(s)) * kActionCount + action_index(a)];
}

std::uint32_t QTable::visits(const RlState& s, const RlAction& a) const {
  return visits_[static_cast<size_t>(state_index(s)) * kActionCount + action_index(a)];
}

void QTable::count_visit(const RlState& s, const RlAction& a) {
  ++visits_[static_cast<size_t>(state_index(s)) * kActionCount + action_index(a)];
}

double QTable::max_q(const RlState& s) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const RlAction& a : enumerate_actions(s)) best = std::max(best, q(s, a));
  return best;
}

void QTable::restore(std::vector<double> values,
                     std::vector<std::uint32_t> visit_counts) {
  if (values.size() != q_.size() || visit_counts.size() != visits_.size()) {
    throw std::invalid_argument("qtable restore size mismatch");
  }
  q_ = std::move(values);
  visits_ = std::move(visit_counts);
}

double q_update(QTable& table, const RlState& s, const RlAction& a, double r,
                const RlState& s_next, double alpha, double gamma) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("alpha and gamma must lie in [0, 1]");
  }
  double target = r + gamma * table.max_q(s_next);
  double& cell = table.q(s, a);
  cell += alpha * (target - cell);
  return cell;
}

namespace {

int move_size(const RlAction& a) { return std::abs(a.dwi) + std::abs(a.dvi); }

}  // namespace

RlAction exploit_action(const QTable& table, const RlState& s) {
  // Ties prefer the smallest grid move, so a state without learned values
  // holds position instead of drifting toward an arbitrary corner.
  bool found = false;
  RlAction best{};
  double best_q = 0.0;
  for (const RlAction& a : enumerate_actions(s)) {
    double v = table.q(s, a);
    if (!found || v > best_q ||
        (v == best_q && move_size(a) < move_size(best))) {
      found = true;
      best_q = v;
      best = a;
    }
  }
  return best;
}

RlAction select_action(const QTable& table, const RlState& s, double epsilon,
                       util::Rng& rng) {
  std::vector<RlAction> valid = enumerate_actions(s);
  if (rng.bernoulli(epsilon)) {
    return valid[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int>(valid.size()) - 1))];
  }
  // Greedy with uniformly random tie-breaking: fresh states explore instead
  // of replaying the first action that ever got a positive update.
  double best_q = -std::numeric_limits<double>::infinity();
  for (const RlAction& a : valid) best_q = std::max(best_q, table.q(s, a));
  std::vector<RlAction> top;
  for (const RlAction& a : valid) {
    if (table.q(s, a) == best_q) top.push_back(a);
  }
  return top[static_cast<size_t>(
      rng.uniform_int(0, static_cast<int>(top.size()) - 1))];
}

namespace {

constexpr char kMagic[4] = {'Q', 'T', 'B', '1'};

}  // namespace

void save_qtable(const QTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open qtable file for writing: " + path);
  f.write(kMagic, sizeof(kMagic));
  std::uint32_t dims[5] = {kWCount, kVCount, kThetaLCount, kThetaCCount, kActionCount};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  f.write(reinterpret_cast<const char*>(table.values().data()),
          static_cast<std::streamsize>(table.values().size() * sizeof(double)));
  f.write(reinterpret_cast<const char*>(table.visit_counts().data()),
          static_cast<std::streamsize>(table.visit_counts().size() * sizeof(std::uint32_t)));
  if (!f) throw std::runtime_error("short write while saving qtable: " + path);
}

QTable load_qtable(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open qtable file: " + path);

  char magic[4];
  std::uint32_t dims[5];
  f.read(magic, sizeof(magic));
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("qtable file has a bad or missing header: " + path);
  }
  if (dims[0] != kWCount || dims[1] != kVCount || dims[2] != kThetaLCount ||
      dims[3] != kThetaCCount || dims[4] != kActionCount) {
    throw std::runtime_error("qtable grid dimensions do not match: " + path);
  }

  QTable table;
  std::vector<double> q(static_cast<size_t>(kStateCount) * kActionCount);
  std::vector<std::uint32_t> visits(q.size());
  f.read(reinterpret_cast<char*>(q.data()),
         static_cast<std::streamsize>(q.size() * sizeof(double)));
  f.read(reinterpret_cast<char*>(visits.data()),
         static_cast<std::streamsize>(visits.size() * sizeof(std::uint32_t)));
  if (!f || f.gcount() != static_cast<std::streamsize>(visits.size() * sizeof(std::uint32_t))) {
    throw std::runtime_error("qtable file is truncated: " + path);
  }
  f.peek();
  if (!f.eof()) throw std::runtime_error("qtable file has trailing data: " + path);

  table.restore(std::move(q), std::move(visits));
  return table;
}

}  // namespace blendsim::rl
