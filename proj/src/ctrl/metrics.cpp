#include "blendsim/ctrl/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace blendsim::ctrl {

LdReport ld_accuracy(const std::vector<std::pair<CvLabel, CvLabel>>& pairs) {
  LdReport rep;
  rep.n = static_cast<int>(pairs.size());
  if (rep.n == 0) return rep;

  int hits = 0;
  for (const auto& [pred, truth] : pairs) {
    rep.confusion[static_cast<size_t>(truth)][static_cast<size_t>(pred)] += 1;
    if (pred == truth) ++hits;
  }
  rep.accuracy = static_cast<double>(hits) / rep.n;

  for (int k = 0; k < 4; ++k) {
    int tp = rep.confusion[static_cast<size_t>(k)][static_cast<size_t>(k)];
    int truth_total = 0, pred_total = 0;
    for (int j = 0; j < 4; ++j) {
      truth_total += rep.confusion[static_cast<size_t>(k)][static_cast<size_t>(j)];
      pred_total += rep.confusion[static_cast<size_t>(j)][static_cast<size_t>(k)];
    }
    ClassScore& cs = rep.per_class[static_cast<size_t>(k)];
    cs.support = truth_total;
    cs.precision = pred_total > 0 ? static_cast<double>(tp) / pred_total : 0.0;
    cs.recall = truth_total > 0 ? static_cast<double>(tp) / truth_total : 0.0;
    cs.f1 = (cs.precision + cs.recall) > 0.0
                ? 2.0 * cs.precision * cs.recall / (cs.precision + cs.recall)
                : 0.0;
  }
  return rep;
}

std::vector<sim::VehicleState> make_pose_sweep(const sim::Track& track, int n,
                                               util::Rng& rng) {
  std::vector<sim::VehicleState> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = track.length() * (i + 0.5) / n;
    double e = std::clamp(rng.gaussian(0.0, 0.08), -0.25, 0.25);
    double herr = std::clamp(rng.gaussian(0.0, 8.0 * M_PI / 180.0),
                             -20.0 * M_PI / 180.0, 20.0 * M_PI / 180.0);
    sim::VehicleState st = sim::place_on_track(track, s, e);
    st.pose.heading += herr;
    out.push_back(st);
  }
  return out;
}

}  // namespace blendsim::ctrl
