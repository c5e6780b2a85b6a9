#include "blendsim/res/fog.hpp"

#include <algorithm>
#include <stdexcept>

namespace blendsim::res {

void FogSelector::add_device(const FogDevice& d) {
  if (!(d.base_latency > 0.0)) {
    throw std::invalid_argument("device latency must be > 0");
  }
  if (d.jitter_sd < 0.0) throw std::invalid_argument("jitter must be >= 0");
  devices_.push_back(d);
  history_.emplace_back();
}

void FogSelector::ping_all(double t, util::Rng& rng) {
  for (int i = 0; i < count(); ++i) {
    double latency = devices_[i].base_latency +
                     rng.gaussian(0.0, devices_[i].jitter_sd);
    record_ping(i, t, std::max(1e-6, latency));
  }
}

void FogSelector::record_ping(int device, double t, double latency) {
  history_.at(device).push_back({t, latency});
}

double FogSelector::mean_latest3(int device) const {
  const auto& h = history_.at(device);
  if (h.empty()) throw std::logic_error("device has no pings yet");
  size_t n = std::min<size_t>(3, h.size());
  double sum = 0.0;
  for (size_t i = h.size() - n; i < h.size(); ++i) sum += h[i].latency;
  return sum / static_cast<double>(n);
}

int FogSelector::select() const {
  if (devices_.empty()) throw std::logic_error("no fog devices registered");
  int best = 0;
  double best_mean = mean_latest3(0);
  for (int i = 1; i < count(); ++i) {
    double m = mean_latest3(i);
    if (m < best_mean) {  // strict: equal means keep the earlier device
      best = i;
      best_mean = m;
    }
  }
  return best;
}

}  // namespace blendsim::res
