#pragma once

#include <string>
#include <vector>

#include "blendsim/util/rng.hpp"

namespace blendsim::res {

// A registered edge device. base_latency is its nominal round-trip in
// seconds; pings observe it through Gaussian jitter, the control path uses
// the nominal value.
struct FogDevice {
  std::string id;
  double base_latency = 0.0;
  double jitter_sd = 0.0;
};

struct PingRecord {
  double t = 0.0;
  double latency = 0.0;
};

// Keeps ping histories and picks the device with the lowest mean over its
// latest three pings; ties go to the earliest-registered device.
class FogSelector {
 public:
  void add_device(const FogDevice& d);
  int count() const { return static_cast<int>(devices_.size()); }
  const FogDevice& device(int i) const { return devices_.at(i); }

  void ping_all(double t, util::Rng& rng);
  void record_ping(int device, double t, double latency);

  double mean_latest3(int device) const;
  int select() const;

 private:
  std::vector<FogDevice> devices_;
  std::vector<std::vector<PingRecord>> history_;
};

}  // namespace blendsim::res
