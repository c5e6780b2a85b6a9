#pragma once

#include <vector>

#include "blendsim/sim/sensors.hpp"

namespace blendsim::ctrl {

// Raster lane-detection parameters. The two 30-column ROIs flank the image
// center and map exactly onto the geometric visibility window (16 mm/px).
struct LdParams {
  int mask_lo = 215;
  int mask_hi = 255;
  double grad_hi = 60.0;  // strong edge threshold on gradient magnitude
  double grad_lo = 25.0;  // weak edges kept when connected to a strong one
  int roi_left_col = 65;
  int roi_right_col = 105;
  int roi_width = 30;
  std::vector<double> angles_deg = {-30, -20, -10, 0, 10, 20, 30};
  int offset_bin_px = 4;
  int vote_threshold = 15;
};

struct LdVotes {
  int left = 0;
  int right = 0;
};

// Blur -> intensity mask -> gradient edges with double threshold and
// hysteresis -> per-ROI discrete line vote. A lane is declared visible when
// its ROI's best (angle, offset) bin collects at least vote_threshold votes.
// Throws std::invalid_argument unless the raster is exactly 200x66.
sim::LaneView ld_pipeline(const sim::Raster& img, const LdParams& p);

// Same computation, exposing the winning vote counts (benchmark diagnostics).
sim::LaneView ld_pipeline_votes(const sim::Raster& img, const LdParams& p, LdVotes& votes);

}  // namespace blendsim::ctrl
