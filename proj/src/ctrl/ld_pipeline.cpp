#include "blendsim/ctrl/ld_pipeline.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace blendsim::ctrl {

namespace {

constexpr int kW = sim::Raster::kWidth;
constexpr int kH = sim::Raster::kHeight;

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// 3x3 Gaussian ([1 2 1] x [1 2 1] / 16) with replicated borders.
std::vector<int> blur(const sim::Raster& img) {
  std::vector<int> out(static_cast<size_t>(kW) * kH);
  for (int r = 0; r < kH; ++r) {
    for (int c = 0; c < kW; ++c) {
      int acc = 0;
      static const int k[3] = {1, 2, 1};
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          int rr = clampi(r + dr, 0, kH - 1);
          int cc = clampi(c + dc, 0, kW - 1);
          acc += k[dr + 1] * k[dc + 1] * img.at(rr, cc);
        }
      }
      out[static_cast<size_t>(r) * kW + c] = acc / 16;
    }
  }
  return out;
}

int max_roi_votes(const std::vector<std::uint8_t>& edge, int col0, int width,
                  const LdParams& p) {
  // Each row contributes one vote per edge run (consecutive edge pixels with
  // at most a one-pixel hole), cast at the run's center column, so a vote
  // count reads directly as rows of line support. Runs are matched against
  // the line model x = x0 + y*tan(angle) with one accumulator per
  // (angle, x0 bin); the score is the best two-bin corridor, which keeps a
  // straight line whole across the 10-degree angle quantization.
  // Runs are scanned a few columns past the band so a line straddling the
  // band edge is judged by its true center, not by the sliver inside.
  const int pad = 3;
  int lo = std::max(0, col0 - pad);
  int hi = std::min(kW, col0 + width + pad);
  std::vector<std::pair<int, double>> run_centers;  // (row, center col)
  for (int r = 0; r < kH; ++r) {
    int start = -1, last = -1;
    for (int c = lo; c <= hi; ++c) {
      bool on = c < hi && edge[static_cast<size_t>(r) * kW + c];
      if (on) {
        if (start < 0) start = c;
        last = c;
      } else if (start >= 0 && (c - last > 1 || c == hi)) {
        double center = 0.5 * (start + last);
        if (center >= col0 && center < col0 + width) run_centers.emplace_back(r, center);
        start = -1;
      }
    }
  }

  double max_tan = 0.0;
  for (double a : p.angles_deg) max_tan = std::max(max_tan, std::abs(std::tan(a * M_PI / 180.0)));
  int margin = static_cast<int>(std::ceil(kH * max_tan)) + 1;
  int bins = (width + 2 * margin) / p.offset_bin_px + 2;

  int best = 0;
  for (size_t ai = 0; ai < p.angles_deg.size(); ++ai) {
    double ta = std::tan(p.angles_deg[ai] * M_PI / 180.0);
    std::vector<int> acc(static_cast<size_t>(bins), 0);
    for (const auto& [r, center] : run_centers) {
      double x0 = (center - col0) - r * ta;
      int bin = static_cast<int>((x0 + margin) / p.offset_bin_px);
      if (bin >= 0 && bin < bins) ++acc[static_cast<size_t>(bin)];
    }
    for (int b = 0; b + 1 < bins; ++b) {
      best = std::max(best, acc[static_cast<size_t>(b)] + acc[static_cast<size_t>(b) + 1]);
    }
  }
  return best;
}

}  // namespace

sim::LaneView ld_pipeline_votes(const sim::Raster& img, const LdParams& p, LdVotes& votes) {
  if (static_cast<int>(img.px.size()) != kW * kH) {
    throw std::invalid_argument("ld_pipeline: raster must be 200x66");
  }

  std::vector<int> smooth = blur(img);

  // keep only bright-line intensities
  for (auto& v : smooth) {
    if (v < p.mask_lo || v > p.mask_hi) v = 0;
  }

  // central-difference gradient magnitude
  std::vector<double> mag(static_cast<size_t>(kW) * kH, 0.0);
  for (int r = 1; r < kH - 1; ++r) {
    for (int c = 1; c < kW - 1; ++c) {
      double gx = 0.5 * (smooth[static_cast<size_t>(r) * kW + c + 1] -
                         smooth[static_cast<size_t>(r) * kW + c - 1]);
      double gy = 0.5 * (smooth[static_cast<size_t>(r + 1) * kW + c] -
                         smooth[static_cast<size_t>(r - 1) * kW + c]);
      mag[static_cast<size_t>(r) * kW + c] = std::hypot(gx, gy);
    }
  }

  // double threshold + hysteresis: weak edges survive only when 8-connected
  // to a strong edge
  std::vector<std::uint8_t> edge(static_cast<size_t>(kW) * kH, 0);
  std::deque<int> frontier;
  for (int i = 0; i < kW * kH; ++i) {
    if (mag[static_cast<size_t>(i)] >= p.grad_hi) {
      edge[static_cast<size_t>(i)] = 1;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    int i = frontier.front();
    frontier.pop_front();
    int r = i / kW, c = i % kW;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= kH || cc < 0 || cc >= kW) continue;
        int j = rr * kW + cc;
        if (!edge[static_cast<size_t>(j)] && mag[static_cast<size_t>(j)] >= p.grad_lo) {
          edge[static_cast<size_t>(j)] = 1;
          frontier.push_back(j);
        }
      }
    }
  }

  votes.left = max_roi_votes(edge, p.roi_left_col, p.roi_width, p);
  votes.right = max_roi_votes(edge, p.roi_right_col, p.roi_width, p);

  sim::LaneView v;
  v.left = votes.left >= p.vote_threshold;
  v.right = votes.right >= p.vote_threshold;
  return v;
}

sim::LaneView ld_pipeline(const sim::Raster& img, const LdParams& p) {
  LdVotes votes;
  return ld_pipeline_votes(img, p, votes);
}

}  // namespace blendsim::ctrl
