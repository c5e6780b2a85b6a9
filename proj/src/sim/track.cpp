#include "blendsim/sim/track.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace blendsim::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCloseTol = 1e-6;

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Sweep of `ang` past `from` in the given rotational direction, in [0, 2*pi).
double sweep_from(double from, double ang, bool ccw) {
  double d = ccw ? ang - from : from - ang;
  while (d < 0.0) d += 2.0 * kPi;
  while (d >= 2.0 * kPi) d -= 2.0 * kPi;
  return d;
}

}  // namespace

const char* segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::Straight: return "straight";
    case SegmentKind::LeftArc: return "left";
    case SegmentKind::RightArc: return "right";
  }
  return "?";
}

Track Track::build(const TrackSpec& spec) {
  if (spec.segments.empty()) throw std::runtime_error("track has no segments");
  if (spec.lane_width <= 0.0) throw std::runtime_error("lane_width must be positive");

  Track t;
  t.spec_ = spec;
  Pose2 cur = spec.start;
  double s = 0.0;
  for (const SegmentDef& def : spec.segments) {
    Segment seg;
    seg.kind = def.kind;
    seg.entry = cur;
    seg.s0 = s;
    if (def.kind == SegmentKind::Straight) {
      if (def.length <= 0.0) throw std::runtime_error("straight segment needs length > 0");
      seg.length = def.length;
      seg.radius = 0.0;
      cur.x += def.length * std::cos(cur.heading);
      cur.y += def.length * std::sin(cur.heading);
    } else {
      if (def.radius <= 0.0 || def.angle_deg <= 0.0) {
        throw std::runtime_error("arc segment needs radius > 0 and angle > 0");
      }
      double sweep = def.angle_deg * kPi / 180.0;
      seg.length = def.radius * sweep;
      seg.radius = def.radius;
      bool left = def.kind == SegmentKind::LeftArc;
      // center sits on the normal: left of travel for left arcs, right otherwise
      double nx = left ? -std::sin(cur.heading) : std::sin(cur.heading);
      double ny = left ? std::cos(cur.heading) : -std::cos(cur.heading);
      seg.cx = cur.x + def.radius * nx;
      seg.cy = cur.y + def.radius * ny;
      double phi0 = std::atan2(cur.y - seg.cy, cur.x - seg.cx);
      double phi1 = left ? phi0 + sweep : phi0 - sweep;
      cur.x = seg.cx + def.radius * std::cos(phi1);
      cur.y = seg.cy + def.radius * std::sin(phi1);
      cur.heading = wrap_angle(cur.heading + (left ? sweep : -sweep));
    }
    s += seg.length;
    t.segments_.push_back(seg);
  }
  t.length_ = s;

  if (spec.closed) {
    double dx = cur.x - spec.start.x;
    double dy = cur.y - spec.start.y;
    double dh = wrap_angle(cur.heading - spec.start.heading);
    if (std::abs(dx) > kCloseTol || std::abs(dy) > kCloseTol || std::abs(dh) > kCloseTol) {
      std::ostringstream msg;
      msg << "closed track does not close: end offset (" << dx << ", " << dy
          << "), heading offset " << dh;
      throw std::runtime_error(msg.str());
    }
  }
  return t;
}

Track Track::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open track file: " + path);

  TrackSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + why);
    };
    if (word == "lane_width") {
      if (!(ls >> spec.lane_width)) fail("lane_width needs a value");
    } else if (word == "closed") {
      std::string v;
      if (!(ls >> v)) fail("closed needs true/false");
      if (v == "true") spec.closed = true;
      else if (v == "false") spec.closed = false;
      else fail("closed needs true/false");
    } else if (word == "straight") {
      SegmentDef def;
      def.kind = SegmentKind::Straight;
      if (!(ls >> def.length)) fail("straight needs a length");
      spec.segments.push_back(def);
    } else if (word == "left" || word == "right") {
      SegmentDef def;
      def.kind = word == "left" ? SegmentKind::LeftArc : SegmentKind::RightArc;
      if (!(ls >> def.angle_deg >> def.radius)) fail(word + " needs angle_deg and radius");
      spec.segments.push_back(def);
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  return build(spec);
}

double Track::wrap(double s) const {
  if (closed()) {
    s = std::fmod(s, length_);
    if (s < 0.0) s += length_;
    return s;
  }
  return std::clamp(s, 0.0, length_);
}

int Track::segment_index(double s) const {
  // few segments per track; linear scan is the simple and fast option
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (s < segments_[i].s0 + segments_[i].length) return static_cast<int>(i);
  }
  return static_cast<int>(segments_.size()) - 1;
}

TrackPoint Track::at(double s) const {
  s = wrap(s);
  int idx = segment_index(s);
  const Segment& seg = segments_[idx];
  double u = s - seg.s0;
  TrackPoint p;
  p.segment = idx;
  if (seg.kind == SegmentKind::Straight) {
    p.pose.x = seg.entry.x + u * std::cos(seg.entry.heading);
    p.pose.y = seg.entry.y + u * std::sin(seg.entry.heading);
    p.pose.heading = seg.entry.heading;
    p.curvature = 0.0;
  } else {
    bool left = seg.kind == SegmentKind::LeftArc;
    double phi0 = std::atan2(seg.entry.y - seg.cy, seg.entry.x - seg.cx);
    double psi = u / seg.radius;
    double phi = left ? phi0 + psi : phi0 - psi;
    p.pose.x = seg.cx + seg.radius * std::cos(phi);
    p.pose.y = seg.cy + seg.radius * std::sin(phi);
    p.pose.heading = wrap_angle(seg.entry.heading + (left ? psi : -psi));
    p.curvature = (left ? 1.0 : -1.0) / seg.radius;
  }
  return p;
}

Projection Track::project(double x, double y) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  Projection best{0.0, 0.0, 0};

  for (size_t i = 0; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    double s_local, d2, lateral;
    if (seg.kind == SegmentKind::Straight) {
      double tx = std::cos(seg.entry.heading);
      double ty = std::sin(seg.entry.heading);
      double dx = x - seg.entry.x;
      double dy = y - seg.entry.y;
      double t = std::clamp(dx * tx + dy * ty, 0.0, seg.length);
      double px = seg.entry.x + t * tx;
      double py = seg.entry.y + t * ty;
      d2 = (x - px) * (x - px) + (y - py) * (y - py);
      lateral = tx * (y - py) - ty * (x - px);
      s_local = t;
    } else {
      bool left = seg.kind == SegmentKind::LeftArc;
      double vx = x - seg.cx;
      double vy = y - seg.cy;
      double r = std::hypot(vx, vy);
      double sweep_total = seg.length / seg.radius;
      double phi0 = std::atan2(seg.entry.y - seg.cy, seg.entry.x - seg.cx);
      double psi = r > 1e-12 ? sweep_from(phi0, std::atan2(vy, vx), left) : 0.0;
      if (psi <= sweep_total) {
        s_local = psi * seg.radius;
        double dr = r - seg.radius;
        d2 = dr * dr;
        // points outside a left arc's circle lie right of travel
        lateral = left ? -dr : dr;
      } else {
        // outside the swept range: nearer endpoint wins
        double gap_end = psi - sweep_total;
        double gap_start = 2.0 * kPi - psi;
        s_local = gap_end < gap_start ? seg.length : 0.0;
        TrackPoint ep = at(seg.s0 + s_local);
        // re-fetch exact endpoint of *this* segment (at() may wrap on seams)
        double ex, ey, eh;
        if (s_local == 0.0) {
          ex = seg.entry.x; ey = seg.entry.y; eh = seg.entry.heading;
        } else {
          double phi1 = left ? phi0 + sweep_total : phi0 - sweep_total;
          ex = seg.cx + seg.radius * std::cos(phi1);
          ey = seg.cy + seg.radius * std::sin(phi1);
          eh = wrap_angle(seg.entry.heading + (left ? sweep_total : -sweep_total));
        }
        (void)ep;
        double dx = x - ex;
        double dy = y - ey;
        d2 = dx * dx + dy * dy;
        lateral = std::cos(eh) * dy - std::sin(eh) * dx;
      }
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best.arc_position = wrap(seg.s0 + s_local);
      best.lateral_offset = lateral;
      best.segment = static_cast<int>(i);
    }
  }
  return best;
}

SegmentKind Track::kind_at(double s) const {
  return segments_[segment_index(wrap(s))].kind;
}

double Track::distance_to_next_turn(double s) const {
  s = wrap(s);
  int idx = segment_index(s);
  if (segments_[idx].kind != SegmentKind::Straight) return 0.0;
  double d = segments_[idx].s0 + segments_[idx].length - s;
  int n = static_cast<int>(segments_.size());
  for (int k = 1; k <= n; ++k) {
    int j = idx + k;
    if (j >= n) {
      if (!closed()) break;
      j -= n;
    }
    if (segments_[j].kind != SegmentKind::Straight) return d;
    d += segments_[j].length;
  }
  return std::numeric_limits<double>::infinity();
}

TrackSpec default_track_spec() {
  TrackSpec spec;
  spec.lane_width = 0.8;
  spec.closed = true;
  spec.segments = {
      {SegmentKind::Straight, 3.0, 0.0, 0.0},
      {SegmentKind::RightArc, 0.0, 180.0, 0.8},
      {SegmentKind::Straight, 3.0, 0.0, 0.0},
      {SegmentKind::RightArc, 0.0, 180.0, 0.8},
  };
  return spec;
}

}  // namespace blendsim::sim
