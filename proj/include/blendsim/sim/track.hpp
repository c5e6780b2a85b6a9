#pragma once

#include <string>
#include <vector>

namespace blendsim::sim {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, CCW-positive from +x
};

enum class SegmentKind { Straight, LeftArc, RightArc };

const char* segment_kind_name(SegmentKind k);

struct SegmentDef {
  SegmentKind kind = SegmentKind::Straight;
  double length = 0.0;     // straights: meters
  double angle_deg = 0.0;  // arcs: swept angle, degrees
  double radius = 0.0;     // arcs: centerline radius, meters
};

struct TrackSpec {
  double lane_width = 0.8;
  bool closed = true;
  std::vector<SegmentDef> segments;
  Pose2 start;  // pose of the first segment entry
};

struct Segment {
  SegmentKind kind;
  Pose2 entry;
  double length;  // centerline arc length
  double radius;  // arcs only
  double s0;      // arc position of the entry
  double cx = 0.0, cy = 0.0;  // arc center
};

struct TrackPoint {
  Pose2 pose;
  double curvature;  // CCW-positive: +1/R left arc, -1/R right arc
  int segment;
};

struct Projection {
  double arc_position;
  double lateral_offset;  // signed, left of travel positive
  int segment;
};

// Piecewise straight/arc centerline with a fixed lane width. Closed tracks
// must return to the start pose within 1e-6 (position and heading).
class Track {
 public:
  static Track build(const TrackSpec& spec);
  static Track load(const std::string& path);

  double length() const { return length_; }
  double lane_width() const { return spec_.lane_width; }
  bool closed() const { return spec_.closed; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Wraps s into [0, length) on closed tracks, clamps on open ones.
  double wrap(double s) const;
  TrackPoint at(double s) const;
  Projection project(double x, double y) const;
  SegmentKind kind_at(double s) const;
  // Arc distance from s to the start of the next curved segment;
  // 0 when s lies inside a curve, infinity when no curve lies ahead.
  double distance_to_next_turn(double s) const;

 private:
  int segment_index(double s) const;

  TrackSpec spec_;
  std::vector<Segment> segments_;
  double length_ = 0.0;
};

// Stock test circuit: two 3 m straights joined by 180 degree right-hand
// arcs of 0.8 m radius, 0.8 m lane. Used whenever no track file is given.
TrackSpec default_track_spec();

}  // namespace blendsim::sim
