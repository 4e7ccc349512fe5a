#pragma once

// World primitives for the UGV+UAV marsupial model: points, cuboids,
// obstacle inflation, vertical half-plane slicing and collision predicates.
//
// Conventions:
//   * world frame is z-up, ground plane z = 0, lengths in meters;
//   * a PlanarScene lives in a vertical half-plane through the target T.
//     Its coordinate d >= 0 is the horizontal distance from T' (the ground
//     projection of T) and z is height. T sits at d = 0.
//   * tangency is collision-free; contact within kEps counts as tangency.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace marsupial {

inline constexpr double kEps = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
  kInvalidInput,
  kUnreachable,
  kNoCandidates,
  kShorterThanChord,
  kVerticalAnchors,
  kGenerationFailed,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kUnreachable: return "Unreachable";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kShorterThanChord: return "ShorterThanChord";
    case ErrorCode::kVerticalAnchors: return "VerticalAnchors";
    case ErrorCode::kGenerationFailed: return "GenerationFailed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 ground() const { return {x, y}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

/// Point in a vertical half-plane: d = distance from T', z = height.
struct PlanePoint {
  double d = 0.0;
  double z = 0.0;

  friend bool operator==(PlanePoint, PlanePoint) = default;
};

inline double distance(PlanePoint a, PlanePoint b) {
  return std::hypot(a.d - b.d, a.z - b.z);
}

// ---------------------------------------------------------------------------
// Model constants
// ---------------------------------------------------------------------------

/// System height h, UAV radius r and maximum tether length L.
///
/// The carrying system is a cylinder of radius r and height h; after obstacle
/// inflation it reduces to a vertical segment of height h - r whose top is the
/// take-off point. The UGV tie point at height h - 2r is not used by planning.
struct MarsupialParams {
  double h = 1.5;
  double r = 0.5;
  double L = 50.0;

  double take_off_height() const { return h - r; }

  void validate() const {
    if (!(std::isfinite(h) && std::isfinite(r) && std::isfinite(L)))
      throw Error(ErrorCode::kInvalidInput, "params must be finite");
    if (!(r > 0.0)) throw Error(ErrorCode::kInvalidInput, "params.r must be > 0");
    if (!(L > 0.0)) throw Error(ErrorCode::kInvalidInput, "params.L must be > 0");
    if (!(h > 2.0 * r)) throw Error(ErrorCode::kInvalidInput, "params.h must exceed 2r");
  }
};

// ---------------------------------------------------------------------------
// Cuboids
// ---------------------------------------------------------------------------

struct Cuboid {
  Point3 min_corner;
  Point3 max_corner;

  bool valid() const {
    return min_corner.x < max_corner.x && min_corner.y < max_corner.y &&
           min_corner.z < max_corner.z;
  }
  double volume() const {
    return (max_corner.x - min_corner.x) * (max_corner.y - min_corner.y) *
           (max_corner.z - min_corner.z);
  }
  /// Closed containment.
  bool contains(const Point3& p) const {
    return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
           p.y <= max_corner.y && p.z >= min_corner.z && p.z <= max_corner.z;
  }
  /// Strict interior containment, shrunk by kEps.
  bool contains_strictly(const Point3& p) const {
    return p.x > min_corner.x + kEps && p.x < max_corner.x - kEps &&
           p.y > min_corner.y + kEps && p.y < max_corner.y - kEps &&
           p.z > min_corner.z + kEps && p.z < max_corner.z - kEps;
  }
  bool contains(const Cuboid& other) const {
    return contains(other.min_corner) && contains(other.max_corner);
  }
  /// True when the open interiors overlap.
  bool overlaps(const Cuboid& o) const {
    return min_corner.x < o.max_corner.x && o.min_corner.x < max_corner.x &&
           min_corner.y < o.max_corner.y && o.min_corner.y < max_corner.y &&
           min_corner.z < o.max_corner.z && o.min_corner.z < max_corner.z;
  }

  friend bool operator==(const Cuboid&, const Cuboid&) = default;
};

/// Smallest axis-aligned cuboid containing the Minkowski sum of the obstacle
/// with a sphere of radius r: every face moves outward by r.
inline Cuboid inflate(const Cuboid& obstacle, double r) {
  return {{obstacle.min_corner.x - r, obstacle.min_corner.y - r, obstacle.min_corner.z - r},
          {obstacle.max_corner.x + r, obstacle.max_corner.y + r, obstacle.max_corner.z + r}};
}

// ---------------------------------------------------------------------------
// Scene
// ---------------------------------------------------------------------------

struct Scene {
  std::vector<Cuboid> obstacles;
  Point3 start;                 // z = 0
  std::vector<Point3> targets;  // each z > h
  MarsupialParams params;
  Cuboid bounds;

  std::vector<Cuboid> inflated_obstacles() const {
    std::vector<Cuboid> out;
    out.reserve(obstacles.size());
    for (const auto& o : obstacles) out.push_back(inflate(o, params.r));
    return out;
  }
};

/// Axis-aligned rectangle on the ground (an inflated obstacle footprint).
struct Footprint {
  double x_min, y_min, x_max, y_max;

  bool contains_strictly(Vec2 p) const {
    return p.x > x_min + kEps && p.x < x_max - kEps && p.y > y_min + kEps &&
           p.y < y_max - kEps;
  }
  std::array<Vec2, 4> corners() const {
    return {Vec2{x_min, y_min}, Vec2{x_max, y_min}, Vec2{x_max, y_max}, Vec2{x_min, y_max}};
  }
};

/// True iff the inflated obstacle intersects the carried system's vertical
/// segment z in (0, h - r).
inline bool blocks_ugv(const Cuboid& inflated, const MarsupialParams& params) {
  return inflated.min_corner.z < params.take_off_height() - kEps &&
         inflated.max_corner.z > kEps;
}

/// Ground footprints of inflated obstacles that block the UGV.
inline std::vector<Footprint> blocking_footprints(const Scene& scene) {
  std::vector<Footprint> out;
  for (const auto& o : scene.obstacles) {
    Cuboid c = inflate(o, scene.params.r);
    if (blocks_ugv(c, scene.params))
      out.push_back({c.min_corner.x, c.min_corner.y, c.max_corner.x, c.max_corner.y});
  }
  return out;
}

inline std::vector<std::string> scene_issues(const Scene& scene) {
  std::vector<std::string> issues;
  try {
    scene.params.validate();
  } catch (const Error& e) {
    issues.emplace_back(e.what());
    return issues;
  }
  if (!scene.bounds.valid()) issues.emplace_back("bounds must have min < max");
  if (std::abs(scene.start.z) > kEps) issues.emplace_back("start must lie on z = 0");
  if (scene.targets.empty()) issues.emplace_back("scene needs at least one target");
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    if (!scene.obstacles[i].valid())
      issues.push_back("obstacle " + std::to_string(i) + " is degenerate");
    for (std::size_t j = i + 1; j < scene.obstacles.size(); ++j)
      if (scene.obstacles[i].overlaps(scene.obstacles[j]))
        issues.push_back("obstacles " + std::to_string(i) + " and " + std::to_string(j) +
                         " overlap");
  }
  const auto inflated = scene.inflated_obstacles();
  for (std::size_t k = 0; k < scene.targets.size(); ++k) {
    const auto& t = scene.targets[k];
    if (!(t.z > scene.params.h))
      issues.push_back("target " + std::to_string(k) + " must be above h");
    for (const auto& c : inflated)
      if (c.contains_strictly(t)) {
        issues.push_back("target " + std::to_string(k) + " is inside an inflated obstacle");
        break;
      }
  }
  for (const auto& f : blocking_footprints(scene))
    if (f.contains_strictly(scene.start.ground())) {
      issues.emplace_back("start is inside an inflated obstacle");
      break;
    }
  return issues;
}

inline void validate_scene(const Scene& scene) {
  auto issues = scene_issues(scene);
  if (!issues.empty()) throw Error(ErrorCode::kInvalidInput, issues.front());
}

// ---------------------------------------------------------------------------
// Vertical half-planes
// ---------------------------------------------------------------------------

struct PlaneFrame {
  double azimuth = 0.0;    // [0, 2pi)
  Vec2 origin;             // T' on the ground
  PlanePoint target_2d;    // (0, z_T)
  int plane_index = 0;     // full-plane index in the beam
  int side = 0;            // 0 or 1: which half of the full plane

  Vec2 direction() const { return {std::cos(azimuth), std::sin(azimuth)}; }
  Vec2 ground_at(double d) const { return origin + d * direction(); }
  Point3 world_at(PlanePoint p) const {
    Vec2 g = ground_at(p.d);
    return {g.x, g.y, p.z};
  }
};

/// Frame of the half-plane from T' through ground point x. When x coincides
/// with T' the azimuth is 0.
inline PlaneFrame frame_through(const Point3& target, Vec2 x) {
  PlaneFrame f;
  f.origin = target.ground();
  f.target_2d = {0.0, target.z};
  Vec2 v = x - f.origin;
  double a = (norm(v) > kEps) ? std::atan2(v.y, v.x) : 0.0;
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  f.azimuth = a;
  return f;
}

struct RectKind {
  bool blocks_ugv = false;
  bool aerial_support_lr = false;  // lower corner nearest T is a chain support
  bool aerial_support_ll = false;  // lower corner farthest from T is a chain support
  bool central = false;            // the 3D source meets segment T'T
};

struct Rect2 {
  double d_min = 0.0, d_max = 0.0, z_min = 0.0, z_max = 0.0;
  RectKind kind;
  int source = -1;  // obstacle index in the scene

  PlanePoint lower_right() const { return {d_min, z_min}; }  // nearest T, bottom
  PlanePoint lower_left() const { return {d_max, z_min}; }
  PlanePoint upper_left() const { return {d_max, z_max}; }   // farthest from T, top
  PlanePoint upper_right() const { return {d_min, z_max}; }

  bool contains_strictly(PlanePoint p) const {
    return p.d > d_min + kEps && p.d < d_max - kEps && p.z > z_min + kEps &&
           p.z < z_max - kEps;
  }
};

struct PlanarScene {
  std::vector<Rect2> rects;
  PlanePoint target_2d;
  double take_off_z = 0.0;
  PlaneFrame frame;
};

/// Parameter interval [t0, t1] of the ray o + t*u inside the open box
/// (lo, hi) in one axis. Returns false when the ray misses.
inline bool clip_axis(double o, double u, double lo, double hi, double& t0, double& t1) {
  if (std::abs(u) < 1e-15) return o > lo && o < hi;
  double a = (lo - o) / u, b = (hi - o) / u;
  if (a > b) std::swap(a, b);
  t0 = std::max(t0, a);
  t1 = std::min(t1, b);
  return t0 < t1;
}

/// Classify a rect against the take-off height t and target height.
inline RectKind classify(double z_min, double z_max, bool central, double t) {
  RectKind k;
  k.blocks_ugv = z_min < t - kEps && z_max > kEps;
  // A lower corner can hold the tether when it is not below the take-off line.
  k.aerial_support_lr = z_min >= t - kEps;
  k.aerial_support_ll = z_min >= t - kEps;
  k.central = central;
  return k;
}

/// Intersect every inflated obstacle with the half-plane of `frame`.
inline PlanarScene slice(const Scene& scene, const PlaneFrame& frame) {
  PlanarScene out;
  out.frame = frame;
  out.target_2d = frame.target_2d;
  out.take_off_z = scene.params.take_off_height();
  const Vec2 o = frame.origin, u = frame.direction();
  const double zt = frame.target_2d.z;
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    const Cuboid c = inflate(scene.obstacles[i], scene.params.r);
    // Rects straddling T' keep their negative extent so that the vertical
    // through T' stays blocked.
    double t0 = -kInf, t1 = kInf;
    if (!clip_axis(o.x, u.x, c.min_corner.x, c.max_corner.x, t0, t1)) continue;
    if (!clip_axis(o.y, u.y, c.min_corner.y, c.max_corner.y, t0, t1)) continue;
    if (t1 <= kEps || t1 - t0 <= kEps) continue;
    const bool central = o.x > c.min_corner.x + kEps && o.x < c.max_corner.x - kEps &&
                         o.y > c.min_corner.y + kEps && o.y < c.max_corner.y - kEps &&
                         c.min_corner.z < zt && c.max_corner.z > 0.0;
    Rect2 r;
    r.d_min = t0;
    r.d_max = t1;
    r.z_min = c.min_corner.z;
    r.z_max = c.max_corner.z;
    r.kind = classify(r.z_min, r.z_max, central, out.take_off_z);
    r.source = static_cast<int>(i);
    out.rects.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collision predicates
// ---------------------------------------------------------------------------

/// True iff the segment a-b passes through the interior of the box shrunk by
/// kEps (so grazing contact is clear).
inline bool segment_hits_box(double ax, double ay, double bx, double by, double x0,
                             double y0, double x1, double y1) {
  x0 += kEps; y0 += kEps; x1 -= kEps; y1 -= kEps;
  if (x0 >= x1 || y0 >= y1) return false;
  if (std::max(ax, bx) <= x0 || std::min(ax, bx) >= x1 || std::max(ay, by) <= y0 ||
      std::min(ay, by) >= y1)
    return false;
  double t0 = 0.0, t1 = 1.0;
  if (!clip_axis(ax, bx - ax, x0, x1, t0, t1)) return false;
  if (!clip_axis(ay, by - ay, y0, y1, t0, t1)) return false;
  return t0 < t1;
}

inline bool segment_hits(PlanePoint a, PlanePoint b, const Rect2& r) {
  return segment_hits_box(a.d, a.z, b.d, b.z, r.d_min, r.z_min, r.d_max, r.z_max);
}

/// True iff the segment a-b misses the open interior of every rect.
inline bool segment_clear(PlanePoint a, PlanePoint b, std::span<const Rect2> rects) {
  for (const auto& r : rects)
    if (segment_hits(a, b, r)) return false;
  return true;
}

inline bool segment_clear(Vec2 a, Vec2 b, std::span<const Footprint> footprints) {
  for (const auto& f : footprints)
    if (segment_hits_box(a.x, a.y, b.x, b.y, f.x_min, f.y_min, f.x_max, f.y_max))
      return false;
  return true;
}

/// Sweeping the carried system (a vertical segment of height h - r) along the
/// straight ground segment x1-x2 touches no inflated obstacle interior.
inline bool ugv_sweep_clear(Vec2 x1, Vec2 x2, const Scene& scene) {
  const auto fps = blocking_footprints(scene);
  return segment_clear(x1, x2, std::span<const Footprint>(fps));
}

inline double polyline_length(std::span<const Vec2> pts) {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
  return s;
}

inline double polyline_length(std::span<const Point3> pts) {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
  return s;
}

}  // namespace marsupial
