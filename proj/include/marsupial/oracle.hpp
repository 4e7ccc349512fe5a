#pragma once

// Brute-force verifiers. They only share the geometry primitives with the
// modules they check and are meant for small scenes.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "marsupial/geometry.hpp"

namespace marsupial::oracle {

struct PVisibility {
  bool visible = false;
  double min_length = kInf;
};

namespace detail {

struct ChainSearch {
  std::span<const Rect2> rects;
  std::vector<PlanePoint> vertices;  // every rect corner plus T (last)
  PlanePoint target;
  double bound = 0.0;
  double best = kInf;

  static bool rises(PlanePoint a, PlanePoint b) {
    return b.d <= a.d + kEps && b.z >= a.z - kEps &&
           std::hypot(b.d - a.d, b.z - a.z) > kEps;
  }
  static bool bends_up(PlanePoint a, PlanePoint b, PlanePoint c) {
    // Slope of b->c is at least the slope of a->b, mirrored to x = -d.
    const double ux = a.d - b.d, uz = b.z - a.z;  // a->b with x = -d
    const double vx = b.d - c.d, vz = c.z - b.z;
    const double scale = std::hypot(ux, uz) * std::hypot(vx, vz);
    return ux * vz - uz * vx >= -1e-9 * std::max(scale, 1.0);
  }

  void search(PlanePoint prev, PlanePoint cur, bool has_prev, double len) {
    // Close the chain at T.
    if (rises(cur, target) && (!has_prev || bends_up(prev, cur, target)) &&
        segment_clear(cur, target, rects)) {
      best = std::min(best, len + std::hypot(cur.d - target.d, cur.z - target.z));
    }
    for (const PlanePoint& v : vertices) {
      if (!rises(cur, v)) continue;
      if (has_prev && !bends_up(prev, cur, v)) continue;
      const double step = std::hypot(cur.d - v.d, cur.z - v.z);
      const double lower = len + step + std::hypot(v.d - target.d, v.z - target.z);
      if (lower > bound + 1e-9 * std::max(1.0, bound) || lower >= best) continue;
      if (!segment_clear(cur, v, rects)) continue;
      search(cur, v, true, len + step);
    }
  }
};

}  // namespace detail

/// Exhaustive search over increasing convex chains whose interior vertices are
/// rect corners. Reports whether a chain of length <= bound exists and the
/// shortest one found.
inline PVisibility oracle_p_visible(PlanePoint y, const PlanarScene& scene, double bound) {
  detail::ChainSearch s;
  s.rects = scene.rects;
  s.target = scene.target_2d;
  s.bound = bound;
  for (const auto& r : scene.rects)
    for (PlanePoint p : {r.lower_right(), r.lower_left(), r.upper_left(), r.upper_right()})
      s.vertices.push_back(p);
  s.search(y, y, false, 0.0);
  PVisibility out;
  out.min_length = s.best;
  out.visible = s.best <= bound + 1e-9 * std::max(1.0, bound);
  return out;
}

// ---------------------------------------------------------------------------
// Catenary feasibility on a fine length grid
// ---------------------------------------------------------------------------

namespace detail {

// Height function of the catenary of length s between a and b (a.d < b.d),
// solved by bisection on the parameter in log space.
struct SampledCatenary {
  PlanePoint a, b;
  bool straight = true;
  double k = 0.0, xv = 0.0;

  double z(double d) const {
    if (straight) return a.z + (b.z - a.z) * (d - a.d) / (b.d - a.d);
    return a.z + k * (std::cosh((d - xv) / k) - std::cosh((a.d - xv) / k));
  }
};

inline std::optional<SampledCatenary> hang(PlanePoint a, PlanePoint b, double s) {
  if (b.d < a.d) std::swap(a, b);
  SampledCatenary c{a, b};
  const double h = b.d - a.d, v = b.z - a.z;
  const double chord = std::hypot(h, v);
  if (h < 1e-9) return std::nullopt;
  if (s - chord < 1e-7) return c;
  const double target = std::sqrt(s * s - v * v);
  double lo = std::log(1e-6), hi = std::log(1e9);
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double k = std::exp(mid);
    const double f = 2.0 * k * std::sinh(h / (2.0 * k));
    if (!std::isfinite(f) || f > target)
      lo = mid;
    else
      hi = mid;
  }
  c.straight = false;
  c.k = std::exp(0.5 * (lo + hi));
  c.xv = 0.5 * (a.d + b.d) - c.k * std::atanh(v / s);
  return c;
}

inline bool point_in_rects(PlanePoint p, std::span<const Rect2> rects) {
  for (const auto& r : rects)
    if (r.contains_strictly(p)) return true;
  return false;
}

}  // namespace detail

struct CVisibility {
  bool visible = false;
  double min_length = kInf;
};

/// Tries 10 * c lengths evenly spaced on [chord, L]; each curve is checked
/// at 1000 sample points, and the chords joining them, against the rects and
/// the ground.
inline CVisibility oracle_c_visible(PlanePoint y, PlanePoint t, double L, int c,
                                    std::span<const Rect2> rects) {
  CVisibility out;
  const double chord = std::hypot(y.d - t.d, y.z - t.z);
  if (chord > L + 1e-9) return out;
  const int n = std::max(1, 10 * c);
  const int samples = 1000;
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? chord : chord + (L - chord) * i / (n - 1);
    bool ok = true;
    if (std::abs(y.d - t.d) < 1e-9) {
      // Vertical anchors only admit the taut segment.
      if (s > chord + 1e-9) continue;
      for (int k = 1; k < samples && ok; ++k) {
        const PlanePoint p{y.d, y.z + (t.z - y.z) * k / samples};
        ok = !detail::point_in_rects(p, rects);
      }
    } else {
      auto cat = detail::hang(y, t, s);
      if (!cat) continue;
      // Points alone miss shallow corner clips between samples, so the chord
      // between consecutive samples is checked as well.
      PlanePoint prev{};
      for (int k = 0; k <= samples && ok; ++k) {
        const double d = cat->a.d + (cat->b.d - cat->a.d) * k / samples;
        const PlanePoint p{d, cat->z(d)};
        ok = p.z >= -1e-9 && !detail::point_in_rects(p, rects) &&
             (k == 0 || segment_clear(prev, p, rects));
        prev = p;
      }
    }
    if (ok) {
      out.visible = true;
      out.min_length = s;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shortest paths
// ---------------------------------------------------------------------------

struct WeightedEdge {
  int u = 0, v = 0;
  double w = 0.0;
};

/// Bellman-Ford relaxation to a fixed point over an undirected edge list.
/// Returns kInf when the sink is unreachable.
inline double oracle_shortest_path(int vertex_count, const std::vector<WeightedEdge>& edges,
                                   int source, int sink) {
  std::vector<double> dist(static_cast<std::size_t>(vertex_count), kInf);
  dist[static_cast<std::size_t>(source)] = 0.0;
  for (int round = 0; round < vertex_count; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      auto& du = dist[static_cast<std::size_t>(e.u)];
      auto& dv = dist[static_cast<std::size_t>(e.v)];
      if (du + e.w < dv) {
        dv = du + e.w;
        changed = true;
      }
      if (dv + e.w < du) {
        du = dv + e.w;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist[static_cast<std::size_t>(sink)];
}

// ---------------------------------------------------------------------------
// Grid planner
// ---------------------------------------------------------------------------

enum class OracleTether { kTaut, kCatenary };

/// Exact ground distances from `start` to every grid node (via the corner
/// visibility graph), plus the aerial oracle on each node's own plane.
/// Returns the best total length; throws Unreachable when no node works.
inline double oracle_plan(const Scene& scene, std::size_t target_index, double grid_step,
                          OracleTether tether = OracleTether::kTaut, int c = 26,
                          std::optional<Vec2> start = {}) {
  const Point3 target = scene.targets.at(target_index);
  const Vec2 s = start.value_or(scene.start.ground());
  const double top = scene.params.take_off_height();
  const double L = scene.params.L;

  std::vector<Footprint> fps;
  for (const auto& o : scene.obstacles) {
    const Cuboid c3 = inflate(o, scene.params.r);
    if (c3.min_corner.z < top - kEps && c3.max_corner.z > kEps)
      fps.push_back({c3.min_corner.x, c3.min_corner.y, c3.max_corner.x, c3.max_corner.y});
  }
  const std::span<const Footprint> fp(fps);
  auto blocked = [&](Vec2 p) {
    for (const auto& f : fps)
      if (f.contains_strictly(p)) return true;
    return false;
  };

  // Dense Dijkstra over S and the footprint corners.
  std::vector<Vec2> pts{s};
  for (const auto& f : fps)
    for (Vec2 q : f.corners())
      if (!blocked(q)) pts.push_back(q);
  const std::size_t m = pts.size();
  std::vector<double> dist(m, kInf);
  std::vector<bool> done(m, false);
  dist[0] = 0.0;
  for (std::size_t it = 0; it < m; ++it) {
    std::size_t u = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!done[i] && dist[i] < kInf && (u == m || dist[i] < dist[u])) u = i;
    if (u == m) break;
    done[u] = true;
    for (std::size_t v = 0; v < m; ++v)
      if (!done[v] && segment_clear(pts[u], pts[v], fp))
        dist[v] = std::min(dist[v], dist[u] + distance(pts[u], pts[v]));
  }

  const auto& b = scene.bounds;
  const Vec2 tg = target.ground();
  const double reach = std::sqrt(std::max(0.0, L * L - (target.z - top) * (target.z - top)));
  double best = kInf;
  const int nx = static_cast<int>(std::floor((b.max_corner.x - b.min_corner.x) / grid_step));
  const int ny = static_cast<int>(std::floor((b.max_corner.y - b.min_corner.y) / grid_step));
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) {
      const Vec2 g{b.min_corner.x + i * grid_step, b.min_corner.y + j * grid_step};
      const double d = distance(g, tg);
      if (d > reach + 1e-9 || blocked(g)) continue;
      double ground = kInf;
      for (std::size_t v = 0; v < m; ++v)
        if (dist[v] + distance(pts[v], g) < ground && segment_clear(pts[v], g, fp))
          ground = dist[v] + distance(pts[v], g);
      if (ground == kInf || ground + (target.z - top) >= best) continue;
      const PlanarScene plane = slice(scene, frame_through(target, g));
      const PlanePoint y{d, top};
      double aerial = kInf;
      if (tether == OracleTether::kTaut) {
        const auto pv = oracle_p_visible(y, plane, L);
        if (pv.visible) aerial = pv.min_length;
      } else {
        const auto cv = oracle_c_visible(y, plane.target_2d, L, c, plane.rects);
        if (cv.visible) aerial = cv.min_length;
      }
      best = std::min(best, ground + aerial);
    }
  if (best == kInf) throw Error(ErrorCode::kUnreachable, "no grid node reaches the target");
  return best;
}

}  // namespace marsupial::oracle
