#pragma once

// Polygonal visibility in one vertical half-plane.
//
// Given the rects of a half-plane, the take-off line z = h - r and the target
// T = (0, z_T), compute the exact set of take-off points Y = (d, h - r) that
// admit a collision-free increasing convex polygonal chain (a taut tether) to
// T of length at most L.
//
// The computation runs in four passes over the critical vertices:
//   1. minimum chain length from every support (lower corner) to T;
//   2. left end-points, where a chain starts grazing an upper-left corner;
//   3. right end-points, where the minimum chain has length exactly L;
//   4. a sweep that pairs them into maximal non-visible intervals.
//
// Orientation: "left" in the classic drawings is larger d here. A chain runs
// from the take-off point towards T with d non-increasing and z
// non-decreasing, and its slopes never decrease (the tether wraps under the
// lower corners of obstacles).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "marsupial/geometry.hpp"
#include "marsupial/rect_index.hpp"

namespace marsupial {

enum class VertexKind { kTarget, kLowerRight, kLowerLeft, kUpperLeft };

struct CriticalVertex {
  PlanePoint pos;
  VertexKind kind = VertexKind::kTarget;
  int owner = -1;  // rect index, -1 for T
};

/// A polygonal tether from a take-off point to T.
struct Chain {
  std::vector<PlanePoint> vertices;
  double length = 0.0;
};

/// Closed d-interval on the take-off line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct VisIntervals {
  std::vector<Interval> visible;   // sorted, disjoint, within [0, d_Q]
  std::optional<double> q_reach;   // d_Q; empty when T is out of reach

  bool contains(double d) const {
    auto it = std::upper_bound(visible.begin(), visible.end(), d,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == visible.begin()) return false;
    --it;
    return d <= it->hi;
  }
  /// Distance from d to the nearest interval end-point (kInf if none).
  double distance_to_endpoint(double d) const {
    double best = kInf;
    for (const auto& iv : visible)
      best = std::min({best, std::abs(d - iv.lo), std::abs(d - iv.hi)});
    return best;
  }
  double total_length() const {
    double s = 0.0;
    for (const auto& iv : visible) s += iv.length();
    return s;
  }
};

namespace detail {

inline double cross(PlanePoint a, PlanePoint b, PlanePoint c) {
  // (b - a) x (c - b) in (d, z) coordinates.
  return (b.d - a.d) * (c.z - b.z) - (b.z - a.z) * (c.d - b.d);
}

}  // namespace detail

/// b is reachable from a by an increasing edge: d does not grow, z does not
/// drop, and the points differ.
inline bool increasing_edge(PlanePoint a, PlanePoint b) {
  return b.d <= a.d + kEps && b.z >= a.z - kEps && distance(a, b) > kEps;
}

/// The chain a -> b -> c bends upward (or goes straight) at b. Mirrored to
/// the classic left-to-right picture, b lies on or right of the line a -> c.
inline bool convex_turn(PlanePoint a, PlanePoint b, PlanePoint c) {
  const double scale = distance(a, b) * distance(b, c);
  return detail::cross(a, b, c) <= 1e-9 * std::max(scale, 1.0);
}

/// Immutable per-plane query structure shared by the four passes and by
/// minimum-chain queries.
struct PlaneContext {
  PlanarScene scene;
  RectIndex index;
  double max_length = 0.0;
  std::vector<CriticalVertex> supports;     // [0] = T, then by z desc, d asc
  std::vector<CriticalVertex> upper_lefts;  // one per rect above the take-off line

  double take_off_z() const { return scene.take_off_z; }
  PlanePoint target() const { return scene.target_2d; }
  bool clear(PlanePoint a, PlanePoint b) const { return index.segment_clear(a, b); }

  /// Distance from T' to Q, the farthest take-off point a straight tether of
  /// length L reaches.
  std::optional<double> q_reach() const {
    const double dz = target().z - take_off_z();
    if (max_length < dz) return std::nullopt;
    return std::sqrt(std::max(0.0, max_length * max_length - dz * dz));
  }
};

inline PlaneContext make_context(const PlanarScene& scene, double max_length) {
  PlaneContext ctx;
  ctx.scene = scene;
  ctx.index = RectIndex(scene.rects);
  ctx.max_length = max_length;
  ctx.supports.push_back({scene.target_2d, VertexKind::kTarget, -1});
  const double t = scene.take_off_z;
  for (std::size_t i = 0; i < scene.rects.size(); ++i) {
    const Rect2& r = scene.rects[i];
    const int owner = static_cast<int>(i);
    // Supports of central rects are never used: no chain ends under T.
    if (!r.kind.central) {
      if (r.kind.aerial_support_lr)
        ctx.supports.push_back({r.lower_right(), VertexKind::kLowerRight, owner});
      if (r.kind.aerial_support_ll)
        ctx.supports.push_back({r.lower_left(), VertexKind::kLowerLeft, owner});
    }
    if (r.z_max > t + kEps) ctx.upper_lefts.push_back({r.upper_left(), VertexKind::kUpperLeft, owner});
  }
  std::stable_sort(ctx.supports.begin() + 1, ctx.supports.end(),
                   [](const CriticalVertex& a, const CriticalVertex& b) {
                     if (a.pos.z != b.pos.z) return a.pos.z > b.pos.z;
                     return a.pos.d < b.pos.d;
                   });
  return ctx;
}

/// Minimum chain lengths from each support to T and the next support on that
/// chain (the hook). lengths[0] = 0 for T itself; kInf when no chain exists.
struct SupportLengths {
  std::vector<double> lengths;
  std::vector<int> hooks;
};

/// Is support i a valid continuation after arriving at it from point y?
inline bool continues_convexly(const PlaneContext& ctx, const SupportLengths& table,
                               PlanePoint from, std::size_t i) {
  if (i == 0) return true;
  const int next = table.hooks[i];
  return convex_turn(from, ctx.supports[i].pos, ctx.supports[static_cast<std::size_t>(next)].pos);
}

inline SupportLengths support_lengths(const PlaneContext& ctx) {
  const std::size_t m = ctx.supports.size();
  SupportLengths table{std::vector<double>(m, kInf), std::vector<int>(m, -1)};
  table.lengths[0] = 0.0;
  struct Candidate {
    double length;
    std::size_t i;
  };
  std::vector<Candidate> candidates;
  for (std::size_t j = 1; j < m; ++j) {
    const PlanePoint lj = ctx.supports[j].pos;
    candidates.clear();
    for (std::size_t i = 0; i < j; ++i) {
      if (table.lengths[i] == kInf) continue;
      const PlanePoint li = ctx.supports[i].pos;
      if (!increasing_edge(lj, li)) continue;
      if (!continues_convexly(ctx, table, lj, i)) continue;
      candidates.push_back({table.lengths[i] + distance(lj, li), i});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.length < b.length || (a.length == b.length && a.i < b.i);
    });
    for (const auto& c : candidates) {
      if (ctx.clear(lj, ctx.supports[c.i].pos)) {
        table.lengths[j] = c.length;
        table.hooks[j] = static_cast<int>(c.i);
        break;
      }
    }
  }
  return table;
}

/// Chain from a support to T following the hooks.
inline std::vector<PlanePoint> support_chain(const PlaneContext& ctx, const SupportLengths& table,
                                             std::size_t j) {
  std::vector<PlanePoint> out;
  for (int k = static_cast<int>(j); k >= 0; k = (k == 0 ? -1 : table.hooks[static_cast<std::size_t>(k)]))
    out.push_back(ctx.supports[static_cast<std::size_t>(k)].pos);
  return out;
}

/// Left end-point candidates, one slot per upper-left vertex.
struct LeftEndpoints {
  std::vector<std::optional<double>> a;  // d of A_i on the take-off line
  std::vector<int> hooks;                // support index l*_j, -1 if none
};

inline LeftEndpoints left_endpoints(const PlaneContext& ctx, const SupportLengths& table) {
  const std::size_t n = ctx.upper_lefts.size();
  LeftEndpoints out{std::vector<std::optional<double>>(n), std::vector<int>(n, -1)};
  const double t = ctx.take_off_z();
  struct Candidate {
    double angle;  // elevation of u -> l, in [0, pi/2]
    double length;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const PlanePoint u = ctx.upper_lefts[i].pos;
    candidates.clear();
    for (std::size_t j = 0; j < ctx.supports.size(); ++j) {
      if (table.lengths[j] == kInf) continue;
      const PlanePoint l = ctx.supports[j].pos;
      if (!increasing_edge(u, l)) continue;
      if (!continues_convexly(ctx, table, u, j)) continue;
      candidates.push_back({std::atan2(l.z - u.z, u.d - l.d), table.lengths[j], j});
    }
    // Steepest first; ties prefer the shorter continuation.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (std::abs(a.angle - b.angle) > 1e-12) return a.angle > b.angle;
      if (a.length != b.length) return a.length < b.length;
      return a.j < b.j;
    });
    for (const auto& c : candidates) {
      const PlanePoint l = ctx.supports[c.j].pos;
      if (!ctx.clear(u, l)) continue;
      // The best continuation is found; whether it yields an end-point is
      // decided here and no other pair is tried.
      const double rise = l.z - u.z, run = u.d - l.d;
      if (rise <= kEps) break;
      const PlanePoint a{u.d + (u.z - t) * run / rise, t};
      if (distance(a, l) + c.length <= ctx.max_length + 1e-9 * std::max(1.0, ctx.max_length) &&
          ctx.clear(a, l)) {
        out.a[i] = a.d;
        out.hooks[i] = static_cast<int>(c.j);
      }
      break;
    }
  }
  return out;
}

/// Right end-points, one slot per support: take-off points whose minimum
/// chain has length exactly L.
inline std::vector<std::optional<double>> right_endpoints(const PlaneContext& ctx,
                                                          const SupportLengths& table) {
  const std::size_t m = ctx.supports.size();
  std::vector<std::optional<double>> out(m);
  const double t = ctx.take_off_z();
  const double L = ctx.max_length;
  const double tol = 1e-9 * std::max(1.0, L);
  for (std::size_t j = 0; j < m; ++j) {
    if (!(table.lengths[j] < L)) continue;
    const PlanePoint l = ctx.supports[j].pos;
    const double rem = L - table.lengths[j];
    const double dz = l.z - t;
    if (dz < -kEps || rem < dz) continue;
    const PlanePoint b{l.d + std::sqrt(std::max(0.0, rem * rem - dz * dz)), t};
    // (a) the extended chain is a valid tether.
    if (!increasing_edge(b, l) || !continues_convexly(ctx, table, b, j) || !ctx.clear(b, l)) continue;
    // (b) no other support gives a strictly shorter chain from b.
    bool dominated = false;
    for (std::size_t k = 0; k < m && !dominated; ++k) {
      if (k == j || table.lengths[k] == kInf) continue;
      const PlanePoint lk = ctx.supports[k].pos;
      if (!increasing_edge(b, lk)) continue;
      if (distance(b, lk) + table.lengths[k] >= L - tol) continue;
      if (!continues_convexly(ctx, table, b, k)) continue;
      dominated = ctx.clear(b, lk);
    }
    if (!dominated) out[j] = b.d;
  }
  return out;
}

/// Sweep the sorted end-points (farthest from T first) into maximal
/// non-visible intervals and return their complement in [0, d_Q].
inline VisIntervals assemble(std::span<const double> lefts, std::span<const double> rights,
                             std::optional<double> d_q) {
  VisIntervals out;
  out.q_reach = d_q;
  if (!d_q) return out;
  const double dq = *d_q;
  struct Event {
    double d;
    bool is_left;
  };
  std::vector<Event> h;
  for (double a : lefts) h.push_back({std::clamp(a, 0.0, dq), true});
  for (double b : rights) h.push_back({std::clamp(b, 0.0, dq), false});
  std::sort(h.begin(), h.end(), [](const Event& x, const Event& y) {
    if (x.d != y.d) return x.d > y.d;
    return x.is_left && !y.is_left;
  });
  // Non-visible pieces as (hi, lo) in d; `closed_hi` marks [Q, B).
  struct Gap {
    double lo, hi;
  };
  std::vector<Gap> gaps;
  std::optional<double> pending_left;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const Event& e = h[k];
    if (e.is_left) {
      pending_left = e.d;  // a later (nearer) left end-point replaces this one
    } else if (pending_left) {
      gaps.push_back({e.d, *pending_left});
      pending_left.reset();
    } else if (k == 0) {
      gaps.push_back({e.d, dq});
    }
  }
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) { return a.lo < b.lo; });
  double cursor = 0.0;
  for (const Gap& g : gaps) {
    if (g.lo > cursor) out.visible.push_back({cursor, g.lo});
    cursor = std::max(cursor, g.hi);
  }
  // [Q, B) excludes Q itself; an (A, B) gap ending at Q leaves Q visible but
  // isolated points are not reported.
  if (dq > cursor) out.visible.push_back({cursor, dq});
  return out;
}

/// Minimum-length chain from take-off point y to T of length <= bound, built
/// from one straight segment plus a support chain.
inline std::optional<Chain> min_taut_chain(PlanePoint y, const PlaneContext& ctx,
                                           const SupportLengths& table, double bound) {
  struct Candidate {
    double length;
    std::size_t k;
  };
  std::vector<Candidate> candidates;
  const double tol = 1e-9 * std::max(1.0, bound);
  for (std::size_t k = 0; k < ctx.supports.size(); ++k) {
    if (table.lengths[k] == kInf) continue;
    const PlanePoint lk = ctx.supports[k].pos;
    if (!increasing_edge(y, lk)) continue;
    const double len = distance(y, lk) + table.lengths[k];
    if (len > bound + tol) continue;
    if (!continues_convexly(ctx, table, y, k)) continue;
    candidates.push_back({len, k});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.length < b.length || (a.length == b.length && a.k < b.k);
  });
  for (const auto& c : candidates) {
    if (!ctx.clear(y, ctx.supports[c.k].pos)) continue;
    Chain chain;
    chain.vertices.push_back(y);
    for (PlanePoint p : support_chain(ctx, table, c.k)) chain.vertices.push_back(p);
    chain.length = c.length;
    return chain;
  }
  return std::nullopt;
}

inline std::optional<Chain> min_taut_chain(PlanePoint y, const PlaneContext& ctx,
                                           const SupportLengths& table) {
  return min_taut_chain(y, ctx, table, ctx.max_length);
}

/// Full result for one half-plane: the query structure, the support table and
/// the visible intervals.
struct PlaneVisibility {
  PlaneContext ctx;
  SupportLengths table;
  LeftEndpoints lefts;
  std::vector<std::optional<double>> rights;
  VisIntervals intervals;

  std::optional<Chain> min_taut_chain(double d) const {
    return marsupial::min_taut_chain({d, ctx.take_off_z()}, ctx, table);
  }
};

inline PlaneVisibility pva2d(const PlanarScene& scene, double max_length) {
  PlaneVisibility pv;
  pv.ctx = make_context(scene, max_length);
  const auto d_q = pv.ctx.q_reach();
  if (!d_q) {
    pv.intervals.q_reach = std::nullopt;
    pv.table = {{0.0}, {-1}};
    return pv;
  }
  pv.table = support_lengths(pv.ctx);
  pv.lefts = left_endpoints(pv.ctx, pv.table);
  pv.rights = right_endpoints(pv.ctx, pv.table);

  std::vector<double> lefts, rights;
  for (const auto& a : pv.lefts.a)
    if (a) lefts.push_back(*a);
  for (const auto& b : pv.rights)
    if (b) rights.push_back(*b);

  // Take-off points inside an obstacle that crosses the take-off line are
  // blocked; its near edge re-opens visibility when reachable from there.
  // Central obstacles reaching above the line close it at T'.
  const double t = pv.ctx.take_off_z();
  for (const Rect2& r : scene.rects) {
    if (r.z_max <= t + kEps) continue;
    if (r.kind.central) {
      rights.push_back(0.0);
      continue;
    }
    if (!(r.z_min < t - kEps && r.z_max > t + kEps)) continue;
    if (r.d_min > *d_q) continue;
    if (marsupial::min_taut_chain({r.d_min, t}, pv.ctx, pv.table)) rights.push_back(r.d_min);
  }
  pv.intervals = assemble(lefts, rights, d_q);
  return pv;
}

/// Debug dump: one CSV row per visible interval.
inline void write_intervals_csv(std::ostream& os, const PlaneFrame& frame,
                                const VisIntervals& vis) {
  for (const auto& iv : vis.visible)
    os << frame.azimuth << ',' << frame.side << ',' << iv.lo << ',' << iv.hi << '\n';
}

/// Structural checks on a chain: increasing, convex, collision-free and the
/// stored length matches the vertices. Returns a description of the first
/// violation, or an empty string.
inline std::string chain_violation(const Chain& chain, std::span<const Rect2> rects) {
  const auto& v = chain.vertices;
  if (v.size() < 2) return "chain needs at least two vertices";
  double len = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!increasing_edge(v[i - 1], v[i])) return "edge " + std::to_string(i) + " is not increasing";
    if (!segment_clear(v[i - 1], v[i], rects)) return "edge " + std::to_string(i) + " collides";
    if (i + 1 < v.size() && !convex_turn(v[i - 1], v[i], v[i + 1]))
      return "vertex " + std::to_string(i) + " is not convex";
    len += distance(v[i - 1], v[i]);
  }
  if (std::abs(len - chain.length) > 1e-9 * std::max(1.0, len)) return "length mismatch";
  return {};
}

}  // namespace marsupial
