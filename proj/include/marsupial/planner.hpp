#pragma once

// MASPA: ground visibility graph augmented with take-off candidates and a
// virtual vertex T', searched with Dijkstra.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "marsupial/catenary.hpp"
#include "marsupial/geometry.hpp"
#include "marsupial/pva2d.hpp"
#include "marsupial/pva3d.hpp"

namespace marsupial {

struct GroundEdge {
  int to = 0;
  double weight = 0.0;
};

/// Vertex layout: [0] = S, then footprint corners, then candidates, then T'
/// (virtual, last).
struct GroundGraph {
  std::vector<Vec2> points;  // T' holds the target's ground point
  std::vector<std::vector<GroundEdge>> adj;
  int first_corner = 1;
  int first_candidate = 1;
  int virtual_target = 0;

  std::size_t vertex_count() const { return points.size(); }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& a : adj) n += a.size();
    return n / 2;
  }
  bool is_candidate(int v) const { return v >= first_candidate && v < virtual_target; }

  void add_edge(int u, int v, double w) {
    adj[static_cast<std::size_t>(u)].push_back({v, w});
    adj[static_cast<std::size_t>(v)].push_back({u, w});
  }
};

/// Builds the augmented graph. Candidate-to-candidate edges are left out: a
/// shortest ground path only bends at footprint corners, so it never needs
/// to pass through a second candidate.
inline GroundGraph build_ground_graph(const Scene& scene, Vec2 start,
                                      const std::vector<CandidateTakeoff>& candidates,
                                      Vec2 target_ground) {
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "no take-off candidates");
  const auto fps = blocking_footprints(scene);
  const std::span<const Footprint> fp(fps);

  GroundGraph g;
  g.points.push_back(start);
  g.first_corner = 1;
  for (const auto& f : fps)
    for (Vec2 c : f.corners()) {
      bool buried = false;
      for (const auto& o : fps) buried = buried || o.contains_strictly(c);
      if (!buried) g.points.push_back(c);
    }
  g.first_candidate = static_cast<int>(g.points.size());
  for (const auto& c : candidates) g.points.push_back(c.x);
  g.virtual_target = static_cast<int>(g.points.size());
  g.points.push_back(target_ground);
  g.adj.assign(g.points.size(), {});

  const int fixed_end = g.first_candidate;
  for (int u = 0; u < fixed_end; ++u)
    for (int v = u + 1; v < g.virtual_target; ++v) {
      const Vec2 a = g.points[static_cast<std::size_t>(u)], b = g.points[static_cast<std::size_t>(v)];
      if (segment_clear(a, b, fp)) g.add_edge(u, v, distance(a, b));
    }
  for (std::size_t k = 0; k < candidates.size(); ++k)
    g.add_edge(g.first_candidate + static_cast<int>(k), g.virtual_target,
               candidates[k].aerial_length);
  return g;
}

struct GraphPath {
  std::vector<int> vertices;
  double length = 0.0;
};

/// Dijkstra from `source` to `sink`. Among equal-length routes each vertex
/// keeps the smallest predecessor index.
inline GraphPath shortest_path(const GroundGraph& g, int source, int sink) {
  const std::size_t n = g.vertex_count();
  std::vector<double> dist(n, kInf);
  std::vector<int> pred(n, -1);
  std::vector<bool> done(n, false);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    const auto su = static_cast<std::size_t>(u);
    if (done[su]) continue;
    done[su] = true;
    for (const auto& e : g.adj[su]) {
      const auto sv = static_cast<std::size_t>(e.to);
      if (done[sv]) continue;
      const double nd = du + e.weight;
      if (nd < dist[sv] || (nd == dist[sv] && u < pred[sv])) {
        const bool improved = nd < dist[sv];
        dist[sv] = nd;
        pred[sv] = u;
        if (improved) heap.push({nd, e.to});
      }
    }
  }
  const auto st = static_cast<std::size_t>(sink);
  if (dist[st] == kInf) throw Error(ErrorCode::kUnreachable, "target not reachable");
  GraphPath out;
  out.length = dist[st];
  for (int v = sink; v != -1; v = pred[static_cast<std::size_t>(v)]) out.vertices.push_back(v);
  std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

struct PlannerParams {
  int p = 16;
  int q = 30;
  int c = 26;
  TetherMode mode = TetherMode::kCatenary;
  bool use_pva = true;
  unsigned threads = 0;  // 0 = all cores

  void validate() const {
    if (p < 1 || q < 1 || c < 1)
      throw Error(ErrorCode::kInvalidInput, "p, q and c must be at least 1");
  }
};

struct StageTimings {
  double slice_s = 0.0;
  double pva_s = 0.0;
  double cand_s = 0.0;
  double graph_s = 0.0;
  double search_s = 0.0;
  double total_s = 0.0;
};

struct PlanResult {
  std::string planner = "maspa";
  int target_index = 0;
  Point3 target;
  Vec2 start;
  std::vector<Vec2> ground_path;
  CandidateTakeoff takeoff;
  std::vector<Point3> aerial_path;
  double ground_length = 0.0;
  double aerial_length = 0.0;
  double tl = 0.0;
  StageTimings timings;
  PlannerParams params;
  std::size_t candidate_count = 0;
  std::vector<std::pair<std::string, std::string>> metadata;
};

namespace detail {

/// Half-plane data without running the visibility passes: only what the
/// per-candidate checks need.
inline HalfPlaneResult bare_plane(const Scene& scene, const PlaneFrame& frame, TetherMode mode) {
  HalfPlaneResult out;
  out.frame = frame;
  out.vis.ctx = make_context(slice(scene, frame), scene.params.L);
  if (mode == TetherMode::kTaut && out.vis.ctx.q_reach())
    out.vis.table = support_lengths(out.vis.ctx);
  else
    out.vis.table = {{0.0}, {-1}};
  return out;
}

/// Candidate at the start itself, on the half-plane of the beam that holds
/// it. With the visibility filter on, S must lie in a visible interval.
inline std::optional<CandidateTakeoff> start_candidate(const Scene& scene,
                                                       const std::vector<HalfPlaneResult>& planes,
                                                       Vec2 s, const SamplingParams& sp,
                                                       bool filtered) {
  const Vec2 origin = planes.empty() ? Vec2{} : planes.front().frame.origin;
  const double d = distance(s, origin);
  std::size_t best = planes.size();
  double best_gap = kInf;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const Vec2 g = planes[i].frame.ground_at(d);
    const double gap = distance(g, s);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  if (best == planes.size() || best_gap > 1e-6) return std::nullopt;
  const HalfPlaneResult& plane = planes[best];
  if (filtered) {
    if (!plane.vis.intervals.contains(d)) return std::nullopt;
  } else {
    const auto d_q = plane.vis.ctx.q_reach();
    if (!d_q || d > *d_q) return std::nullopt;
  }
  const auto fps = blocking_footprints(scene);
  auto c = make_candidate(plane, d, scene, fps, sp);
  if (c) {
    c->x = s;
    c->y = {s.x, s.y, scene.params.take_off_height()};
  }
  return c;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Plans from `start` to target `target_index`.
inline PlanResult maspa_plan(const Scene& scene, std::size_t target_index,
                             const PlannerParams& params, std::optional<Vec2> start = {}) {
  using Clock = std::chrono::steady_clock;
  params.validate();
  if (target_index >= scene.targets.size())
    throw Error(ErrorCode::kInvalidInput, "target index out of range");
  const auto t_begin = Clock::now();
  const Point3 target = scene.targets[target_index];
  const Vec2 s = start.value_or(scene.start.ground());

  PlanResult res;
  res.planner = params.use_pva ? "maspa" : "maspa-minus";
  res.target_index = static_cast<int>(target_index);
  res.target = target;
  res.start = s;
  res.params = params;

  const auto beam = plane_beam(target, params.p, beam_phase(target, s, params.p));
  const SamplingParams sp{params.q, params.mode, params.c};
  std::vector<HalfPlaneResult> planes;
  std::vector<CandidateTakeoff> candidates;
  if (params.use_pva) {
    BeamTimings bt;
    planes = pva3d(scene, target, beam, params.threads, &bt);
    res.timings.slice_s = bt.slice_s;
    res.timings.pva_s = bt.pva_s;
    auto t0 = Clock::now();
    candidates = sample_candidates(planes, scene, sp, params.threads);
    res.timings.cand_s = detail::seconds_since(t0);
  } else {
    auto t0 = Clock::now();
    planes.resize(beam.size());
    detail::parallel_for(beam.size(), params.threads, [&](std::size_t i) {
      PlaneFrame f = beam[i];
      planes[i] = detail::bare_plane(scene, f, params.mode);
    });
    res.timings.slice_s = detail::seconds_since(t0);
    t0 = Clock::now();
    const auto fps = blocking_footprints(scene);
    std::vector<std::vector<CandidateTakeoff>> per(planes.size());
    detail::parallel_for(planes.size(), params.threads, [&](std::size_t i) {
      per[i] = plane_candidates_unfiltered(planes[i], scene, fps, sp);
    });
    for (auto& v : per)
      for (auto& c : v) candidates.push_back(std::move(c));
    res.timings.cand_s = detail::seconds_since(t0);
  }
  {
    // Taking off without moving is always worth a candidate.
    auto t0 = Clock::now();
    if (auto c = detail::start_candidate(scene, planes, s, sp, params.use_pva))
      candidates.push_back(std::move(*c));
    res.timings.cand_s += detail::seconds_since(t0);
  }
  res.candidate_count = candidates.size();
  // No feasible take-off point at all means the target cannot be reached.
  if (candidates.empty()) throw Error(ErrorCode::kUnreachable, "no feasible take-off point");

  auto t0 = Clock::now();
  const GroundGraph g = build_ground_graph(scene, s, candidates, target.ground());
  res.timings.graph_s = detail::seconds_since(t0);
  t0 = Clock::now();
  const GraphPath path = shortest_path(g, 0, g.virtual_target);
  res.timings.search_s = detail::seconds_since(t0);

  const int last = path.vertices[path.vertices.size() - 2];
  res.takeoff = candidates[static_cast<std::size_t>(last - g.first_candidate)];
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    res.ground_path.push_back(g.points[static_cast<std::size_t>(path.vertices[i])]);
  res.ground_length = polyline_length(std::span<const Vec2>(res.ground_path));
  res.aerial_length = res.takeoff.aerial_length;
  res.aerial_path = res.takeoff.aerial_path();
  res.tl = res.ground_length + res.aerial_length;
  res.timings.total_s = detail::seconds_since(t_begin);
  res.metadata.emplace_back("half_planes", std::to_string(beam.size()));
  return res;
}

/// One plan per target in order; each starts where the previous UAV took
/// off. The UAV's return flight is not added to any TL.
inline std::vector<PlanResult> plan_sequential(const Scene& scene, const PlannerParams& params) {
  std::vector<PlanResult> out;
  Vec2 start = scene.start.ground();
  for (std::size_t k = 0; k < scene.targets.size(); ++k) {
    try {
      out.push_back(maspa_plan(scene, k, params, start));
    } catch (const Error& e) {
      throw Error(e.code(), "target " + std::to_string(k) + ": " + e.what());
    }
    out.back().metadata.emplace_back("retrace_included", "false");
    start = out.back().takeoff.x;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent validator
// ---------------------------------------------------------------------------

namespace detail {

// Open-box test for a 3D segment, shrunk by kEps.
inline bool segment3_hits_box(const Point3& a, const Point3& b, const Cuboid& c) {
  double t0 = 0.0, t1 = 1.0;
  const double o[3] = {a.x, a.y, a.z}, u[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
  const double lo[3] = {c.min_corner.x + kEps, c.min_corner.y + kEps, c.min_corner.z + kEps};
  const double hi[3] = {c.max_corner.x - kEps, c.max_corner.y - kEps, c.max_corner.z - kEps};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(u[k]) < 1e-300) {
      if (o[k] <= lo[k] || o[k] >= hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - o[k]) / u[k], tb = (hi[k] - o[k]) / u[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  return true;
}

}  // namespace detail

/// Re-checks a plan against the raw scene: path ends, sweep clearance of the
/// ground legs, aerial clearance, tether length and TL bookkeeping. Returns
/// one message per violation. The ground path is checked against `start`,
/// or the start recorded in the plan.
inline std::vector<std::string> plan_violations(const Scene& scene, const PlanResult& plan,
                                                std::optional<Vec2> start = {}) {
  std::vector<std::string> out;
  const double tol = 1e-6;
  const Vec2 s = start.value_or(plan.start);
  const auto inflated = scene.inflated_obstacles();
  const double top = scene.params.take_off_height();
  const Point3 target = plan.target;

  if (plan.ground_path.empty()) {
    out.emplace_back("empty ground path");
    return out;
  }
  if (distance(plan.ground_path.front(), s) > tol) out.emplace_back("ground path does not start at S");
  if (distance(plan.ground_path.back(), plan.takeoff.x) > tol)
    out.emplace_back("ground path does not end at the take-off point");
  for (std::size_t i = 0; i + 1 < plan.ground_path.size(); ++i) {
    const Vec2 a = plan.ground_path[i], b = plan.ground_path[i + 1];
    for (const auto& c : inflated) {
      if (!(c.min_corner.z < top - kEps && c.max_corner.z > kEps)) continue;
      if (segment_hits_box(a.x, a.y, b.x, b.y, c.min_corner.x, c.min_corner.y, c.max_corner.x,
                           c.max_corner.y)) {
        out.push_back("ground leg " + std::to_string(i) + " hits an obstacle");
        break;
      }
    }
  }
  const double ground = polyline_length(std::span<const Vec2>(plan.ground_path));
  if (std::abs(ground - plan.ground_length) > 1e-9 * std::max(1.0, ground))
    out.emplace_back("ground length mismatch");

  const Point3 y{plan.takeoff.x.x, plan.takeoff.x.y, top};
  if (plan.aerial_path.empty()) {
    out.emplace_back("empty aerial path");
    return out;
  }
  if (distance(plan.aerial_path.front(), y) > tol)
    out.emplace_back("aerial path does not start above the take-off point");
  if (distance(plan.aerial_path.back(), target) > tol)
    out.emplace_back("aerial path does not end at T");
  if (plan.aerial_length > scene.params.L + 1e-9 * std::max(1.0, scene.params.L))
    out.emplace_back("tether longer than L");

  if (plan.takeoff.curve) {
    // Re-solve the curve from its anchors and length, then probe densely.
    const Catenary& c0 = *plan.takeoff.curve;
    Catenary c;
    try {
      c = solve_catenary(c0.p1, c0.p2, plan.aerial_length);
    } catch (const Error& e) {
      out.push_back(std::string("catenary does not solve: ") + e.what());
      return out;
    }
    const int n = 2000;
    for (int k = 0; k <= n; ++k) {
      const double d = c.p1.d + (c.p2.d - c.p1.d) * k / n;
      const Point3 w = plan.takeoff.frame.world_at({d, c.z_at(d)});
      if (w.z < -tol) {
        out.emplace_back("catenary goes below the ground");
        break;
      }
      bool hit = false;
      for (const auto& box : inflated) hit = hit || box.contains_strictly(w);
      if (hit) {
        out.emplace_back("catenary passes through an obstacle");
        break;
      }
    }
  } else {
    for (std::size_t i = 0; i + 1 < plan.aerial_path.size(); ++i)
      for (const auto& box : inflated)
        if (detail::segment3_hits_box(plan.aerial_path[i], plan.aerial_path[i + 1], box)) {
          out.push_back("aerial segment " + std::to_string(i) + " hits an obstacle");
          i = plan.aerial_path.size();
          break;
        }
    const double aerial = polyline_length(std::span<const Point3>(plan.aerial_path));
    if (std::abs(aerial - plan.aerial_length) > 1e-6 * std::max(1.0, aerial))
      out.emplace_back("aerial length mismatch");
  }
  if (std::abs(plan.tl - (plan.ground_length + plan.aerial_length)) > 1e-9 * std::max(1.0, plan.tl))
    out.emplace_back("TL is not ground + aerial length");
  return out;
}

}  // namespace marsupial
