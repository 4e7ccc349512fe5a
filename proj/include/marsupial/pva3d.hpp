#pragma once

// Approximate 3D take-off locus: PVA-2D on a beam of vertical half-planes
// through the target, then discrete take-off candidates on the visible
// intervals.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "marsupial/catenary.hpp"
#include "marsupial/geometry.hpp"
#include "marsupial/pva2d.hpp"

namespace marsupial {

enum class TetherMode { kTaut, kCatenary };

inline const char* to_string(TetherMode m) {
  return m == TetherMode::kTaut ? "taut" : "catenary";
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes
/// only its own slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Azimuth offset that puts the start inside one of the half-planes.
inline double beam_phase(const Point3& target, Vec2 start, int p) {
  const Vec2 v = start - target.ground();
  if (norm(v) <= kEps || p < 1) return 0.0;
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return std::fmod(a, std::numbers::pi / p);
}

/// 2p half-planes: full plane k at azimuth phase + k*pi/p, side 1 facing the
/// opposite way. Ordered by (k, side).
inline std::vector<PlaneFrame> plane_beam(const Point3& target, int p, double phase = 0.0) {
  std::vector<PlaneFrame> out;
  if (p < 1) return out;
  out.reserve(static_cast<std::size_t>(2 * p));
  const double two_pi = 2.0 * std::numbers::pi;
  for (int k = 0; k < p; ++k)
    for (int side = 0; side < 2; ++side) {
      PlaneFrame f;
      f.origin = target.ground();
      f.target_2d = {0.0, target.z};
      f.plane_index = k;
      f.side = side;
      double a = phase + k * std::numbers::pi / p + side * std::numbers::pi;
      a = std::fmod(a, two_pi);
      if (a < 0.0) a += two_pi;
      f.azimuth = a;
      out.push_back(f);
    }
  return out;
}

struct HalfPlaneResult {
  PlaneFrame frame;
  PlaneVisibility vis;
};

struct BeamTimings {
  double slice_s = 0.0;
  double pva_s = 0.0;
};

/// Slice and run PVA-2D in every half-plane of the beam.
inline std::vector<HalfPlaneResult> pva3d(const Scene& scene, const Point3& target,
                                          const std::vector<PlaneFrame>& beam,
                                          unsigned threads = 0, BeamTimings* timings = nullptr) {
  using Clock = std::chrono::steady_clock;
  std::vector<PlanarScene> slices(beam.size());
  auto t0 = Clock::now();
  detail::parallel_for(beam.size(), threads, [&](std::size_t i) {
    PlaneFrame f = beam[i];
    f.origin = target.ground();
    f.target_2d = {0.0, target.z};
    slices[i] = slice(scene, f);
  });
  auto t1 = Clock::now();
  std::vector<HalfPlaneResult> out(beam.size());
  detail::parallel_for(beam.size(), threads, [&](std::size_t i) {
    out[i].frame = slices[i].frame;
    out[i].vis = pva2d(slices[i], scene.params.L);
  });
  auto t2 = Clock::now();
  if (timings) {
    timings->slice_s = std::chrono::duration<double>(t1 - t0).count();
    timings->pva_s = std::chrono::duration<double>(t2 - t1).count();
  }
  return out;
}

inline std::vector<HalfPlaneResult> pva3d(const Scene& scene, const Point3& target, int p,
                                          unsigned threads = 0) {
  return pva3d(scene, target, plane_beam(target, p, beam_phase(target, scene.start.ground(), p)),
               threads);
}

/// Take-off candidate Y = top(X) on one half-plane.
struct CandidateTakeoff {
  PlaneFrame frame;
  double d = 0.0;
  Vec2 x;
  Point3 y;
  double aerial_length = 0.0;
  TetherMode mode = TetherMode::kTaut;
  std::optional<Chain> chain;       // taut mode
  std::optional<Catenary> curve;    // catenary mode

  int plane_index() const { return frame.plane_index; }
  int side() const { return frame.side; }

  /// Aerial path in world coordinates, catenaries sampled at n points.
  std::vector<Point3> aerial_path(int n = 128) const {
    std::vector<Point3> out;
    if (chain) {
      for (PlanePoint p : chain->vertices) out.push_back(frame.world_at(p));
    } else if (curve) {
      auto pts = curve->sample(n);
      // Samples run by increasing d; the path starts at the take-off point.
      const PlanePoint start{d, y.z};
      if (distance(pts.front(), start) > distance(pts.back(), start))
        std::reverse(pts.begin(), pts.end());
      for (PlanePoint p : pts) out.push_back(frame.world_at(p));
    }
    return out;
  }
};

struct SamplingParams {
  int q = 30;
  TetherMode mode = TetherMode::kCatenary;
  int c = 26;
};

/// q positions spread over the union of the intervals. Each interval keeps
/// both end-points; the rest is shared in proportion to length.
inline std::vector<double> spread_points(const std::vector<Interval>& intervals, int q) {
  std::vector<double> out;
  if (intervals.empty()) return out;
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.length();
  const std::size_t m = intervals.size();
  std::vector<int> counts(m, 0);
  if (total <= kEps) {
    for (const auto& iv : intervals) out.push_back(iv.lo);
    return out;
  }
  // Largest-remainder apportionment of q over the lengths.
  std::vector<double> rem(m);
  int used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double share = q * intervals[i].length() / total;
    counts[i] = static_cast<int>(std::floor(share));
    rem[i] = share - counts[i];
    used += counts[i];
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; used < q && k < m; ++k, ++used) ++counts[order[k]];
  for (std::size_t i = 0; i < m; ++i) {
    const Interval& iv = intervals[i];
    if (iv.length() <= kEps) {
      out.push_back(iv.lo);
      continue;
    }
    const int n = std::max(counts[i], 2);
    for (int k = 0; k < n; ++k) out.push_back(iv.lo + iv.length() * k / (n - 1));
    out.back() = iv.hi;
  }
  return out;
}

namespace detail {

inline bool inside_bounds(Vec2 x, const Cuboid& bounds) {
  return x.x >= bounds.min_corner.x - kEps && x.x <= bounds.max_corner.x + kEps &&
         x.y >= bounds.min_corner.y - kEps && x.y <= bounds.max_corner.y + kEps;
}

/// Candidate at d with its minimum tether, or nothing when infeasible.
inline std::optional<CandidateTakeoff> make_candidate(const HalfPlaneResult& plane, double d,
                                                      const Scene& scene,
                                                      std::span<const Footprint> footprints,
                                                      const SamplingParams& params) {
  CandidateTakeoff c;
  c.frame = plane.frame;
  c.d = d;
  c.x = plane.frame.ground_at(d);
  if (!inside_bounds(c.x, scene.bounds)) return std::nullopt;
  for (const auto& f : footprints)
    if (f.contains_strictly(c.x)) return std::nullopt;
  const double t = scene.params.take_off_height();
  c.y = {c.x.x, c.x.y, t};
  c.mode = params.mode;
  const PlanePoint y{d, t};
  if (params.mode == TetherMode::kTaut) {
    auto chain = marsupial::min_taut_chain(y, plane.vis.ctx, plane.vis.table);
    if (!chain) return std::nullopt;
    c.aerial_length = chain->length;
    c.chain = std::move(chain);
  } else {
    auto tether = min_catenary(y, plane.vis.ctx.target(), scene.params.L, params.c,
                               plane.vis.ctx.scene.rects);
    if (!tether) return std::nullopt;
    c.aerial_length = tether->length;
    c.curve = tether->curve;
  }
  return c;
}

}  // namespace detail

/// Candidates on the p-visible intervals of one half-plane.
inline std::vector<CandidateTakeoff> plane_candidates(const HalfPlaneResult& plane,
                                                      const Scene& scene,
                                                      std::span<const Footprint> footprints,
                                                      const SamplingParams& params) {
  std::vector<CandidateTakeoff> out;
  for (double d : spread_points(plane.vis.intervals.visible, params.q))
    if (auto c = detail::make_candidate(plane, d, scene, footprints, params))
      out.push_back(std::move(*c));
  return out;
}

/// Candidates evenly spaced over [0, d_Q], each checked on its own (no
/// visibility filter).
inline std::vector<CandidateTakeoff> plane_candidates_unfiltered(
    const HalfPlaneResult& plane, const Scene& scene, std::span<const Footprint> footprints,
    const SamplingParams& params) {
  std::vector<CandidateTakeoff> out;
  const auto d_q = plane.vis.ctx.q_reach();
  if (!d_q) return out;
  for (double d : spread_points({Interval{0.0, *d_q}}, params.q))
    if (auto c = detail::make_candidate(plane, d, scene, footprints, params))
      out.push_back(std::move(*c));
  return out;
}

/// Candidates over every half-plane, concatenated in beam order.
inline std::vector<CandidateTakeoff> sample_candidates(const std::vector<HalfPlaneResult>& planes,
                                                       const Scene& scene,
                                                       const SamplingParams& params,
                                                       unsigned threads = 0) {
  const auto footprints = blocking_footprints(scene);
  std::vector<std::vector<CandidateTakeoff>> per(planes.size());
  detail::parallel_for(planes.size(), threads, [&](std::size_t i) {
    per[i] = plane_candidates(planes[i], scene, footprints, params);
  });
  std::vector<CandidateTakeoff> out;
  for (auto& v : per)
    for (auto& c : v) out.push_back(std::move(c));
  return out;
}

/// One CSV row per candidate: azimuth, side, d, x, y, aerial_length, mode.
inline void write_candidates_csv(std::ostream& os, const std::vector<CandidateTakeoff>& cands) {
  os << "azimuth,side,d,x,y,aerial_length,mode\n";
  for (const auto& c : cands)
    os << c.frame.azimuth << ',' << c.side() << ',' << c.d << ',' << c.x.x << ',' << c.x.y << ','
       << c.aerial_length << ',' << to_string(c.mode) << '\n';
}

}  // namespace marsupial
