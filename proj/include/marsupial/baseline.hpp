#pragma once

// RRT* baseline: grow a ground tree from S and score every node by its cost
// from S plus the shortest catenary from the take-off point above it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "marsupial/catenary.hpp"
#include "marsupial/geometry.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/pva3d.hpp"
#include "marsupial/rng.hpp"

namespace marsupial {

struct RrtParams {
  double budget_s = 20.0;
  double step = 2.0;
  double rewire_gamma = 0.0;  // <= 0: 2 * sqrt(free area / pi)
  std::uint64_t seed = 0;
  int c = 26;
  std::size_t max_iterations = 0;  // 0 = only the time budget stops the run

  void validate() const {
    if (!(budget_s > 0.0)) throw Error(ErrorCode::kInvalidInput, "budget must be > 0");
    if (!(step > 0.0)) throw Error(ErrorCode::kInvalidInput, "step must be > 0");
    if (c < 1) throw Error(ErrorCode::kInvalidInput, "c must be at least 1");
  }
};

struct RrtNode {
  Vec2 x;
  int parent = -1;
  double cost = 0.0;
  std::optional<double> aerial;  // empty when not c-visible
  std::vector<int> children;
};

struct RrtRun {
  PlanResult plan;
  std::vector<RrtNode> nodes;
  std::vector<double> best_history;  // best score after each improvement
  std::size_t iterations = 0;
  double rewire_gamma = 0.0;
};

namespace detail {

// Bucket grid over the ground for nearest and radius queries.
class PointGrid {
 public:
  PointGrid(Vec2 lo, double cell) : lo_(lo), cell_(cell) {}

  void insert(Vec2 p, int id) { cells_[key(cx(p.x), cy(p.y))].push_back(id); }

  template <class Fn>
  void for_each_within(Vec2 p, double radius, Fn&& fn) const {
    const long r = static_cast<long>(std::ceil(radius / cell_));
    const long ix = cx(p.x), iy = cy(p.y);
    for (long i = ix - r; i <= ix + r; ++i)
      for (long j = iy - r; j <= iy + r; ++j) {
        auto it = cells_.find(key(i, j));
        if (it == cells_.end()) continue;
        for (int id : it->second) fn(id);
      }
  }

  /// Nearest stored point by expanding rings; ties to the smaller id.
  int nearest(Vec2 p, const std::vector<RrtNode>& nodes) const {
    const long ix = cx(p.x), iy = cy(p.y);
    int best = -1;
    double best_d = kInf;
    for (long r = 0;; ++r) {
      for (long i = ix - r; i <= ix + r; ++i)
        for (long j = iy - r; j <= iy + r; ++j) {
          if (std::max(std::abs(i - ix), std::abs(j - iy)) != r) continue;
          auto it = cells_.find(key(i, j));
          if (it == cells_.end()) continue;
          for (int id : it->second) {
            const double d = distance(nodes[static_cast<std::size_t>(id)].x, p);
            if (d < best_d || (d == best_d && id < best)) {
              best_d = d;
              best = id;
            }
          }
        }
      // Points in ring r + 1 and beyond are at least r * cell away.
      if (best >= 0 && best_d <= r * cell_) return best;
      if (r > 100000) return best;
    }
  }

 private:
  long cx(double x) const { return static_cast<long>(std::floor((x - lo_.x) / cell_)); }
  long cy(double y) const { return static_cast<long>(std::floor((y - lo_.y) / cell_)); }
  static long long key(long i, long j) { return (static_cast<long long>(i) << 32) ^ (j & 0xffffffffLL); }

  Vec2 lo_;
  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

inline double free_ground_area(const Scene& scene, std::span<const Footprint> fps) {
  const auto& b = scene.bounds;
  double area = (b.max_corner.x - b.min_corner.x) * (b.max_corner.y - b.min_corner.y);
  for (const auto& f : fps) {
    const double w = std::min(f.x_max, b.max_corner.x) - std::max(f.x_min, b.min_corner.x);
    const double h = std::min(f.y_max, b.max_corner.y) - std::max(f.y_min, b.min_corner.y);
    if (w > 0 && h > 0) area -= w * h;
  }
  return std::max(area, 1.0);
}

}  // namespace detail

/// Shortest catenary from the take-off point above x, on x's own plane
/// through the target.
inline std::optional<CandidateTakeoff> rrt_aerial(const Scene& scene, const Point3& target,
                                                  Vec2 x, int c) {
  const PlaneFrame frame = frame_through(target, x);
  const double d = distance(x, target.ground());
  const double t = scene.params.take_off_height();
  const PlanePoint y{d, t};
  if (distance(y, frame.target_2d) > scene.params.L + kEps) return std::nullopt;
  const PlanarScene plane = slice(scene, frame);
  auto tether = min_catenary(y, frame.target_2d, scene.params.L, c, plane.rects);
  if (!tether) return std::nullopt;
  CandidateTakeoff cand;
  cand.frame = frame;
  cand.d = d;
  cand.x = x;
  cand.y = {x.x, x.y, t};
  cand.aerial_length = tether->length;
  cand.mode = TetherMode::kCatenary;
  cand.curve = tether->curve;
  return cand;
}

inline RrtRun rrt_star_run(const Scene& scene, std::size_t target_index, const RrtParams& params,
                           std::optional<Vec2> start = {}) {
  using Clock = std::chrono::steady_clock;
  params.validate();
  if (target_index >= scene.targets.size())
    throw Error(ErrorCode::kInvalidInput, "target index out of range");
  const auto t_begin = Clock::now();
  const Point3 target = scene.targets[target_index];
  const auto fps = blocking_footprints(scene);
  const std::span<const Footprint> fp(fps);
  const auto& b = scene.bounds;
  const Vec2 s = start.value_or(scene.start.ground());

  RrtRun run;
  run.rewire_gamma = params.rewire_gamma > 0.0
                         ? params.rewire_gamma
                         : 2.0 * std::sqrt(detail::free_ground_area(scene, fp) / std::numbers::pi);
  Rng rng(params.seed);
  detail::PointGrid grid({b.min_corner.x, b.min_corner.y}, params.step);
  auto& nodes = run.nodes;

  int best = -1;
  double best_score = kInf;
  auto consider = [&](int id) {
    const auto& n = nodes[static_cast<std::size_t>(id)];
    if (!n.aerial) return;
    const double score = n.cost + *n.aerial;
    if (score < best_score) {
      best_score = score;
      best = id;
      run.best_history.push_back(score);
    }
  };
  auto add_node = [&](Vec2 x, int parent, double cost) {
    RrtNode n;
    n.x = x;
    n.parent = parent;
    n.cost = cost;
    if (auto a = rrt_aerial(scene, target, x, params.c)) n.aerial = a->aerial_length;
    nodes.push_back(std::move(n));
    const int id = static_cast<int>(nodes.size()) - 1;
    if (parent >= 0) nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    grid.insert(x, id);
    consider(id);
    return id;
  };
  // Shift a subtree's costs after its root got a cheaper parent.
  auto propagate = [&](int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      const auto& nu = nodes[static_cast<std::size_t>(u)];
      for (int v : nu.children) {
        auto& nv = nodes[static_cast<std::size_t>(v)];
        nv.cost = nu.cost + distance(nu.x, nv.x);
        consider(v);
        stack.push_back(v);
      }
    }
  };

  add_node(s, -1, 0.0);
  for (;;) {
    if (params.max_iterations && run.iterations >= params.max_iterations) break;
    if ((run.iterations & 63) == 0 &&
        std::chrono::duration<double>(Clock::now() - t_begin).count() >= params.budget_s)
      break;
    ++run.iterations;
    Vec2 sample{rng.uniform(b.min_corner.x, b.max_corner.x),
                rng.uniform(b.min_corner.y, b.max_corner.y)};
    bool blocked = false;
    for (const auto& f : fps) blocked = blocked || f.contains_strictly(sample);
    if (blocked) continue;
    const int near_id = grid.nearest(sample, nodes);
    const Vec2 from = nodes[static_cast<std::size_t>(near_id)].x;
    const double len = distance(from, sample);
    if (len <= kEps) continue;
    const Vec2 x = len > params.step ? from + (params.step / len) * (sample - from) : sample;
    if (!segment_clear(from, x, fp)) continue;

    const double n_nodes = static_cast<double>(nodes.size() + 1);
    const double radius =
        std::min(4.0 * params.step, run.rewire_gamma * std::sqrt(std::log(n_nodes) / n_nodes));
    std::vector<int> near;
    grid.for_each_within(x, radius, [&](int id) {
      if (distance(nodes[static_cast<std::size_t>(id)].x, x) <= radius) near.push_back(id);
    });
    std::sort(near.begin(), near.end());

    int parent = near_id;
    double cost = nodes[static_cast<std::size_t>(near_id)].cost + distance(from, x);
    for (int id : near) {
      const auto& n = nodes[static_cast<std::size_t>(id)];
      const double cand = n.cost + distance(n.x, x);
      if (cand < cost && segment_clear(n.x, x, fp)) {
        cost = cand;
        parent = id;
      }
    }
    const int nid = add_node(x, parent, cost);
    for (int id : near) {
      if (id == parent) continue;
      auto& n = nodes[static_cast<std::size_t>(id)];
      const double cand = cost + distance(x, n.x);
      if (cand + kEps < n.cost && segment_clear(x, n.x, fp)) {
        auto& old = nodes[static_cast<std::size_t>(n.parent)].children;
        old.erase(std::remove(old.begin(), old.end(), id), old.end());
        n.parent = nid;
        n.cost = cand;
        nodes[static_cast<std::size_t>(nid)].children.push_back(id);
        consider(id);
        propagate(id);
      }
    }
  }

  if (best < 0) throw Error(ErrorCode::kUnreachable, "no c-visible node within the budget");
  PlanResult& res = run.plan;
  res.planner = "rrt_star";
  res.target_index = static_cast<int>(target_index);
  res.target = target;
  res.start = s;
  for (int v = best; v >= 0; v = nodes[static_cast<std::size_t>(v)].parent)
    res.ground_path.push_back(nodes[static_cast<std::size_t>(v)].x);
  std::reverse(res.ground_path.begin(), res.ground_path.end());
  res.takeoff = *rrt_aerial(scene, target, nodes[static_cast<std::size_t>(best)].x, params.c);
  res.ground_length = polyline_length(std::span<const Vec2>(res.ground_path));
  res.aerial_length = res.takeoff.aerial_length;
  res.aerial_path = res.takeoff.aerial_path();
  res.tl = res.ground_length + res.aerial_length;
  res.params.c = params.c;
  res.params.mode = TetherMode::kCatenary;
  res.candidate_count = nodes.size();
  res.timings.search_s = std::chrono::duration<double>(Clock::now() - t_begin).count();
  res.timings.total_s = res.timings.search_s;
  res.metadata.emplace_back("step_m", std::to_string(params.step));
  res.metadata.emplace_back("rewire_gamma", std::to_string(run.rewire_gamma));
  res.metadata.emplace_back("seed", std::to_string(params.seed));
  res.metadata.emplace_back("iterations", std::to_string(run.iterations));
  return run;
}

inline PlanResult rrt_star_plan(const Scene& scene, std::size_t target_index,
                                const RrtParams& params, std::optional<Vec2> start = {}) {
  return rrt_star_run(scene, target_index, params, start).plan;
}

}  // namespace marsupial
