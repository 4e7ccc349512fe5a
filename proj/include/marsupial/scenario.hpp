#pragma once

// Scene generators (random study scenes, the fireplace and balconies
// reconstructions) and the benchmark harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "marsupial/baseline.hpp"
#include "marsupial/geometry.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/pva3d.hpp"
#include "marsupial/rng.hpp"

namespace marsupial {

struct ScenarioSpec {
  double box_x = 50.0, box_y = 50.0, box_z = 40.0;
  int ground_count = 10;
  int aerial_count = 15;
  double side = 5.0;
  double target_min_z = 25.0;
  double target_max_z = 40.0;
  double aerial_base_max = 30.0;  // aerial bases are uniform in [h, this]
  double start_offset = 1.0;      // S sits this far from the (0, 0) corner
  MarsupialParams params;
  std::uint64_t seed = 0;

  void validate() const {
    params.validate();
    if (ground_count < 0 || aerial_count < 0)
      throw Error(ErrorCode::kInvalidInput, "obstacle counts must be >= 0");
    if (!(side > 0.0)) throw Error(ErrorCode::kInvalidInput, "side must be > 0");
    if (!(box_x > side && box_y > side && box_z > side))
      throw Error(ErrorCode::kInvalidInput, "box too small for the cubes");
    if (!(target_min_z <= target_max_z && target_min_z > params.h))
      throw Error(ErrorCode::kInvalidInput, "bad target height range");
    if (!(aerial_base_max >= params.h))
      throw Error(ErrorCode::kInvalidInput, "aerial bases must allow z >= h");
  }
};

inline constexpr int kMaxGenerationAttempts = 100000;

/// Seeded study scene: ground cubes on z = 0, aerial cubes with bases in
/// [h, aerial_base_max], all pairwise disjoint, S near the origin corner and
/// T anywhere above target_min_z clear of the inflated obstacles.
inline Scene random_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Scene sc;
  sc.params = spec.params;
  sc.bounds = {{0.0, 0.0, 0.0}, {spec.box_x, spec.box_y, spec.box_z}};
  sc.start = {spec.start_offset, spec.start_offset, 0.0};
  const double r = spec.params.r;
  int attempts = 0;

  auto place = [&](bool ground) {
    for (;;) {
      if (++attempts > kMaxGenerationAttempts)
        throw Error(ErrorCode::kGenerationFailed, "rejection sampling exhausted");
      const double x = rng.uniform(0.0, spec.box_x - spec.side);
      const double y = rng.uniform(0.0, spec.box_y - spec.side);
      const double z = ground ? 0.0 : rng.uniform(spec.params.h, spec.aerial_base_max);
      const Cuboid c{{x, y, z}, {x + spec.side, y + spec.side, z + spec.side}};
      bool ok = true;
      for (const auto& o : sc.obstacles) ok = ok && !o.overlaps(c);
      const Cuboid inf = inflate(c, r);
      if (ok && blocks_ugv(inf, spec.params)) {
        const Vec2 s = sc.start.ground();
        ok = !(s.x > inf.min_corner.x && s.x < inf.max_corner.x && s.y > inf.min_corner.y &&
               s.y < inf.max_corner.y);
      }
      if (ok) {
        sc.obstacles.push_back(c);
        return;
      }
    }
  };
  for (int i = 0; i < spec.ground_count; ++i) place(true);
  for (int i = 0; i < spec.aerial_count; ++i) place(false);

  const auto inflated = sc.inflated_obstacles();
  for (;;) {
    if (++attempts > kMaxGenerationAttempts)
      throw Error(ErrorCode::kGenerationFailed, "no free target position");
    const Point3 t{rng.uniform(0.0, spec.box_x), rng.uniform(0.0, spec.box_y),
                   rng.uniform(spec.target_min_z, spec.target_max_z)};
    bool free = true;
    for (const auto& c : inflated) free = free && !c.contains(t);
    if (free) {
      sc.targets.push_back(t);
      break;
    }
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Realistic scenes. Dimensions are fixed here and only meant to reproduce the
// qualitative layout: a target inside a chimney shaft, reached from the room
// below through the fireplace opening, and a building whose balconies are
// reachable only through the gap under the slab above.
// ---------------------------------------------------------------------------

namespace fireplace {
inline constexpr double kRoomMin = 34.0, kRoomMax = 46.0;  // square room
inline constexpr double kWall = 0.5, kWallHeight = 5.0;
inline constexpr double kRoof = 0.5;
inline constexpr double kDoorLo = 38.5, kDoorHi = 41.5;  // gap in the north wall
inline constexpr double kHoleLo = 38.5, kHoleHi = 41.5;  // chimney opening
inline constexpr double kChimneyWall = 0.3, kChimneyTop = 20.0;
inline constexpr double kTargetZ = 12.0;
}  // namespace fireplace

namespace balconies {
inline constexpr double kBuildingX0 = 90.0, kBuildingX1 = 130.0;
inline constexpr double kBuildingY0 = 100.0, kBuildingY1 = 130.0;
inline constexpr double kBuildingZ = 40.0;
inline constexpr double kRing = 8.0;        // forbidden ground band width
inline constexpr double kRingHeight = 0.2;
inline constexpr double kDepth = 6.0;       // balcony depth
inline constexpr double kSlab = 0.5;
inline constexpr double kClearance = 6.0;   // floor-to-ceiling height
inline constexpr double kParapet = 0.5;     // parapet height
inline constexpr double kParapetThick = 0.3;
}  // namespace balconies

inline Scene build_fireplace() {
  using namespace fireplace;
  Scene sc;
  sc.params = {1.5, 0.5, 50.0};
  sc.bounds = {{0.0, 0.0, 0.0}, {60.0, 60.0, 30.0}};
  sc.start = {5.0, 5.0, 0.0};
  auto& o = sc.obstacles;
  const double a = kRoomMin, b = kRoomMax, w = kWall, hz = kWallHeight;
  o.push_back({{a, a, 0}, {b, a + w, hz}});                  // south
  o.push_back({{a, a + w, 0}, {a + w, b, hz}});              // west
  o.push_back({{b - w, a + w, 0}, {b, b, hz}});              // east
  o.push_back({{a + w, b - w, 0}, {kDoorLo, b, hz}});        // north, left of door
  o.push_back({{kDoorHi, b - w, 0}, {b - w, b, hz}});        // north, right of door
  const double rz0 = hz, rz1 = hz + kRoof;
  o.push_back({{a, a, rz0}, {b, kHoleLo, rz1}});             // roof around the hole
  o.push_back({{a, kHoleHi, rz0}, {b, b, rz1}});
  o.push_back({{a, kHoleLo, rz0}, {kHoleLo, kHoleHi, rz1}});
  o.push_back({{kHoleHi, kHoleLo, rz0}, {b, kHoleHi, rz1}});
  const double cw = kChimneyWall, ct = kChimneyTop;
  o.push_back({{kHoleLo - cw, kHoleLo - cw, rz1}, {kHoleHi + cw, kHoleLo, ct}});
  o.push_back({{kHoleLo - cw, kHoleHi, rz1}, {kHoleHi + cw, kHoleHi + cw, ct}});
  o.push_back({{kHoleLo - cw, kHoleLo, rz1}, {kHoleLo, kHoleHi, ct}});
  o.push_back({{kHoleHi, kHoleLo, rz1}, {kHoleHi + cw, kHoleHi, ct}});
  const double c = 0.5 * (kHoleLo + kHoleHi);
  sc.targets.push_back({c, c, kTargetZ});
  return sc;
}

inline Scene build_balconies() {
  using namespace balconies;
  Scene sc;
  sc.params = {1.5, 0.5, 50.0};
  sc.bounds = {{0.0, 0.0, 0.0}, {200.0, 200.0, 60.0}};
  sc.start = {10.0, 10.0, 0.0};
  auto& o = sc.obstacles;
  const double x0 = kBuildingX0, x1 = kBuildingX1, y0 = kBuildingY0, y1 = kBuildingY1;
  o.push_back({{x0, y0, 0}, {x1, y1, kBuildingZ}});
  // Forbidden band around the building.
  const double g = kRing, rh = kRingHeight;
  o.push_back({{x0 - g, y0 - g, 0}, {x1 + g, y0, rh}});
  o.push_back({{x0 - g, y1, 0}, {x1 + g, y1 + g, rh}});
  o.push_back({{x0 - g, y0, 0}, {x0, y1, rh}});
  o.push_back({{x1, y0, 0}, {x1 + g, y1, rh}});

  // Balcony on the south face: floor, parapet, ceiling slab.
  {
    const double bx0 = 100.0, bx1 = 108.0, fz = 12.0;
    const double yo = y0 - kDepth;
    o.push_back({{bx0, yo, fz}, {bx1, y0, fz + kSlab}});
    o.push_back({{bx0, yo, fz + kSlab}, {bx1, yo + kParapetThick, fz + kSlab + kParapet}});
    const double cz = fz + kSlab + kClearance;
    o.push_back({{bx0, yo, cz}, {bx1, y0, cz + kSlab}});
    sc.targets.push_back({0.5 * (bx0 + bx1), y0 - 2.0, fz + kSlab + kParapet + 2.0});
  }
  // Balcony on the east face.
  {
    const double by0 = 110.0, by1 = 118.0, fz = 16.0;
    const double xo = x1 + kDepth;
    o.push_back({{x1, by0, fz}, {xo, by1, fz + kSlab}});
    o.push_back({{xo - kParapetThick, by0, fz + kSlab}, {xo, by1, fz + kSlab + kParapet}});
    const double cz = fz + kSlab + kClearance;
    o.push_back({{x1, by0, cz}, {xo, by1, cz + kSlab}});
    sc.targets.push_back({x1 + 2.0, 0.5 * (by0 + by1), fz + kSlab + kParapet + 2.0});
  }
  return sc;
}

inline Scene build_realistic(const std::string& name) {
  if (name == "s1_fireplace") return build_fireplace();
  if (name == "s2_balconies") return build_balconies();
  throw Error(ErrorCode::kInvalidInput, "unknown scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

struct BenchRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string planner;
  int p = 0, q = 0, c = 0;
  double tl = 0.0;
  double et = 0.0;
  StageTimings stages;
};

struct BenchFailure {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string planner;
  int p = 0, q = 0;
  std::string error;
};

struct BenchOptions {
  int c = 26;
  TetherMode mode = TetherMode::kCatenary;
  double rrt_budget_s = 20.0;
  unsigned threads = 0;  // cells in flight; planners run single-threaded
  ScenarioSpec spec;     // seed is overwritten per scene
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<BenchFailure> failures;
};

inline const char* kBenchHeader =
    "scenario,seed,planner,p,q,c,tl_m,et_s,stage_slice_s,stage_pva_s,stage_cand_s,"
    "stage_graph_s,stage_search_s";

/// Runs every (seed, p, q, planner) cell on the random study scenes. All
/// targets of a scene are planned in sequence and summed.
inline BenchResult benchmark_grid(const std::vector<std::uint64_t>& seeds,
                                  const std::vector<int>& p_set, const std::vector<int>& q_set,
                                  const std::vector<std::string>& planners,
                                  const BenchOptions& options = {}) {
  if (seeds.empty() || p_set.empty() || q_set.empty() || planners.empty())
    throw Error(ErrorCode::kInvalidInput, "benchmark sets must be nonempty");
  for (const auto& name : planners)
    if (name != "maspa" && name != "maspa-minus" && name != "rrt")
      throw Error(ErrorCode::kInvalidInput, "unknown planner '" + name + "'");

  std::vector<Scene> scenes;
  for (auto seed : seeds) {
    ScenarioSpec spec = options.spec;
    spec.seed = seed;
    scenes.push_back(random_scenario(spec));
  }
  struct Cell {
    std::size_t scene;
    int p, q;
    std::string planner;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < seeds.size(); ++s)
    for (int p : p_set)
      for (int q : q_set)
        for (const auto& name : planners) cells.push_back({s, p, q, name});

  std::vector<std::optional<BenchRecord>> recs(cells.size());
  std::vector<std::optional<BenchFailure>> fails(cells.size());
  detail::parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Scene& sc = scenes[cell.scene];
    const std::uint64_t seed = seeds[cell.scene];
    const std::string id = "random-" + std::to_string(seed);
    try {
      BenchRecord r;
      r.scenario = id;
      r.seed = seed;
      r.planner = cell.planner;
      r.p = cell.p;
      r.q = cell.q;
      r.c = options.c;
      for (std::size_t k = 0; k < sc.targets.size(); ++k) {
        PlanResult plan;
        if (cell.planner == "rrt") {
          RrtParams rp;
          rp.budget_s = options.rrt_budget_s;
          rp.seed = seed;
          rp.c = options.c;
          plan = rrt_star_plan(sc, k, rp);
        } else {
          PlannerParams pp;
          pp.p = cell.p;
          pp.q = cell.q;
          pp.c = options.c;
          pp.mode = options.mode;
          pp.use_pva = cell.planner == "maspa";
          pp.threads = 1;
          plan = maspa_plan(sc, k, pp);
        }
        r.tl += plan.tl;
        r.et += plan.timings.total_s;
        r.stages.slice_s += plan.timings.slice_s;
        r.stages.pva_s += plan.timings.pva_s;
        r.stages.cand_s += plan.timings.cand_s;
        r.stages.graph_s += plan.timings.graph_s;
        r.stages.search_s += plan.timings.search_s;
      }
      recs[i] = r;
    } catch (const Error& e) {
      fails[i] = BenchFailure{id, seed, cell.planner, cell.p, cell.q, e.what()};
    }
  });

  BenchResult out;
  for (auto& r : recs)
    if (r) out.records.push_back(std::move(*r));
  for (auto& f : fails)
    if (f) out.failures.push_back(std::move(*f));
  auto key = [](const BenchRecord& r) { return std::tie(r.seed, r.scenario, r.planner, r.p, r.q); };
  std::stable_sort(out.records.begin(), out.records.end(),
                   [&](const BenchRecord& a, const BenchRecord& b) { return key(a) < key(b); });
  return out;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << kBenchHeader << '\n';
  std::ostringstream line;
  for (const auto& r : records) {
    line.str("");
    line << std::setprecision(10) << r.scenario << ',' << r.seed << ',' << r.planner << ',' << r.p
         << ',' << r.q << ',' << r.c << ',' << r.tl << ',' << r.et << ',' << r.stages.slice_s << ','
         << r.stages.pva_s << ',' << r.stages.cand_s << ',' << r.stages.graph_s << ','
         << r.stages.search_s;
    os << line.str() << '\n';
  }
}

struct CellSummary {
  int p = 0, q = 0;
  std::string planner;
  std::size_t n = 0;
  double tl_mean = 0.0, tl_std = 0.0;
  double et_mean = 0.0, et_std = 0.0;
};

/// Mean and sample standard deviation per (planner, p, q) cell.
inline std::vector<CellSummary> summarize(const std::vector<BenchRecord>& records) {
  std::vector<CellSummary> out;
  auto find = [&](const BenchRecord& r) -> CellSummary& {
    for (auto& s : out)
      if (s.p == r.p && s.q == r.q && s.planner == r.planner) return s;
    out.push_back({r.p, r.q, r.planner});
    return out.back();
  };
  for (const auto& r : records) {
    auto& s = find(r);
    ++s.n;
    s.tl_mean += r.tl;
    s.et_mean += r.et;
  }
  for (auto& s : out) {
    s.tl_mean /= static_cast<double>(s.n);
    s.et_mean /= static_cast<double>(s.n);
  }
  for (const auto& r : records) {
    auto& s = find(r);
    s.tl_std += (r.tl - s.tl_mean) * (r.tl - s.tl_mean);
    s.et_std += (r.et - s.et_mean) * (r.et - s.et_mean);
  }
  for (auto& s : out) {
    const double dof = s.n > 1 ? static_cast<double>(s.n - 1) : 1.0;
    s.tl_std = std::sqrt(s.tl_std / dof);
    s.et_std = std::sqrt(s.et_std / dof);
  }
  std::sort(out.begin(), out.end(), [](const CellSummary& a, const CellSummary& b) {
    return std::tie(a.planner, a.p, a.q) < std::tie(b.planner, b.p, b.q);
  });
  return out;
}

}  // namespace marsupial
