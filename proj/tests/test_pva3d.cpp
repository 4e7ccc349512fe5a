#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "marsupial/oracle.hpp"
#include "marsupial/pva3d.hpp"
#include "marsupial/rng.hpp"
#include "marsupial/scenario.hpp"
#include "support.hpp"

using namespace marsupial;
using namespace marsupial::testing;
using Catch::Approx;

TEST_CASE("plane_beam layout", "[pva3d]") {
  const Point3 t{1, 2, 10};
  SECTION("p = 1") {
    const auto b = plane_beam(t, 1);
    REQUIRE(b.size() == 2);
    CHECK(b[0].azimuth == 0.0);
    CHECK(b[1].azimuth == Approx(std::numbers::pi));
    CHECK(b[0].origin.x == 1.0);
    CHECK(b[0].origin.y == 2.0);
  }
  SECTION("p = 4") {
    const auto b = plane_beam(t, 4);
    REQUIRE(b.size() == 8);
    for (const auto& f : b) {
      const double k = f.azimuth / (std::numbers::pi / 4);
      CHECK(k == Approx(std::round(k)).margin(1e-12));
      CHECK(f.azimuth == Approx(f.plane_index * std::numbers::pi / 4 + f.side * std::numbers::pi));
    }
  }
  SECTION("p = 16") { CHECK(plane_beam(t, 16).size() == 32); }
  SECTION("phase puts S on a half-plane") {
    const Vec2 s{-7, 13};
    for (int p : {1, 3, 16}) {
      const auto b = plane_beam(t, p, beam_phase(t, s, p));
      const double az = frame_through(t, s).azimuth;
      bool hit = false;
      for (const auto& f : b) hit = hit || std::abs(f.azimuth - az) < 1e-12;
      CHECK(hit);
    }
  }
}

TEST_CASE("pva3d on an open scene", "[pva3d]") {
  const Scene sc = open_scene({0, 0, 26}, {20, 0});
  const auto planes = pva3d(sc, sc.targets[0], 8, 1);
  REQUIRE(planes.size() == 16);
  for (const auto& hp : planes) {
    REQUIRE(hp.vis.intervals.visible.size() == 1);
    CHECK(hp.vis.intervals.visible[0].lo == 0.0);
    CHECK(hp.vis.intervals.visible[0].hi == Approx(std::sqrt(50.0 * 50 - 25.0 * 25)));
  }
}

TEST_CASE("pva3d on the extruded wall", "[pva3d]") {
  const Scene sc = wall_scene();
  const auto planes = pva3d(sc, sc.targets[0], 4, 1);
  REQUIRE(planes.size() == 8);
  // Half-plane 0 faces +x, perpendicular to the wall.
  const auto& w = planes[0].vis.intervals;
  CHECK(planes[0].frame.azimuth == 0.0);
  REQUIRE(w.visible.size() == 1);
  CHECK(w.visible[0].hi == Approx(15.0104).margin(1e-4));
  CHECK(*w.q_reach == Approx(17.8606).margin(1e-4));
  for (const auto& hp : planes) {
    if (std::cos(hp.frame.azimuth) < -1e-9) {
      REQUIRE(hp.vis.intervals.visible.size() == 1);
      CHECK(hp.vis.intervals.visible[0].hi == Approx(std::sqrt(319.0)));
    }
  }
}

TEST_CASE("pva3d with T out of reach", "[pva3d]") {
  Scene sc = open_scene({0, 0, 26}, {20, 0}, 20.0);
  for (const auto& hp : pva3d(sc, sc.targets[0], 4, 1)) {
    CHECK_FALSE(hp.vis.intervals.q_reach.has_value());
    CHECK(hp.vis.intervals.visible.empty());
  }
  CHECK(sample_candidates(pva3d(sc, sc.targets[0], 4, 1), sc, {}).empty());
}

TEST_CASE("pva3d does not depend on the thread count", "[pva3d]") {
  const Scene sc = random_scenario(ScenarioSpec{});
  const auto a = pva3d(sc, sc.targets[0], 16, 1);
  const auto b = pva3d(sc, sc.targets[0], 16, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].vis.intervals.visible == b[i].vis.intervals.visible);
  const auto ca = sample_candidates(a, sc, {}, 1);
  const auto cb = sample_candidates(b, sc, {}, 4);
  REQUIRE(ca.size() == cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    CHECK(ca[i].d == cb[i].d);
    CHECK(ca[i].aerial_length == cb[i].aerial_length);
  }
}

TEST_CASE("spread_points", "[pva3d]") {
  CHECK(spread_points({{0, 10}}, 5) == std::vector<double>{0, 2.5, 5, 7.5, 10});
  CHECK(spread_points({}, 5).empty());
  SECTION("every interval keeps its end-points") {
    const std::vector<Interval> ivs{{0, 1}, {3, 13}, {20, 20.5}};
    const auto pts = spread_points(ivs, 10);
    for (const auto& iv : ivs) {
      CHECK(std::find(pts.begin(), pts.end(), iv.lo) != pts.end());
      CHECK(std::find(pts.begin(), pts.end(), iv.hi) != pts.end());
    }
    CHECK(std::is_sorted(pts.begin(), pts.end()));
  }
  SECTION("a refined grid keeps the old points") {
    const auto coarse = spread_points({{2, 12}}, 6);
    const auto fine = spread_points({{2, 12}}, 11);
    for (double d : coarse) {
      bool found = false;
      for (double e : fine) found = found || std::abs(d - e) < 1e-12;
      CHECK(found);
    }
  }
}

TEST_CASE("candidate sampling", "[pva3d]") {
  const Scene sc = random_scenario(ScenarioSpec{});
  const Point3 t = sc.targets[0];
  const auto planes = pva3d(sc, t, 16, 1);
  const auto fps = blocking_footprints(sc);
  for (TetherMode mode : {TetherMode::kTaut, TetherMode::kCatenary}) {
    SamplingParams sp;
    sp.mode = mode;
    const auto cands = sample_candidates(planes, sc, sp, 1);
    REQUIRE_FALSE(cands.empty());
    for (const auto& c : cands) {
      CHECK(c.mode == mode);
      CHECK(c.y.x == c.x.x);
      CHECK(c.y.z == Approx(sc.params.take_off_height()));
      CHECK(c.aerial_length <= sc.params.L + 1e-9);
      CHECK(c.aerial_length >= distance(c.y, t) - 1e-9);
      for (const auto& f : fps) CHECK_FALSE(f.contains_strictly(c.x));
      const auto& vis = planes[static_cast<std::size_t>(2 * c.plane_index() + c.side())].vis.intervals;
      CHECK(vis.contains(c.d));
      const auto path = c.aerial_path();
      REQUIRE(path.size() >= 2);
      CHECK(distance(path.front(), c.y) <= 1e-9);
      CHECK(distance(path.back(), t) <= 1e-9);
    }
  }
}

TEST_CASE("catenary mode uses the chord when it is clear", "[pva3d]") {
  const Scene sc = open_scene({0, 0, 26}, {20, 0});
  const auto cands = sample_candidates(pva3d(sc, sc.targets[0], 2, 1), sc, {});
  REQUIRE_FALSE(cands.empty());
  for (const auto& c : cands) CHECK(c.aerial_length == Approx(distance(c.y, sc.targets[0])));
}

TEST_CASE("p-visible point without a clearing catenary is dropped", "[pva3d]") {
  const Scene sc = wall_scene();
  const auto planes = pva3d(sc, sc.targets[0], 4, 1);
  const auto& hp = planes[0];
  REQUIRE(hp.vis.intervals.contains(15.0));
  const auto fps = blocking_footprints(sc);
  SamplingParams sp;
  CHECK_FALSE(detail::make_candidate(hp, 15.0, sc, fps, sp));
  CHECK_FALSE(oracle::oracle_c_visible({15.0, 1.0}, {0, 10}, 20, 26,
                                       hp.vis.ctx.scene.rects)
                  .visible);
  sp.mode = TetherMode::kTaut;
  CHECK(detail::make_candidate(hp, 15.0, sc, fps, sp));
}

TEST_CASE("catenary-feasible points are p-visible", "[pva3d][property]") {
  Rng rng(77);
  int violations = 0, feasible = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto rp = random_plane(s + 9000);
    const auto pv = pva2d(rp.scene, rp.L);
    if (!pv.intervals.q_reach) continue;
    for (int i = 0; i < 10; ++i) {
      const double d = rng.uniform(0, *pv.intervals.q_reach);
      if (pv.intervals.distance_to_endpoint(d) <= 1e-6) continue;
      const bool c = oracle::oracle_c_visible({d, 1.0}, rp.scene.target_2d, rp.L, 26, rp.scene.rects).visible;
      feasible += c;
      if (c && !pv.intervals.contains(d)) ++violations;
    }
  }
  CHECK(violations == 0);
  CHECK(feasible > 100);
}

TEST_CASE("refining the beam keeps earlier candidates", "[pva3d][property]") {
  ScenarioSpec spec;
  spec.seed = 4;
  const Scene sc = random_scenario(spec);
  const Point3 t = sc.targets[0];
  const Vec2 s = sc.start.ground();
  const auto coarse = sample_candidates(pva3d(sc, t, plane_beam(t, 4, beam_phase(t, s, 4)), 1), sc, {}, 1);
  const auto fine = sample_candidates(pva3d(sc, t, plane_beam(t, 8, beam_phase(t, s, 8)), 1), sc, {}, 1);
  for (const auto& c : coarse) {
    bool found = false;
    for (const auto& f : fine)
      found = found || (std::abs(f.frame.azimuth - c.frame.azimuth) < 1e-9 && std::abs(f.d - c.d) < 1e-9);
    CHECK(found);
  }
}

TEST_CASE("candidate CSV dump", "[pva3d]") {
  const Scene sc = open_scene({0, 0, 26}, {20, 0});
  SamplingParams sp;
  sp.q = 2;
  const auto cands = sample_candidates(pva3d(sc, sc.targets[0], 1, 1), sc, sp);
  std::ostringstream os;
  write_candidates_csv(os, cands);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "azimuth,side,d,x,y,aerial_length,mode");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",catenary") != std::string::npos);
  }
  CHECK(rows == static_cast<int>(cands.size()));
}
