#include <catch_amalgamated.hpp>

#include <cmath>

#include "marsupial/catenary.hpp"
#include "marsupial/oracle.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/pva2d.hpp"
#include "support.hpp"

using namespace marsupial;
using namespace marsupial::testing;
using Catch::Approx;

TEST_CASE("oracle p-visibility on the wall instance", "[oracle]") {
  const PlanarScene sc = wall_instance();
  CHECK_FALSE(oracle::oracle_p_visible({16.0, 1.0}, sc, kWallL).visible);
  const auto at = oracle::oracle_p_visible({15.0104, 1.0}, sc, kWallL);
  CHECK(at.visible);
  CHECK(at.min_length == Approx(kWallL).margin(1e-4));
  // The right end-point found by the sweep is where the oracle flips.
  const double hi = pva2d(sc, kWallL).intervals.visible.at(0).hi;
  CHECK(oracle::oracle_p_visible({hi - 1e-6, 1.0}, sc, kWallL).visible);
  CHECK_FALSE(oracle::oracle_p_visible({hi + 1e-3, 1.0}, sc, kWallL).visible);
  // Near the wall the shortest chain is still tangent to it.
  const auto near = oracle::oracle_p_visible({6.0, 1.0}, sc, kWallL);
  CHECK(near.visible);
  CHECK(near.min_length > distance(PlanePoint{6.0, 1.0}, sc.target_2d));
}

TEST_CASE("oracle p-visibility without obstacles", "[oracle]") {
  const PlanarScene sc = planar(10.0, {});
  const PlanePoint y{12.0, 1.0};
  const auto v = oracle::oracle_p_visible(y, sc, 20.0);
  CHECK(v.visible);
  CHECK(v.min_length == Approx(15.0));
  CHECK_FALSE(oracle::oracle_p_visible(y, sc, 14.9).visible);
}

TEST_CASE("oracle p-visibility over a box", "[oracle]") {
  const PlanarScene sc = box_instance();
  // The chord from d = 10 passes through the box.
  const PlanePoint y{10.0, 1.0};
  REQUIRE_FALSE(segment_clear(y, sc.target_2d, sc.rects));
  const auto v = oracle::oracle_p_visible(y, sc, 30.0);
  REQUIRE(v.visible);
  CHECK(v.min_length > distance(y, sc.target_2d));
  const auto chain = pva2d(sc, 30.0).min_taut_chain(10.0);
  REQUIRE(chain);
  CHECK(v.min_length == Approx(chain->length).epsilon(1e-9));
}

TEST_CASE("hang produces the requested catenary", "[oracle]") {
  const PlanePoint a{0, 0}, b{10, 3};
  const auto c = oracle::detail::hang(a, b, 14.0);
  REQUIRE(c);
  REQUIRE_FALSE(c->straight);
  CHECK(c->z(0) == Approx(0.0).margin(1e-9));
  CHECK(c->z(10) == Approx(3.0).margin(1e-9));
  double len = 0.0;
  PlanePoint prev = a;
  for (int k = 1; k <= 100000; ++k) {
    const PlanePoint p{10.0 * k / 100000, c->z(10.0 * k / 100000)};
    len += distance(prev, p);
    prev = p;
  }
  CHECK(len == Approx(14.0).epsilon(1e-6));
  // Same curve as the production solver.
  const auto prod = solve_catenary(a, b, 14.0);
  for (double d : {1.0, 4.0, 7.5}) CHECK(c->z(d) == Approx(prod.z_at(d)).margin(1e-7));
  CHECK_FALSE(oracle::detail::hang({3, 0}, {3, 5}, 6.0));
}

TEST_CASE("oracle c-visibility examples", "[oracle]") {
  const PlanePoint y{12, 1}, t{0, 10};
  SECTION("open plane uses the chord") {
    const auto v = oracle::oracle_c_visible(y, t, 20, 26, {});
    CHECK(v.visible);
    CHECK(v.min_length == Approx(15.0));
  }
  SECTION("out of reach") { CHECK_FALSE(oracle::oracle_c_visible(y, t, 14.0, 26, {}).visible); }
  SECTION("sag clears a rect above the chord") {
    const std::vector<Rect2> rects{make_rect(5.5, 6.5, 5.3, 9)};
    const auto v = oracle::oracle_c_visible(y, t, 20, 26, rects);
    REQUIRE(v.visible);
    CHECK(v.min_length > 15.0);
    const auto prod = min_catenary_length(y, t, 20, 26, rects);
    REQUIRE(prod);
    // The oracle grid is ten times finer, so it can only be shorter by a step.
    CHECK(v.min_length <= *prod + 1e-9);
    CHECK(v.min_length >= *prod - (20.0 - 15.0) / 25.0);
  }
  SECTION("a full-height wall blocks every length") {
    const std::vector<Rect2> rects{make_rect(8, 9, -1, 30)};
    CHECK_FALSE(oracle::oracle_c_visible(y, t, 20, 26, rects).visible);
  }
  SECTION("vertical anchors") {
    CHECK(oracle::oracle_c_visible({0, 1}, t, 20, 26, {}).visible);
    const std::vector<Rect2> rects{make_rect(-1, 1, 4, 5)};
    CHECK_FALSE(oracle::oracle_c_visible({0, 1}, t, 20, 26, rects).visible);
  }
}

TEST_CASE("oracle shortest path", "[oracle]") {
  using oracle::WeightedEdge;
  const std::vector<WeightedEdge> es{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}, {2, 3, 0.5}};
  CHECK(oracle::oracle_shortest_path(5, es, 0, 3) == Approx(2.5));
  CHECK(oracle::oracle_shortest_path(5, es, 3, 0) == Approx(2.5));
  CHECK(oracle::oracle_shortest_path(5, es, 0, 4) == kInf);
  CHECK(oracle::oracle_shortest_path(5, es, 2, 2) == 0.0);
}

TEST_CASE("grid oracle on an open scene", "[oracle]") {
  const Scene sc = open_scene({0, 0, 26}, {20, 0});
  for (double step : {1.0, 0.5}) CHECK(oracle::oracle_plan(sc, 0, step) == Approx(std::sqrt(1025.0)));
}

TEST_CASE("grid oracle converges on the wall scene", "[oracle]") {
  const Scene sc = wall_scene();
  const double exact = 20.0 - 15.0104 + 20.0;
  double prev = kInf;
  for (double step : {1.0, 0.5, 0.25}) {
    const double v = oracle::oracle_plan(sc, 0, step);
    // Nested grids: refining never loses a node.
    CHECK(v <= prev + 1e-9);
    CHECK(v >= exact - 1e-3);
    CHECK(v <= exact + 2.0 * step);
    prev = v;
  }
  PlannerParams pp;
  pp.mode = TetherMode::kTaut;
  CHECK(maspa_plan(sc, 0, pp).tl <= prev + 1e-6);
}

TEST_CASE("grid oracle with the catenary tether", "[oracle]") {
  const Scene sc = wall_scene();
  const double taut = oracle::oracle_plan(sc, 0, 1.0);
  const double cat = oracle::oracle_plan(sc, 0, 1.0, oracle::OracleTether::kCatenary);
  CHECK(cat >= taut - 1e-9);
}

TEST_CASE("grid oracle reports unreachable targets", "[oracle]") {
  const Scene sc = open_scene({0, 0, 26}, {20, 0}, 20.0);
  try {
    oracle::oracle_plan(sc, 0, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnreachable);
  }
}
