#include <catch_amalgamated.hpp>

#include <cmath>

#include "marsupial/catenary.hpp"
#include "marsupial/oracle.hpp"
#include "marsupial/rng.hpp"
#include "support.hpp"

using namespace marsupial;
using namespace marsupial::testing;
using Catch::Approx;

namespace {

double sampled_length(const Catenary& c, int n) {
  const auto pts = c.sample(n);
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
  return s;
}

// Deepest penetration of n samples into the rect interior (0 when clear).
double penetration(const Catenary& c, const Rect2& r, int n) {
  double depth = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double d = c.p1.d + (c.p2.d - c.p1.d) * i / n;
    const double z = c.z_at(d);
    const double m = std::min({d - r.d_min, r.d_max - d, z - r.z_min, r.z_max - z});
    depth = std::max(depth, m);
  }
  return depth;
}

Catenary random_catenary(Rng& rng) {
  const PlanePoint p1{rng.uniform(-20, 20), rng.uniform(0, 20)};
  PlanePoint p2{rng.uniform(-20, 20), rng.uniform(0, 20)};
  if (std::abs(p2.d - p1.d) < 0.1) p2.d = p1.d + 0.5;
  const double chord = distance(p1, p2);
  const double s = chord * (1.0 + std::pow(rng.uniform(), 2) * 1.5);
  return solve_catenary(p1, p2, s);
}

}  // namespace

TEST_CASE("solve_catenary examples", "[catenary]") {
  SECTION("length equal to the chord is a straight segment") {
    const auto c = solve_catenary({0, 0}, {10, 0}, 10);
    CHECK(c.straight());
    CHECK(c.z_at(5) == 0.0);
    CHECK(c.arc_length == 10.0);
  }
  SECTION("s = 12 over a 10 m span") {
    const auto c = solve_catenary({0, 0}, {10, 0}, 12);
    REQUIRE_FALSE(c.straight());
    CHECK(c.a == Approx(4.70).margin(0.01));
    CHECK(2 * c.a * std::sinh(5 / c.a) == Approx(12).margin(1e-9));
    CHECK(c.d_v == Approx(5.0).margin(1e-12));
    CHECK(sampled_length(c, 200000) == Approx(12.0).epsilon(1e-6));
    CHECK(std::abs(c.z_at(0)) <= 1e-9);
    CHECK(std::abs(c.z_at(10)) <= 1e-9);
    CHECK(c.min_z() < 0.0);
  }
  SECTION("shorter than the chord") {
    try {
      solve_catenary({0, 0}, {10, 0}, 9);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kShorterThanChord);
    }
  }
  SECTION("slack tether between vertical anchors") {
    try {
      solve_catenary({0, 0}, {0, 5}, 7);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kVerticalAnchors);
    }
    CHECK(solve_catenary({0, 0}, {0, 5}, 5).straight());
  }
}

TEST_CASE("catenary invariants on random instances", "[catenary][property]") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const auto c = random_catenary(rng);
    CHECK(std::abs(c.z_at(c.p1.d) - c.p1.z) <= 1e-9);
    CHECK(std::abs(c.z_at(c.p2.d) - c.p2.z) <= 1e-9);
    if (i % 50 == 0) CHECK(sampled_length(c, 20000) == Approx(c.arc_length).epsilon(1e-6));
    CHECK(c.arc_length_to(c.p2.d) == Approx(c.arc_length).epsilon(1e-9));
    const double span = c.p2.d - c.p1.d;
    double prev2 = 0.0, prev1 = 0.0;
    for (int k = 0; k <= 50; ++k) {
      const double d = c.p1.d + span * k / 50.0;
      const double chord_z = c.p1.z + (c.p2.z - c.p1.z) * k / 50.0;
      const double z = c.z_at(d);
      CHECK(z <= chord_z + 1e-9);
      if (k >= 2) CHECK(z - 2 * prev1 + prev2 >= -1e-9);  // convex
      prev2 = prev1;
      prev1 = z;
    }
  }
}

TEST_CASE("swapping anchors gives the same curve", "[catenary][property]") {
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const auto c = random_catenary(rng);
    const auto r = solve_catenary(c.p2, c.p1, c.arc_length);
    CHECK(r.straight() == c.straight());
    if (c.straight()) continue;
    CHECK(r.a == Approx(c.a).epsilon(1e-9));
    CHECK(std::abs(r.d_v - c.d_v) <= 1e-9 * std::max(1.0, std::abs(c.d_v)));
    CHECK(std::abs(r.z_v - c.z_v) <= 1e-9 * std::max(1.0, std::abs(c.z_v)));
  }
}

TEST_CASE("catenary_clear examples", "[catenary]") {
  const Rect2 above = make_rect(4, 6, 12, 14);
  const auto c = solve_catenary({0, 10}, {10, 10}, 14);
  CHECK(catenary_clear(c, above));

  const Rect2 mid = make_rect(4, 6, 9, 11);
  REQUIRE(c.z_at(5) < 9);
  REQUIRE(c.z_at(4) < 9);
  REQUIRE(c.z_at(6) < 9);
  CHECK(catenary_clear(c, mid));
  CHECK(penetration(c, mid, 1000) == 0.0);

  const auto taut = solve_catenary({0, 10}, {10, 10}, 10);
  CHECK_FALSE(catenary_clear(taut, mid));

  // A rect the sagging curve dips into.
  const Rect2 low = make_rect(4, 6, 5, 8);
  CHECK_FALSE(catenary_clear(c, low));
  CHECK(penetration(c, low, 1000) > 0.0);
}

TEST_CASE("catenary_clear agrees with a sampled curve", "[catenary][property]") {
  Rng rng(21);
  int unresolved = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto c = random_catenary(rng);
    const double d0 = rng.uniform(-25, 20), z0 = rng.uniform(-5, 20);
    const Rect2 r = make_rect(d0, d0 + rng.uniform(0.2, 8), z0, z0 + rng.uniform(0.2, 8));
    const bool analytic = catenary_clear(c, r);
    const bool sampled = penetration(c, r, 1000) <= kEps;
    if (analytic == sampled) continue;
    // The coarse oracle can miss a shallow dip; resolve with a fine one.
    const double fine = penetration(c, r, 200000);
    if (analytic ? fine <= 1e-6 : fine > 0.0) continue;
    ++unresolved;
  }
  CHECK(unresolved == 0);
}

TEST_CASE("catenary length grid", "[catenary]") {
  CHECK(catenary_lengths(5, 20, 1) == std::vector<double>{5});
  const auto g = catenary_lengths(5, 20, 26);
  REQUIRE(g.size() == 26);
  CHECK(g.front() == 5.0);
  CHECK(g.back() == 20.0);
  CHECK(g[1] - g[0] == Approx(15.0 / 25));
  CHECK(catenary_lengths(20, 20, 26) == std::vector<double>{20});
}

TEST_CASE("min_catenary_length", "[catenary]") {
  const PlanePoint y{12, 1}, t{0, 10};
  SECTION("no rects returns the chord") {
    const auto len = min_catenary_length(y, t, 20, 26, {});
    REQUIRE(len);
    CHECK(*len == Approx(15.0));
  }
  SECTION("sag clears a rect that blocks the chord") {
    // The chord passes z = 5.5 at d = 6; a thin rect just above it forces slack.
    const std::vector<Rect2> rects{make_rect(5.5, 6.5, 5.3, 9)};
    const std::span<const Rect2> rs(rects);
    CHECK_FALSE(segment_clear(y, t, rs));
    const auto len = min_catenary_length(y, t, 20, 26, rs);
    REQUIRE(len);
    CHECK(*len > 15.0);
    // No smaller tested length clears, and the returned one does.
    const auto grid = catenary_lengths(15.0, 20, 26);
    for (double s : grid) {
      const auto c = solve_catenary(y, t, s);
      if (s < *len - 1e-12) CHECK_FALSE(catenary_feasible(c, rs));
    }
    CHECK(catenary_feasible(solve_catenary(y, t, *len), rs));
    CHECK(oracle::oracle_c_visible(y, t, 20, 26, rects).visible);
  }
  SECTION("every length collides") {
    const std::vector<Rect2> rects{make_rect(8, 9, -1, 30)};
    CHECK_FALSE(min_catenary_length(y, t, 20, 26, rects));
  }
  SECTION("anchor out of reach") {
    CHECK_FALSE(min_catenary_length({30, 1}, t, 20, 26, {}));
  }
}

TEST_CASE("removing a rect never lengthens the tether", "[catenary][property]") {
  Rng rng(31);
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto rp = random_plane(s + 500);
    if (rp.scene.rects.empty()) continue;
    const PlanePoint y{rng.uniform(0, 25), 1.0};
    auto full = min_catenary_length(y, rp.scene.target_2d, rp.L, 26, rp.scene.rects);
    std::vector<Rect2> fewer = rp.scene.rects;
    fewer.erase(fewer.begin() + static_cast<long>(s % fewer.size()));
    auto less = min_catenary_length(y, rp.scene.target_2d, rp.L, 26, fewer);
    if (full) {
      REQUIRE(less);
      CHECK(*less <= *full);
    }
  }
}
