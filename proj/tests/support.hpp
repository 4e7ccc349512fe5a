#pragma once

// Shared fixtures for the test suites and the acceptance run.

#include <cstdint>
#include <vector>

#include "marsupial/geometry.hpp"
#include "marsupial/rng.hpp"

namespace marsupial::testing {

inline Rect2 make_rect(double d0, double d1, double z0, double z1, double t = 1.0,
                       bool central = false) {
  Rect2 r;
  r.d_min = d0;
  r.d_max = d1;
  r.z_min = z0;
  r.z_max = z1;
  r.kind = classify(z0, z1, central, t);
  return r;
}

inline PlanarScene planar(double z_target, std::vector<Rect2> rects, double t = 1.0) {
  PlanarScene s;
  s.take_off_z = t;
  s.target_2d = {0.0, z_target};
  s.rects = std::move(rects);
  s.frame.target_2d = s.target_2d;
  return s;
}

// Wall instance: T = (0, 10), take-off line z = 1, wall d in [4, 5], z in [2, 25].
inline constexpr double kWallL = 20.0;
inline PlanarScene wall_instance() { return planar(10.0, {make_rect(4.0, 5.0, 2.0, 25.0)}); }

// Box instance: T = (0, 10), box d in [4, 6], z in [4, 6].
inline PlanarScene box_instance() { return planar(10.0, {make_rect(4.0, 6.0, 4.0, 6.0)}); }

inline Scene open_scene(Point3 target, Vec2 start, double L = 50.0) {
  Scene sc;
  sc.bounds = {{-60.0, -60.0, 0.0}, {60.0, 60.0, 60.0}};
  sc.start = {start.x, start.y, 0.0};
  sc.targets = {target};
  sc.params.L = L;
  return sc;
}

// The wall instance extruded along y: h = 1.25, r = 0.25 keeps the take-off
// line at z = 1 and inflates the wall to x in [4, 5], z in [2, 25].
inline Scene wall_scene(Vec2 start = {20.0, 0.0}) {
  Scene sc = open_scene({0.0, 0.0, 10.0}, start, kWallL);
  sc.params.h = 1.25;
  sc.params.r = 0.25;
  sc.obstacles = {{{4.25, -50.0, 2.25}, {4.75, 50.0, 24.75}}};
  return sc;
}

struct RandomPlane {
  PlanarScene scene;
  double L = 0.0;
};

/// Random planar scene with up to max_rects disjoint rects: ground blockers,
/// aerial rects and occasional central rects straddling T'.
inline RandomPlane random_plane(std::uint64_t seed, int max_rects = 8) {
  Rng rng(seed);
  RandomPlane out;
  const double zt = rng.uniform(8.0, 20.0);
  out.scene = planar(zt, {});
  out.L = rng.uniform(zt, 40.0);
  const int n = static_cast<int>(rng.uniform(0.0, max_rects + 1.0));
  for (int k = 0; k < n; ++k) {
    for (int tries = 0; tries < 100; ++tries) {
      const bool ground = rng.uniform() < 0.25;
      const bool central = rng.uniform() < 0.1;
      const double d0 = central ? -rng.uniform(0.5, 3.0) : rng.uniform(0.0, 25.0);
      const double d1 = central ? rng.uniform(0.5, 5.0) : d0 + rng.uniform(0.5, 6.0);
      double z0, z1;
      if (ground) {
        z0 = -0.5;
        z1 = rng.uniform(0.5, 8.0);
      } else {
        z0 = rng.uniform(1.0, 18.0);
        z1 = z0 + rng.uniform(0.5, 6.0);
      }
      if (central && !(z1 < zt)) continue;
      Rect2 r = make_rect(d0, d1, z0, z1, 1.0, central);
      if (r.contains_strictly(out.scene.target_2d)) continue;
      bool overlap = false;
      for (const auto& o : out.scene.rects)
        overlap = overlap || !(r.d_max <= o.d_min || o.d_max <= r.d_min || r.z_max <= o.z_min ||
                               o.z_max <= r.z_min);
      if (overlap) continue;
      out.scene.rects.push_back(r);
      break;
    }
  }
  return out;
}

}  // namespace marsupial::testing
