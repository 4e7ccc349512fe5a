#pragma once

// Uniform-grid index over the rects of one half-plane. Segment queries walk
// the grid cells along the segment and stop at the first blocking rect, so a
// blocked segment in a cluttered plane costs O(1) cells on average.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "marsupial/geometry.hpp"

namespace marsupial {

class RectIndex {
 public:
  RectIndex() = default;

  explicit RectIndex(std::span<const Rect2> rects) : rects_(rects.begin(), rects.end()) {
    if (rects_.size() <= kBruteForceLimit) return;
    d0_ = z0_ = kInf;
    double d1 = -kInf, z1 = -kInf;
    for (const auto& r : rects_) {
      d0_ = std::min(d0_, r.d_min);
      z0_ = std::min(z0_, r.z_min);
      d1 = std::max(d1, r.d_max);
      z1 = std::max(z1, r.z_max);
    }
    const double area = std::max((d1 - d0_) * (z1 - z0_), 1e-12);
    double cell = std::sqrt(area / static_cast<double>(rects_.size()));
    nd_ = std::clamp(static_cast<int>(std::ceil((d1 - d0_) / cell)), 1, kMaxCells);
    nz_ = std::clamp(static_cast<int>(std::ceil((z1 - z0_) / cell)), 1, kMaxCells);
    cd_ = std::max((d1 - d0_) / nd_, 1e-12);
    cz_ = std::max((z1 - z0_) / nz_, 1e-12);
    cells_.assign(static_cast<std::size_t>(nd_) * nz_, {});
    for (std::uint32_t k = 0; k < rects_.size(); ++k) {
      const auto& r = rects_[k];
      int i0 = cell_d(r.d_min - 1e-7), i1 = cell_d(r.d_max + 1e-7);
      int j0 = cell_z(r.z_min - 1e-7), j1 = cell_z(r.z_max + 1e-7);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) cells_[index(i, j)].push_back(k);
    }
    gridded_ = true;
  }

  std::span<const Rect2> rects() const { return rects_; }

  bool segment_clear(PlanePoint a, PlanePoint b) const {
    if (!gridded_) return marsupial::segment_clear(a, b, std::span<const Rect2>(rects_));
    // Clip the segment to the grid box.
    double t0 = 0.0, t1 = 1.0;
    const double dd = b.d - a.d, dz = b.z - a.z;
    const double gd1 = d0_ + nd_ * cd_, gz1 = z0_ + nz_ * cz_;
    if (!clip_closed(a.d, dd, d0_, gd1, t0, t1)) return true;
    if (!clip_closed(a.z, dz, z0_, gz1, t0, t1)) return true;
    const double pd = a.d + t0 * dd, pz = a.z + t0 * dz;
    int i = cell_d(pd), j = cell_z(pz);
    const int step_i = dd > 0 ? 1 : (dd < 0 ? -1 : 0);
    const int step_j = dz > 0 ? 1 : (dz < 0 ? -1 : 0);
    // Parametric distance to the next cell boundary along each axis.
    auto next_boundary = [](double p, double origin, double size, int cell, int step) {
      return origin + (cell + (step > 0 ? 1 : 0)) * size - p;
    };
    double tmax_d = step_i ? t0 + next_boundary(pd, d0_, cd_, i, step_i) / dd : kInf;
    double tmax_z = step_j ? t0 + next_boundary(pz, z0_, cz_, j, step_j) / dz : kInf;
    const double tdelta_d = step_i ? cd_ / std::abs(dd) : kInf;
    const double tdelta_z = step_j ? cz_ / std::abs(dz) : kInf;
    for (;;) {
      for (std::uint32_t k : cells_[index(i, j)])
        if (segment_hits(a, b, rects_[k])) return false;
      if (tmax_d > t1 && tmax_z > t1) return true;
      if (tmax_d < tmax_z) {
        i += step_i;
        tmax_d += tdelta_d;
      } else {
        j += step_j;
        tmax_z += tdelta_z;
      }
      if (i < 0 || i >= nd_ || j < 0 || j >= nz_) return true;
    }
  }

 private:
  static constexpr std::size_t kBruteForceLimit = 24;
  static constexpr int kMaxCells = 256;

  static bool clip_closed(double o, double u, double lo, double hi, double& t0, double& t1) {
    if (std::abs(u) < 1e-300) return o >= lo && o <= hi;
    double a = (lo - o) / u, b = (hi - o) / u;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    return t0 <= t1;
  }
  int cell_d(double d) const {
    return std::clamp(static_cast<int>(std::floor((d - d0_) / cd_)), 0, nd_ - 1);
  }
  int cell_z(double z) const {
    return std::clamp(static_cast<int>(std::floor((z - z0_) / cz_)), 0, nz_ - 1);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nd_ + i;
  }

  std::vector<Rect2> rects_;
  bool gridded_ = false;
  double d0_ = 0.0, z0_ = 0.0, cd_ = 1.0, cz_ = 1.0;
  int nd_ = 1, nz_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
};

}  // namespace marsupial
