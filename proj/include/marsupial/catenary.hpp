#pragma once

// Loose tether model: a catenary of fixed arc length hanging between two
// anchors in a vertical half-plane.
//
// The curve is z(d) = z_v + a * (cosh((d - d_v) / a) - 1). Anchors are stored
// ordered by d. Evaluation is expressed relative to the nearer anchor so both
// anchor residuals stay at rounding level even when a is very large.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "marsupial/geometry.hpp"

namespace marsupial {

struct Catenary {
  enum class Shape { kCurve, kStraight };

  Shape shape = Shape::kStraight;
  double a = kInf;     // curve parameter; kInf for the straight case
  double d_v = 0.0;    // vertex (lowest point) of the full curve
  double z_v = 0.0;
  PlanePoint p1;       // anchor with the smaller d
  PlanePoint p2;
  double arc_length = 0.0;

  bool straight() const { return shape == Shape::kStraight; }

  /// Height at d, for d in [p1.d, p2.d]. Not defined for vertical segments.
  double z_at(double d) const {
    if (straight()) {
      const double span = p2.d - p1.d;
      if (span <= 0.0) return p1.z;
      return p1.z + (p2.z - p1.z) * (d - p1.d) / span;
    }
    const PlanePoint& ref = (d - p1.d <= p2.d - d) ? p1 : p2;
    const double x = (d - d_v) / a, xr = (ref.d - d_v) / a;
    return ref.z + 2.0 * a * std::sinh(0.5 * (x + xr)) * std::sinh(0.5 * (x - xr));
  }

  /// Arc length between p1 and the point above d.
  double arc_length_to(double d) const {
    if (straight()) return distance(p1, PlanePoint{d, z_at(d)});
    const double x = (d - d_v) / a, x1 = (p1.d - d_v) / a;
    return 2.0 * a * std::cosh(0.5 * (x + x1)) * std::sinh(0.5 * (x - x1));
  }

  /// Lowest height reached between the anchors.
  double min_z() const {
    if (straight()) return std::min(p1.z, p2.z);
    return z_at(std::clamp(d_v, p1.d, p2.d));
  }

  /// Polyline through n >= 2 points evenly spaced in d.
  std::vector<PlanePoint> sample(int n) const {
    n = std::max(n, 2);
    std::vector<PlanePoint> out;
    out.reserve(static_cast<std::size_t>(n));
    if (straight()) {
      for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        out.push_back({p1.d + t * (p2.d - p1.d), p1.z + t * (p2.z - p1.z)});
      }
      return out;
    }
    for (int i = 0; i < n; ++i) {
      const double d = p1.d + (p2.d - p1.d) * static_cast<double>(i) / (n - 1);
      out.push_back({d, z_at(d)});
    }
    out.front() = p1;
    out.back() = p2;
    return out;
  }
};

namespace detail {

// Smallest u > 0 with sinh(u) / u = k, for k > 1.
inline double solve_sinhc(double k) {
  double lo = 0.0, hi = 1.0;
  while (std::sinh(hi) / hi < k) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (std::sinh(mid) / mid < k)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline constexpr double kCatenaryDegenerate = 1e-7;

/// Catenary of arc length s through p1 and p2.
inline Catenary solve_catenary(PlanePoint p1, PlanePoint p2, double s) {
  if (p2.d < p1.d) std::swap(p1, p2);
  const double chord = distance(p1, p2);
  if (!(s >= chord - kEps)) throw Error(ErrorCode::kShorterThanChord, "arc length shorter than chord");
  const double dd = p2.d - p1.d, dz = p2.z - p1.z;

  Catenary c;
  c.p1 = p1;
  c.p2 = p2;
  if (dd <= kEps) {
    if (s > std::abs(dz) + kEps)
      throw Error(ErrorCode::kVerticalAnchors, "slack tether between vertically aligned anchors");
    c.arc_length = chord;
    return c;
  }
  if (s - chord < kCatenaryDegenerate) {
    c.arc_length = chord;
    return c;
  }

  // 2a sinh(dd / 2a) = sqrt(s^2 - dz^2), with u = dd / 2a.
  const double rhs = std::sqrt((s - dz) * (s + dz));
  const double u = detail::solve_sinhc(rhs / dd);
  c.shape = Catenary::Shape::kCurve;
  c.a = dd / (2.0 * u);
  c.d_v = 0.5 * (p1.d + p2.d) - c.a * std::atanh(dz / s);
  const double x1 = (p1.d - c.d_v) / c.a;
  const double sh = std::sinh(0.5 * x1);
  c.z_v = p1.z - 2.0 * c.a * sh * sh;
  c.arc_length = s;
  return c;
}

/// The curve avoids the interior of one rect. Convexity bounds the curve on
/// the overlapping d-range by its end values and its value at the clamped
/// vertex.
inline bool catenary_clear(const Catenary& c, const Rect2& r) {
  if (c.straight() || c.p2.d - c.p1.d <= kEps) return !segment_hits(c.p1, c.p2, r);
  const double lo = std::max(r.d_min, c.p1.d), hi = std::min(r.d_max, c.p2.d);
  if (hi - lo <= kEps) return true;
  const double z_lo = c.z_at(lo), z_hi = c.z_at(hi);
  const double top = std::max(z_lo, z_hi);
  const double bottom = std::min({z_lo, z_hi, c.z_at(std::clamp(c.d_v, lo, hi))});
  return bottom >= r.z_max - kEps || top <= r.z_min + kEps;
}

inline bool catenary_clear(const Catenary& c, std::span<const Rect2> rects) {
  for (const auto& r : rects)
    if (!catenary_clear(c, r)) return false;
  return true;
}

/// Tether lengths tried by the discrete MLTP search: c values evenly spaced
/// on [chord, L], both ends included (just the chord when c = 1).
inline std::vector<double> catenary_lengths(double chord, double L, int c) {
  std::vector<double> out;
  if (c <= 1 || L <= chord) {
    out.push_back(chord);
    return out;
  }
  out.reserve(static_cast<std::size_t>(c));
  for (int k = 0; k < c; ++k) out.push_back(chord + (L - chord) * k / (c - 1));
  out.back() = L;
  return out;
}

/// A catenary tether is usable when it clears every rect and stays above
/// the ground.
inline bool catenary_feasible(const Catenary& c, std::span<const Rect2> rects) {
  return c.min_z() >= -kEps && catenary_clear(c, rects);
}

struct CatenaryTether {
  double length = 0.0;
  Catenary curve;
};

/// Shortest collision-free catenary among the tested lengths, scanning up
/// from the chord.
inline std::optional<CatenaryTether> min_catenary(PlanePoint y, PlanePoint t, double L, int c,
                                                  std::span<const Rect2> rects) {
  const double chord = distance(y, t);
  if (chord > L + kEps) return std::nullopt;
  for (double s : catenary_lengths(chord, std::max(L, chord), c)) {
    Catenary cat;
    try {
      cat = solve_catenary(y, t, s);
    } catch (const Error&) {
      continue;  // slack vertical tether
    }
    if (catenary_feasible(cat, rects)) return CatenaryTether{s, cat};
  }
  return std::nullopt;
}

inline std::optional<double> min_catenary_length(PlanePoint y, PlanePoint t, double L, int c,
                                                 std::span<const Rect2> rects) {
  if (auto r = min_catenary(y, t, L, c, rects)) return r->length;
  return std::nullopt;
}

}  // namespace marsupial
