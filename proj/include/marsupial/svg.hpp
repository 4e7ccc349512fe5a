#pragma once

// Deterministic SVG 1.1 figures: a top view of the scene with the ground
// path, and a profile of one half-plane of the beam with its visible
// intervals and tether. Numbers use fixed precision so equal inputs give
// byte-identical files.

#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "marsupial/geometry.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/pva2d.hpp"
#include "marsupial/pva3d.hpp"

namespace marsupial {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v == 0.0 ? 0.0 : v);
  return buf;
}

// World units map to SVG units with a y flip; one unit per metre times scale.
class SvgCanvas {
 public:
  SvgCanvas(double x0, double y0, double x1, double y1, double scale)
      : x0_(x0), y1_(y1), scale_(scale), w_((x1 - x0) * scale), h_((y1 - y0) * scale) {}

  double sx(double x) const { return (x - x0_) * scale_; }
  double sy(double y) const { return (y1_ - y) * scale_; }

  void rect(double xa, double ya, double xb, double yb, const std::string& style) {
    out_ << "<rect x=\"" << num(sx(xa)) << "\" y=\"" << num(sy(yb)) << "\" width=\""
         << num((xb - xa) * scale_) << "\" height=\"" << num((yb - ya) * scale_) << "\" "
         << style << "/>\n";
  }
  void line(double xa, double ya, double xb, double yb, const std::string& style) {
    out_ << "<line x1=\"" << num(sx(xa)) << "\" y1=\"" << num(sy(ya)) << "\" x2=\""
         << num(sx(xb)) << "\" y2=\"" << num(sy(yb)) << "\" " << style << "/>\n";
  }
  void circle(double x, double y, double r, const std::string& style) {
    out_ << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"" << num(r)
         << "\" " << style << "/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    if (pts.size() < 2) return;
    out_ << "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      out_ << (i ? " " : "") << num(sx(pts[i].first)) << "," << num(sy(pts[i].second));
    out_ << "\" fill=\"none\" " << style << "/>\n";
  }
  void text(double x, double y, const std::string& s) {
    out_ << "<text x=\"" << num(sx(x) + 4.0) << "\" y=\"" << num(sy(y) - 4.0)
         << "\" font-family=\"sans-serif\" font-size=\"10\">" << s << "</text>\n";
  }

  std::string str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w_)
       << "\" height=\"" << num(h_) << "\" viewBox=\"0 0 " << num(w_) << " " << num(h_)
       << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << num(w_) << "\" height=\"" << num(h_)
       << "\" fill=\"white\"/>\n"
       << out_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double x0_, y1_, scale_, w_, h_;
  std::ostringstream out_;
};

}  // namespace detail

/// Top view: inflated footprints (UGV-blocking ones dark), S, targets and,
/// when a plan is given, its ground path, take-off point and the aerial
/// path projected on the ground.
inline std::string svg_top_view(const Scene& scene, const PlanResult* plan = nullptr,
                                double scale = 10.0) {
  const auto& b = scene.bounds;
  detail::SvgCanvas svg(b.min_corner.x, b.min_corner.y, b.max_corner.x, b.max_corner.y, scale);
  svg.rect(b.min_corner.x, b.min_corner.y, b.max_corner.x, b.max_corner.y,
           "fill=\"none\" stroke=\"black\"");
  for (const auto& o : scene.inflated_obstacles()) {
    const bool ground = blocks_ugv(o, scene.params);
    svg.rect(o.min_corner.x, o.min_corner.y, o.max_corner.x, o.max_corner.y,
             ground ? "fill=\"#555555\" fill-opacity=\"0.8\" stroke=\"black\""
                    : "fill=\"#9bb7d4\" fill-opacity=\"0.4\" stroke=\"#4a6f94\"");
  }
  const Vec2 s = plan ? plan->start : scene.start.ground();
  svg.circle(s.x, s.y, 4.0, "fill=\"#2a9d2a\"");
  svg.text(s.x, s.y, "S");
  for (std::size_t i = 0; i < scene.targets.size(); ++i) {
    const auto& t = scene.targets[i];
    svg.circle(t.x, t.y, 4.0, "fill=\"#d62728\"");
    svg.text(t.x, t.y, "T" + std::to_string(i));
  }
  if (plan) {
    std::vector<std::pair<double, double>> g;
    for (Vec2 p : plan->ground_path) g.emplace_back(p.x, p.y);
    svg.polyline(g, "stroke=\"#2a9d2a\" stroke-width=\"2\"");
    std::vector<std::pair<double, double>> a;
    for (const auto& p : plan->aerial_path) a.emplace_back(p.x, p.y);
    svg.polyline(a, "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"4,3\"");
    const Vec2 x = plan->takeoff.x;
    svg.circle(x.x, x.y, 3.0, "fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"");
  }
  return svg.str();
}

/// Profile of half-plane k of the beam used for the given target: rects,
/// take-off line, visible intervals (green) and, when the plan took off on
/// this half-plane, its tether.
inline std::string svg_plane_view(const Scene& scene, std::size_t target_index, int p, int k,
                                  Vec2 start, const PlanResult* plan = nullptr,
                                  double scale = 10.0) {
  if (target_index >= scene.targets.size())
    throw Error(ErrorCode::kInvalidInput, "target index out of range");
  if (p < 1) throw Error(ErrorCode::kInvalidInput, "p must be at least 1");
  if (k < 0 || k >= 2 * p)
    throw Error(ErrorCode::kInvalidInput, "plane index must be in [0, 2p)");
  const Point3 target = scene.targets[target_index];
  auto beam = plane_beam(target, p, beam_phase(target, start, p));
  const auto planes = pva3d(scene, target, std::vector<PlaneFrame>{beam[static_cast<std::size_t>(k)]}, 1);
  const auto& hp = planes.front();
  const auto& ps = hp.vis.ctx.scene;

  const double d_hi = std::max(scene.params.L, 1.0);
  const double z_hi = std::max(scene.bounds.max_corner.z, target.z + 1.0);
  detail::SvgCanvas svg(-2.0, 0.0, d_hi, z_hi, scale);
  svg.line(-2.0, 0.0, d_hi, 0.0, "stroke=\"black\"");
  for (const auto& r : ps.rects) {
    if (r.d_min >= d_hi) continue;
    svg.rect(std::max(r.d_min, -2.0), r.z_min, std::min(r.d_max, d_hi), r.z_max,
             "fill=\"#777777\" fill-opacity=\"0.7\" stroke=\"black\"");
  }
  const double t = ps.take_off_z;
  svg.line(0.0, t, d_hi, t, "stroke=\"#999999\" stroke-dasharray=\"3,3\"");
  for (const auto& iv : hp.vis.intervals.visible)
    svg.line(iv.lo, t, std::min(iv.hi, d_hi), t, "stroke=\"#2a9d2a\" stroke-width=\"4\"");
  svg.line(0.0, 0.0, 0.0, z_hi, "stroke=\"#d62728\" stroke-dasharray=\"2,2\"");
  svg.circle(0.0, ps.target_2d.z, 4.0, "fill=\"#d62728\"");
  svg.text(0.0, ps.target_2d.z, "T");

  if (plan && plan->takeoff.plane_index() == hp.frame.plane_index &&
      plan->takeoff.side() == hp.frame.side &&
      std::abs(plan->takeoff.frame.azimuth - hp.frame.azimuth) < 1e-9) {
    std::vector<std::pair<double, double>> pts;
    if (plan->takeoff.curve) {
      for (PlanePoint q : plan->takeoff.curve->sample(128)) pts.emplace_back(q.d, q.z);
    } else if (plan->takeoff.chain) {
      for (PlanePoint q : plan->takeoff.chain->vertices) pts.emplace_back(q.d, q.z);
    }
    svg.polyline(pts, "stroke=\"#d62728\" stroke-width=\"2\"");
    svg.circle(plan->takeoff.d, t, 3.0, "fill=\"#d62728\"");
  }
  svg.text(-2.0, z_hi - 1.0,
           "azimuth " + detail::num(hp.frame.azimuth) + " rad, half-plane " + std::to_string(k));
  return svg.str();
}

}  // namespace marsupial
