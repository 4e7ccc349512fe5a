#pragma once

// JSON encoding of scenes, scenario specs and plans.
//
// Scene schema:
//   { "bounds":    {"min": [x,y,z], "max": [x,y,z]},
//     "obstacles": [{"min": [x,y,z], "max": [x,y,z]}, ...],
//     "start":     [x, y],
//     "targets":   [[x,y,z], ...],
//     "params":    {"h": 1.5, "r": 0.5, "L": 50} }
// Unknown keys are rejected so that typos do not pass silently.

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "marsupial/geometry.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/scenario.hpp"

namespace marsupial {

using Json = nlohmann::json;

namespace detail {

inline void only_keys(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidInput, std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw Error(ErrorCode::kInvalidInput,
                  std::string("unknown field '") + it.key() + "' in " + where);
  }
}

inline const Json& need(const Json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw Error(ErrorCode::kInvalidInput, std::string("missing field '") + key + "' in " + where);
  return j.at(key);
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::kInvalidInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::vector<double> numbers(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n)
    throw Error(ErrorCode::kInvalidInput,
                std::string(what) + " must be an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

inline Point3 point3(const Json& j, const char* what) {
  auto v = numbers(j, 3, what);
  return {v[0], v[1], v[2]};
}

inline Cuboid cuboid(const Json& j, const char* what) {
  only_keys(j, {"min", "max"}, what);
  return {point3(need(j, "min", what), what), point3(need(j, "max", what), what)};
}

inline Json to_json(const Point3& p) { return Json::array({p.x, p.y, p.z}); }
inline Json to_json(Vec2 p) { return Json::array({p.x, p.y}); }
inline Json to_json(PlanePoint p) { return Json::array({p.d, p.z}); }
inline Json to_json(const Cuboid& c) {
  return {{"min", to_json(c.min_corner)}, {"max", to_json(c.max_corner)}};
}

inline MarsupialParams params_from(const Json& j) {
  only_keys(j, {"h", "r", "L"}, "params");
  MarsupialParams p;
  if (j.contains("h")) p.h = number(j.at("h"), "params.h");
  if (j.contains("r")) p.r = number(j.at("r"), "params.r");
  if (j.contains("L")) p.L = number(j.at("L"), "params.L");
  return p;
}

}  // namespace detail

inline Json scene_to_json(const Scene& sc) {
  Json j;
  j["bounds"] = detail::to_json(sc.bounds);
  j["obstacles"] = Json::array();
  for (const auto& o : sc.obstacles) j["obstacles"].push_back(detail::to_json(o));
  j["start"] = detail::to_json(sc.start.ground());
  j["targets"] = Json::array();
  for (const auto& t : sc.targets) j["targets"].push_back(detail::to_json(t));
  j["params"] = {{"h", sc.params.h}, {"r", sc.params.r}, {"L", sc.params.L}};
  return j;
}

/// Parses and validates a scene.
inline Scene scene_from_json(const Json& j) {
  using namespace detail;
  only_keys(j, {"bounds", "obstacles", "start", "targets", "params"}, "scene");
  Scene sc;
  sc.bounds = cuboid(need(j, "bounds", "scene"), "bounds");
  const Json& obs = need(j, "obstacles", "scene");
  if (!obs.is_array()) throw Error(ErrorCode::kInvalidInput, "obstacles must be an array");
  for (const auto& o : obs) sc.obstacles.push_back(cuboid(o, "obstacle"));
  const auto s = numbers(need(j, "start", "scene"), 2, "start");
  sc.start = {s[0], s[1], 0.0};
  const Json& ts = need(j, "targets", "scene");
  if (!ts.is_array()) throw Error(ErrorCode::kInvalidInput, "targets must be an array");
  for (const auto& t : ts) sc.targets.push_back(point3(t, "target"));
  if (j.contains("params")) sc.params = params_from(j.at("params"));
  validate_scene(sc);
  return sc;
}

inline Scene scene_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed JSON: ") + e.what());
  }
  return scene_from_json(j);
}

inline ScenarioSpec spec_from_json(const Json& j) {
  using namespace detail;
  only_keys(j,
            {"box", "ground_count", "aerial_count", "side", "target_min_z", "target_max_z",
             "aerial_base_max", "start_offset", "params", "seed"},
            "spec");
  ScenarioSpec s;
  if (j.contains("box")) {
    auto b = numbers(j.at("box"), 3, "box");
    s.box_x = b[0];
    s.box_y = b[1];
    s.box_z = b[2];
  }
  auto count = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer())
      throw Error(ErrorCode::kInvalidInput, std::string(key) + " must be an integer");
    out = j.at(key).get<int>();
  };
  count("ground_count", s.ground_count);
  count("aerial_count", s.aerial_count);
  if (j.contains("side")) s.side = number(j.at("side"), "side");
  if (j.contains("target_min_z")) s.target_min_z = number(j.at("target_min_z"), "target_min_z");
  if (j.contains("target_max_z")) s.target_max_z = number(j.at("target_max_z"), "target_max_z");
  if (j.contains("aerial_base_max"))
    s.aerial_base_max = number(j.at("aerial_base_max"), "aerial_base_max");
  if (j.contains("start_offset")) s.start_offset = number(j.at("start_offset"), "start_offset");
  if (j.contains("params")) s.params = params_from(j.at("params"));
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw Error(ErrorCode::kInvalidInput, "seed must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

inline Json plan_to_json(const PlanResult& plan, const Scene* scene = nullptr) {
  using detail::to_json;
  Json j;
  j["planner"] = plan.planner;
  j["target_index"] = plan.target_index;
  j["target"] = to_json(plan.target);
  j["start"] = to_json(plan.start);
  j["tl_m"] = plan.tl;
  j["ground_length_m"] = plan.ground_length;
  j["aerial_length_m"] = plan.aerial_length;
  j["ground_path"] = Json::array();
  for (Vec2 p : plan.ground_path) j["ground_path"].push_back(to_json(p));
  j["aerial_path"] = Json::array();
  for (const auto& p : plan.aerial_path) j["aerial_path"].push_back(to_json(p));

  const auto& t = plan.takeoff;
  Json tk;
  tk["plane_index"] = t.plane_index();
  tk["side"] = t.side();
  tk["azimuth"] = t.frame.azimuth;
  tk["d"] = t.d;
  tk["x"] = to_json(t.x);
  tk["y"] = to_json(t.y);
  tk["aerial_length"] = t.aerial_length;
  tk["mode"] = to_string(t.mode);
  if (t.chain) {
    tk["chain"] = Json::array();
    for (PlanePoint p : t.chain->vertices) tk["chain"].push_back(to_json(p));
  }
  if (t.curve) {
    const auto& c = *t.curve;
    tk["catenary"] = {{"p1", to_json(c.p1)},
                      {"p2", to_json(c.p2)},
                      {"arc_length", c.arc_length},
                      {"straight", c.straight()},
                      {"a", c.straight() ? Json(nullptr) : Json(c.a)},
                      {"d_v", c.d_v},
                      {"z_v", c.z_v}};
  }
  j["takeoff"] = tk;

  const auto& ts = plan.timings;
  j["timings_s"] = {{"slice", ts.slice_s}, {"pva", ts.pva_s},       {"candidates", ts.cand_s},
                    {"graph", ts.graph_s}, {"search", ts.search_s}, {"total", ts.total_s}};
  const auto& p = plan.params;
  j["params"] = {{"p", p.p}, {"q", p.q}, {"c", p.c}, {"mode", to_string(p.mode)},
                 {"use_pva", p.use_pva}};
  j["candidate_count"] = plan.candidate_count;
  Json meta = Json::object();
  for (const auto& [k, v] : plan.metadata) meta[k] = v;
  j["metadata"] = meta;
  if (scene) j["scene"] = scene_to_json(*scene);
  return j;
}

/// Inverse of plan_to_json for everything the validator and the exporters
/// read. Timings are restored as written.
inline PlanResult plan_from_json(const Json& j) {
  using namespace detail;
  try {
    PlanResult r;
    r.planner = j.at("planner").get<std::string>();
    r.target_index = j.at("target_index").get<int>();
    r.target = point3(j.at("target"), "target");
    auto s = numbers(j.at("start"), 2, "start");
    r.start = {s[0], s[1]};
    r.tl = j.at("tl_m").get<double>();
    r.ground_length = j.at("ground_length_m").get<double>();
    r.aerial_length = j.at("aerial_length_m").get<double>();
    for (const auto& p : j.at("ground_path")) {
      auto v = numbers(p, 2, "ground_path");
      r.ground_path.push_back({v[0], v[1]});
    }
    for (const auto& p : j.at("aerial_path")) r.aerial_path.push_back(point3(p, "aerial_path"));

    const Json& tk = j.at("takeoff");
    auto& t = r.takeoff;
    t.frame.origin = r.target.ground();
    t.frame.target_2d = {0.0, r.target.z};
    t.frame.azimuth = tk.at("azimuth").get<double>();
    t.frame.plane_index = tk.at("plane_index").get<int>();
    t.frame.side = tk.at("side").get<int>();
    t.d = tk.at("d").get<double>();
    auto x = numbers(tk.at("x"), 2, "takeoff.x");
    t.x = {x[0], x[1]};
    t.y = point3(tk.at("y"), "takeoff.y");
    t.aerial_length = tk.at("aerial_length").get<double>();
    t.mode = tk.at("mode").get<std::string>() == "taut" ? TetherMode::kTaut : TetherMode::kCatenary;
    if (tk.contains("chain")) {
      Chain c;
      for (const auto& p : tk.at("chain")) {
        auto v = numbers(p, 2, "chain");
        c.vertices.push_back({v[0], v[1]});
      }
      c.length = t.aerial_length;
      t.chain = c;
    }
    if (tk.contains("catenary")) {
      const Json& c = tk.at("catenary");
      auto p1 = numbers(c.at("p1"), 2, "p1"), p2 = numbers(c.at("p2"), 2, "p2");
      t.curve = solve_catenary({p1[0], p1[1]}, {p2[0], p2[1]}, c.at("arc_length").get<double>());
    }
    if (j.contains("timings_s")) {
      const Json& ts = j.at("timings_s");
      r.timings = {ts.value("slice", 0.0),  ts.value("pva", 0.0),    ts.value("candidates", 0.0),
                   ts.value("graph", 0.0),  ts.value("search", 0.0), ts.value("total", 0.0)};
    }
    if (j.contains("params")) {
      const Json& p = j.at("params");
      r.params.p = p.value("p", 16);
      r.params.q = p.value("q", 30);
      r.params.c = p.value("c", 26);
      r.params.mode = p.value("mode", "catenary") == "taut" ? TetherMode::kTaut : TetherMode::kCatenary;
      r.params.use_pva = p.value("use_pva", true);
    }
    r.candidate_count = j.value("candidate_count", std::size_t{0});
    if (j.contains("metadata"))
      for (auto it = j.at("metadata").begin(); it != j.at("metadata").end(); ++it)
        r.metadata.emplace_back(it.key(), it.value().get<std::string>());
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidInput, std::string("malformed plan: ") + e.what());
  }
}

}  // namespace marsupial
