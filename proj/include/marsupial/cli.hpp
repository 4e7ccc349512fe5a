#pragma once

// Command-line front end. run() parses argv, dispatches to a subcommand and
// maps errors to exit codes: 1 invalid input, 2 unreachable, 3 internal.
// Errors are reported as one JSON object on the error stream.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "marsupial/baseline.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/scenario.hpp"
#include "marsupial/scene_io.hpp"
#include "marsupial/svg.hpp"

namespace marsupial::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUnreachable = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, path + ": malformed JSON: " + e.what());
  }
}

// Writes to the file, or to out when path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInvalidInput, "cannot write " + path);
  f << text;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kInvalidInput, std::string("bad ") + what + ": '" + s + "'");
  return v;
}

inline std::vector<int> int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_number<int>(t, what));
  if (out.empty()) throw Error(ErrorCode::kInvalidInput, std::string(what) + " is empty");
  return out;
}

/// "A..B" inclusive, or a single seed.
inline std::vector<std::uint64_t> seed_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) return {parse_number<std::uint64_t>(s, "seed")};
  const auto a = parse_number<std::uint64_t>(s.substr(0, dots), "seed");
  const auto b = parse_number<std::uint64_t>(s.substr(dots + 2), "seed");
  if (b < a) throw Error(ErrorCode::kInvalidInput, "empty seed range " + s);
  std::vector<std::uint64_t> out;
  for (auto v = a; v <= b; ++v) out.push_back(v);
  return out;
}

inline TetherMode parse_mode(const std::string& s) {
  if (s == "taut") return TetherMode::kTaut;
  if (s == "catenary") return TetherMode::kCatenary;
  throw Error(ErrorCode::kInvalidInput, "mode must be taut or catenary");
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void report(std::ostream& err, const std::string& kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Marsupial UGV-UAV path planner"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "plan with MASPA");
  std::string plan_scene, plan_out, plan_mode = "catenary";
  PlannerParams pp;
  int plan_target = 0;
  bool no_pva = false, sequential = false;
  plan_cmd->add_option("scene", plan_scene, "scene JSON")->required();
  plan_cmd->add_option("--p", pp.p, "full planes in the beam");
  plan_cmd->add_option("--q", pp.q, "candidates per half-plane");
  plan_cmd->add_option("--c", pp.c, "catenary lengths tried");
  plan_cmd->add_option("--mode", plan_mode, "taut or catenary");
  plan_cmd->add_option("--target", plan_target, "target index");
  plan_cmd->add_flag("--no-pva", no_pva, "sample the take-off line without PVA");
  plan_cmd->add_flag("--sequential", sequential, "plan every target in order");
  plan_cmd->add_option("--out", plan_out, "output plan JSON (default stdout)");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a scene");
  std::uint64_t gen_seed = 0;
  std::string gen_spec, gen_out, gen_named;
  gen_cmd->add_option("--seed", gen_seed, "random seed");
  gen_cmd->add_option("--spec", gen_spec, "scenario spec JSON");
  gen_cmd->add_option("--realistic", gen_named, "s1_fireplace or s2_balconies");
  gen_cmd->add_option("--out", gen_out, "output scene JSON (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark grid");
  std::string seeds = "0..9", p_set = "16", q_set = "30", planners = "maspa", bench_out,
              bench_mode = "catenary", bench_spec;
  BenchOptions bo;
  bench_cmd->add_option("--seeds", seeds, "seed range A..B");
  bench_cmd->add_option("--p-set", p_set, "comma separated p values");
  bench_cmd->add_option("--q-set", q_set, "comma separated q values");
  bench_cmd->add_option("--planners", planners, "maspa,maspa-minus,rrt");
  bench_cmd->add_option("--c", bo.c, "catenary lengths tried");
  bench_cmd->add_option("--mode", bench_mode, "taut or catenary");
  bench_cmd->add_option("--budget", bo.rrt_budget_s, "RRT* budget in seconds");
  bench_cmd->add_option("--spec", bench_spec, "scenario spec JSON");
  bench_cmd->add_option("--out", bench_out, "output CSV (default stdout)");

  // rrt
  auto* rrt_cmd = app.add_subcommand("rrt", "plan with the RRT* baseline");
  std::string rrt_scene, rrt_out;
  RrtParams rp;
  int rrt_target = 0;
  rrt_cmd->add_option("scene", rrt_scene, "scene JSON")->required();
  rrt_cmd->add_option("--budget", rp.budget_s, "time budget in seconds");
  rrt_cmd->add_option("--seed", rp.seed, "random seed");
  rrt_cmd->add_option("--step", rp.step, "extension step in metres");
  rrt_cmd->add_option("--iterations", rp.max_iterations, "iteration cap (0 = none)");
  rrt_cmd->add_option("--c", rp.c, "catenary lengths tried");
  rrt_cmd->add_option("--target", rrt_target, "target index");
  rrt_cmd->add_option("--out", rrt_out, "output plan JSON (default stdout)");

  // export
  auto* exp_cmd = app.add_subcommand("export", "write an SVG figure");
  std::string exp_in, exp_svg, exp_view = "top";
  int exp_p = 16, exp_target = 0;
  exp_cmd->add_option("input", exp_in, "plan or scene JSON")->required();
  exp_cmd->add_option("--svg", exp_svg, "output SVG")->required();
  exp_cmd->add_option("--view", exp_view, "top or plane:k");
  exp_cmd->add_option("--p", exp_p, "full planes when exporting a scene");
  exp_cmd->add_option("--target", exp_target, "target index when exporting a scene");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "check a plan against its scene");
  std::string val_plan, val_scene;
  val_cmd->add_option("plan", val_plan, "plan JSON")->required();
  val_cmd->add_option("--scene", val_scene, "scene JSON (default: the embedded one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, "InvalidInput", e.what());
    return kExitInvalid;
  }

  try {
    if (*plan_cmd) {
      const Scene scene = scene_from_json(read_json(plan_scene));
      pp.mode = parse_mode(plan_mode);
      pp.use_pva = !no_pva;
      pp.threads = threads;
      if (sequential) {
        Json arr = Json::array();
        for (const auto& r : plan_sequential(scene, pp)) arr.push_back(plan_to_json(r, &scene));
        emit(plan_out, dump(Json{{"plans", arr}}), out);
      } else {
        if (plan_target < 0) throw Error(ErrorCode::kInvalidInput, "target index out of range");
        const auto r = maspa_plan(scene, static_cast<std::size_t>(plan_target), pp);
        emit(plan_out, dump(plan_to_json(r, &scene)), out);
      }
    } else if (*gen_cmd) {
      Scene scene;
      if (!gen_named.empty()) {
        scene = build_realistic(gen_named);
      } else {
        ScenarioSpec spec = gen_spec.empty() ? ScenarioSpec{} : spec_from_json(read_json(gen_spec));
        if (gen_cmd->count("--seed") || gen_spec.empty()) spec.seed = gen_seed;
        scene = random_scenario(spec);
      }
      emit(gen_out, dump(scene_to_json(scene)), out);
    } else if (*bench_cmd) {
      bo.mode = parse_mode(bench_mode);
      bo.threads = threads;
      if (!bench_spec.empty()) bo.spec = spec_from_json(read_json(bench_spec));
      const auto result = benchmark_grid(seed_range(seeds), int_list(p_set, "p-set"),
                                         int_list(q_set, "q-set"), split(planners, ','), bo);
      std::ostringstream csv;
      write_bench_csv(csv, result.records);
      emit(bench_out, csv.str(), out);
      for (const auto& f : result.failures)
        err << Json{{"scenario", f.scenario}, {"seed", f.seed}, {"planner", f.planner},
                    {"p", f.p},               {"q", f.q},       {"error", f.error}}
                   .dump()
            << "\n";
    } else if (*rrt_cmd) {
      const Scene scene = scene_from_json(read_json(rrt_scene));
      if (rrt_target < 0) throw Error(ErrorCode::kInvalidInput, "target index out of range");
      const auto r = rrt_star_plan(scene, static_cast<std::size_t>(rrt_target), rp);
      emit(rrt_out, dump(plan_to_json(r, &scene)), out);
    } else if (*exp_cmd) {
      const Json j = read_json(exp_in);
      const bool is_plan = j.is_object() && j.contains("planner");
      std::optional<PlanResult> plan;
      Scene scene;
      if (is_plan) {
        if (!j.contains("scene"))
          throw Error(ErrorCode::kInvalidInput, "plan JSON has no embedded scene");
        plan = plan_from_json(j);
        scene = scene_from_json(j.at("scene"));
      } else {
        scene = scene_from_json(j);
      }
      std::string svg;
      if (exp_view == "top") {
        svg = svg_top_view(scene, plan ? &*plan : nullptr);
      } else if (exp_view.rfind("plane:", 0) == 0) {
        const int k = parse_number<int>(exp_view.substr(6), "plane index");
        if (plan) {
          const int p = plan->params.p;
          svg = svg_plane_view(scene, static_cast<std::size_t>(plan->target_index), p, k,
                               plan->start, &*plan);
        } else {
          if (exp_target < 0) throw Error(ErrorCode::kInvalidInput, "target index out of range");
          svg = svg_plane_view(scene, static_cast<std::size_t>(exp_target), exp_p, k,
                               scene.start.ground());
        }
      } else {
        throw Error(ErrorCode::kInvalidInput, "view must be top or plane:k");
      }
      emit(exp_svg, svg, out);
    } else if (*val_cmd) {
      const Json j = read_json(val_plan);
      const PlanResult plan = plan_from_json(j);
      Scene scene;
      if (!val_scene.empty()) {
        scene = scene_from_json(read_json(val_scene));
      } else if (j.contains("scene")) {
        scene = scene_from_json(j.at("scene"));
      } else {
        throw Error(ErrorCode::kInvalidInput, "no scene given and none embedded");
      }
      const auto v = plan_violations(scene, plan);
      out << Json{{"valid", v.empty()}, {"violations", v}}.dump() << "\n";
      if (!v.empty()) return kExitInvalid;
    }
  } catch (const Error& e) {
    const bool unreachable =
        e.code() == ErrorCode::kUnreachable || e.code() == ErrorCode::kNoCandidates;
    report(err, to_string(e.code()), e.what());
    return unreachable ? kExitUnreachable : kExitInvalid;
  } catch (const std::exception& e) {
    report(err, "Internal", e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace marsupial::cli
