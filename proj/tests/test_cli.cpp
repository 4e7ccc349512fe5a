#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "marsupial/cli.hpp"
#include "marsupial/scene_io.hpp"
#include "support.hpp"

using namespace marsupial;
using namespace marsupial::testing;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "marsupial");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("marsupial_cli_" + std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("cli help and usage errors", "[cli]") {
  CHECK(call({"--help"}).code == cli::kExitOk);
  CHECK(call({"plan", "--help"}).code == cli::kExitOk);
  CHECK(call({"frobnicate"}).code == cli::kExitInvalid);
  CHECK(call({"plan"}).code == cli::kExitInvalid);
  CHECK(call({"plan", "/nonexistent/scene.json"}).code == cli::kExitInvalid);
}

TEST_CASE("cli gen, plan and validate round trip", "[cli]") {
  TempDir tmp;
  const auto scene = tmp.file("scene.json"), plan = tmp.file("plan.json");
  REQUIRE(call({"gen", "--seed", "3", "--out", scene}).code == cli::kExitOk);
  const Scene sc = scene_from_string(slurp(scene));
  CHECK(sc.obstacles.size() == 25);

  const auto planned = call({"plan", scene, "--p", "8", "--q", "15", "--out", plan});
  REQUIRE(planned.code == cli::kExitOk);
  const Json j = Json::parse(slurp(plan));
  CHECK(j.at("planner") == "maspa");
  CHECK(j.at("params").at("p") == 8);
  CHECK(j.contains("scene"));
  CHECK(j.at("tl_m").get<double>() ==
        Approx(j.at("ground_length_m").get<double>() + j.at("aerial_length_m").get<double>()));

  const auto ok = call({"validate", plan});
  CHECK(ok.code == cli::kExitOk);
  CHECK(Json::parse(ok.out).at("valid") == true);

  // Tampering with TL is caught.
  Json bad = j;
  bad["tl_m"] = j.at("tl_m").get<double>() + 5.0;
  write(tmp.file("bad.json"), bad.dump());
  const auto rejected = call({"validate", tmp.file("bad.json")});
  CHECK(rejected.code == cli::kExitInvalid);
  CHECK(Json::parse(rejected.out).at("valid") == false);
}

TEST_CASE("cli plan writes to stdout", "[cli]") {
  TempDir tmp;
  const auto scene = tmp.file("scene.json");
  write(scene, scene_to_json(open_scene({0, 0, 26}, {20, 0})).dump());
  const auto o = call({"plan", scene, "--mode", "taut"});
  REQUIRE(o.code == cli::kExitOk);
  CHECK(Json::parse(o.out).at("tl_m").get<double>() == Approx(std::sqrt(1025.0)));
  CHECK(call({"plan", scene, "--mode", "slack"}).code == cli::kExitInvalid);
  CHECK(call({"plan", scene, "--target", "4"}).code == cli::kExitInvalid);
}

TEST_CASE("cli exit code for unreachable targets", "[cli]") {
  TempDir tmp;
  const auto scene = tmp.file("short.json");
  write(scene, scene_to_json(open_scene({0, 0, 26}, {20, 0}, 20.0)).dump());
  const auto o = call({"plan", scene});
  CHECK(o.code == cli::kExitUnreachable);
  CHECK(Json::parse(o.err).contains("error"));
}

TEST_CASE("cli rejects malformed scenes", "[cli]") {
  TempDir tmp;
  write(tmp.file("broken.json"), "{\"obstacles\": [");
  CHECK(call({"plan", tmp.file("broken.json")}).code == cli::kExitInvalid);
  Json j = scene_to_json(open_scene({0, 0, 26}, {20, 0}));
  j["colour"] = "red";
  write(tmp.file("extra.json"), j.dump());
  CHECK(call({"plan", tmp.file("extra.json")}).code == cli::kExitInvalid);
}

TEST_CASE("cli sequential plans", "[cli]") {
  TempDir tmp;
  const auto scene = tmp.file("s2.json");
  REQUIRE(call({"gen", "--realistic", "s2_balconies", "--out", scene}).code == cli::kExitOk);
  const auto o = call({"plan", scene, "--sequential"});
  REQUIRE(o.code == cli::kExitOk);
  const Json j = Json::parse(o.out);
  REQUIRE(j.at("plans").size() == 2);
  CHECK(j["plans"][1]["start"] == Json(j["plans"][0]["takeoff"]["x"]));
  CHECK(call({"gen", "--realistic", "s9"}).code == cli::kExitInvalid);
}

TEST_CASE("cli rrt", "[cli]") {
  TempDir tmp;
  const auto scene = tmp.file("scene.json");
  REQUIRE(call({"gen", "--seed", "1", "--out", scene}).code == cli::kExitOk);
  const auto a = call({"rrt", scene, "--iterations", "400", "--budget", "100", "--seed", "2"});
  const auto b = call({"rrt", scene, "--iterations", "400", "--budget", "100", "--seed", "2"});
  REQUIRE(a.code == cli::kExitOk);
  const Json ja = Json::parse(a.out), jb = Json::parse(b.out);
  CHECK(ja.at("planner") == "rrt_star");
  CHECK(ja.at("tl_m") == jb.at("tl_m"));
  CHECK(ja.at("ground_path") == jb.at("ground_path"));
}

TEST_CASE("cli bench", "[cli]") {
  const auto o = call({"bench", "--seeds", "1..2", "--p-set", "2,4", "--q-set", "8", "--planners",
                       "maspa,maspa-minus"});
  REQUIRE(o.code == cli::kExitOk);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == kBenchHeader);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  int failures = 0;
  std::istringstream errs(o.err);
  while (std::getline(errs, line)) ++failures;
  CHECK(rows + failures == 8);
  CHECK(call({"bench", "--seeds", "5..2"}).code == cli::kExitInvalid);
  CHECK(call({"bench", "--planners", "astar"}).code == cli::kExitInvalid);
}

TEST_CASE("cli export is deterministic", "[cli]") {
  TempDir tmp;
  const auto scene = tmp.file("scene.json"), plan = tmp.file("plan.json");
  write(scene, scene_to_json(wall_scene()).dump());
  REQUIRE(call({"plan", scene, "--p", "4", "--out", plan}).code == cli::kExitOk);
  for (const std::string view : {"top", "plane:0"}) {
    const auto a = tmp.file("a.svg"), b = tmp.file("b.svg");
    REQUIRE(call({"export", plan, "--svg", a, "--view", view}).code == cli::kExitOk);
    REQUIRE(call({"export", plan, "--svg", b, "--view", view}).code == cli::kExitOk);
    const std::string sa = slurp(a);
    CHECK(sa == slurp(b));
    CHECK(sa.rfind("<?xml", 0) == 0);
    CHECK(sa.find("</svg>") != std::string::npos);
  }
  REQUIRE(call({"export", scene, "--svg", tmp.file("s.svg"), "--view", "plane:3", "--p", "4"}).code ==
          cli::kExitOk);
  CHECK(call({"export", scene, "--svg", tmp.file("x.svg"), "--view", "plane:99", "--p", "4"}).code ==
        cli::kExitInvalid);
  CHECK(call({"export", scene, "--svg", tmp.file("x.svg"), "--view", "side"}).code ==
        cli::kExitInvalid);
}
