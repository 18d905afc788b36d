#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lemnikit/polynomial.hpp"

namespace fs = std::filesystem;
using lemnikit::json;

#ifndef LEMNIKIT_CLI_PATH
#error "LEMNIKIT_CLI_PATH must point at the built binary"
#endif

namespace {

struct temp_dir {
  fs::path path;
  temp_dir() {
    path = fs::temp_directory_path() / ("lemnikit_cli_XXXXXX" + std::to_string(::getpid()) +
                                        "_" + std::to_string(counter()));
    fs::create_directories(path);
  }
  ~temp_dir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
};

int run(const std::string& args) {
  std::string cmd = std::string(LEMNIKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::path f = dir / name;
  std::ofstream(f) << content;
  return f;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSquare = R"({"coeffs": [[-1,0],[0,0],[1,0]]})";           // z^2 - 1
const char* kCubic = R"({"coeffs": [[0,0],[0,0],[-0.75,0],[0.5,0]]})";  // z^3/2 - 3z^2/4

}  // namespace

TEST_CASE("analyze: two eligible ovals, exit 0, valid schema") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kSquare);
  auto out = td.path / "out";
  REQUIRE(run("analyze " + poly.string() + " --tau 0.5 --out " + out.string()) == 0);
  json doc = json::parse(slurp(out / "report.json"));
  CHECK(doc["schema"] == "lemnikit/1");
  CHECK(doc["degree"] == 2);
  REQUIRE(doc["components"].size() == 2);
  for (const auto& c : doc["components"]) {
    CHECK(c["eligible"] == true);
    CHECK(c["bound_report"]["verdict"] == "HOLDS");
    CHECK(c["bound_report"]["max_bound"].get<double>() <= 2.0 + 1e-8);
  }
  CHECK(doc["verdict_summary"]["any_violated"] == false);
}

TEST_CASE("analyze: connected cubic is inapplicable but reported") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kCubic);
  auto out = td.path / "out";
  REQUIRE(run("analyze " + poly.string() + " --tau 1.0 --out " + out.string()) == 0);
  json doc = json::parse(slurp(out / "report.json"));
  REQUIRE(doc["components"].size() == 1);
  CHECK(doc["components"][0]["eligible"] == false);
  CHECK(doc["components"][0]["bound_report"]["verdict"] == "INAPPLICABLE");
  // the max over samples sees the value 6 at z = 2
  CHECK(doc["components"][0]["bound_report"]["max_bound"].get<double>() >= 6.0 - 1e-8);
}

TEST_CASE("analyze is byte-deterministic for a fixed seed") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kSquare);
  auto o1 = td.path / "o1", o2 = td.path / "o2";
  REQUIRE(run("analyze " + poly.string() + " --tau 0.5 --seed 42 --out " + o1.string()) == 0);
  REQUIRE(run("analyze " + poly.string() + " --tau 0.5 --seed 42 --out " + o2.string()) == 0);
  CHECK(slurp(o1 / "report.json") == slurp(o2 / "report.json"));
  CHECK(!slurp(o1 / "report.json").empty());
}

TEST_CASE("exit codes: parse failures give 2, numerical failures 3") {
  temp_dir td;
  auto bad = write_file(td.path, "bad.json", "{ not json");
  CHECK(run("analyze " + bad.string()) == 2);
  CHECK(run("analyze " + (td.path / "missing.json").string()) == 2);
  auto constant = write_file(td.path, "c.json", R"({"coeffs": [[1,0]]})");
  CHECK(run("analyze " + constant.string()) == 2);

  // tau exactly at the critical value 1 of z^2 - 1
  auto poly = write_file(td.path, "p.json", kSquare);
  CHECK(run("analyze " + poly.string() + " --tau 1.0") == 3);
}

TEST_CASE("trace: emits parseable json and an svg document") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kSquare);
  auto out = td.path / "out";
  REQUIRE(run("trace " + poly.string() + " --levels 0.5 2.0 --out " + out.string()) == 0);
  json doc = json::parse(slurp(out / "trace.json"));
  // two ovals at 0.5, one loop at 2.0
  CHECK(doc["curves"].size() == 3);
  for (const auto& c : doc["curves"]) CHECK(c["closed"] == true);

  std::string svg = slurp(out / "trace.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<path") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);  // zeros drawn as dots

  // tracing at a critical level must fail numerically, not hang
  CHECK(run("trace " + poly.string() + " --levels 1.0") == 3);
}

TEST_CASE("inverse: branch report from a simple zero") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kSquare);
  auto out = td.path / "out";
  REQUIRE(run("inverse " + poly.string() + " --zero 1 --steps 8 --out " + out.string()) == 0);
  json doc = json::parse(slurp(out / "inverse.json"));
  CHECK(doc["holds"] == true);
  CHECK(doc["min_ratio"].get<double>() >= 0.5 - 1e-9);
  CHECK(doc["path"]["samples"].size() == 8);

  CHECK(run("inverse " + poly.string() + " --zero 9") == 2);
}

TEST_CASE("capacity: annulus spec file") {
  temp_dir td;
  json spec{{"plate0", {{{"type", "exterior_disk"}, {"radius", 1.3591409142295225}}}},
            {"plate1", {{{"type", "disk"}, {"center", {0.0, 0.0}}, {"radius", 0.5}}}},
            {"box", {-1.5, 1.5, -1.5, 1.5}}};
  auto sf = write_file(td.path, "cond.json", spec.dump());
  auto out = td.path / "out";
  REQUIRE(run("capacity " + sf.string() + " --grid 65 129 257 --out " + out.string()) == 0);
  json doc = json::parse(slurp(out / "capacity.json"));
  double v = doc["estimate"]["value"].get<double>();
  CHECK(std::abs(v - 2.0 * M_PI) < 0.05 * 2.0 * M_PI);
  CHECK(doc["estimate"]["refinement_history"].size() == 3);
}

TEST_CASE("report: analyze plus capacity study") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kSquare);
  auto out = td.path / "out";
  REQUIRE(run("report " + poly.string() + " --tau 0.5 --grid 65 129 257 --out " +
              out.string()) == 0);
  json doc = json::parse(slurp(out / "report.json"));
  REQUIRE(!doc["capacity_study"].is_null());
  CHECK(doc["capacity_study"]["numeric"]["value"].get<double>() > 0.0);
  CHECK(doc["capacity_study"]["asymptotic_slit"].get<double>() > 0.0);
}

TEST_CASE("config file is honored and flags override it") {
  temp_dir td;
  auto poly = write_file(td.path, "p.json", kSquare);
  auto cfg = write_file(td.path, "run.cfg", "tau = 0.5\nseed = 5  # comment\n");
  auto o1 = td.path / "o1", o2 = td.path / "o2";
  REQUIRE(run("analyze " + poly.string() + " --config " + cfg.string() + " --out " +
              o1.string()) == 0);
  json d1 = json::parse(slurp(o1 / "report.json"));
  CHECK(d1["config"]["tau"] == 0.5);
  CHECK(d1["config"]["seed"] == 5);

  REQUIRE(run("analyze " + poly.string() + " --config " + cfg.string() + " --seed 7 --out " +
              o2.string()) == 0);
  json d2 = json::parse(slurp(o2 / "report.json"));
  CHECK(d2["config"]["seed"] == 7);

  auto badcfg = write_file(td.path, "bad.cfg", "no_such_key = 1\n");
  CHECK(run("analyze " + poly.string() + " --config " + badcfg.string()) == 2);
}
