#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "wfr/cli.hpp"
#include "wfr/measure_io.hpp"

using namespace wfr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "wfr_spline");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  std::ostringstream silenced;
  std::streambuf* old_err = std::cerr.rdbuf(silenced.rdbuf());
  Outcome o;
  try {
    o.code = run_cli(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old);
  std::cerr.rdbuf(old_err);
  o.out = captured.str();
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path("cli_test_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text(e.path());
  }
  return files;
}

std::string dirac_csv(double x, double mass) {
  std::ostringstream s;
  s << "x1,mass\n" << format_double(x) << ',' << format_double(mass) << '\n';
  return s.str();
}

}  // namespace

TEST_CASE("distance command") {
  const auto dir = scratch("distance");
  write_text(dir / "a.csv", "x1,mass\n0,1\n0.5,2\n");
  write_text(dir / "p0.csv", dirac_csv(0.0, 1.0));
  write_text(dir / "p1.csv", dirac_csv(std::numbers::pi / 3, 1.0));
  write_text(dir / "bad.csv", "x1,mass\n0,oops\n");

  const auto same = run({"distance", (dir / "a.csv").string(), (dir / "a.csv").string()});
  CHECK(same.code == kExitOk);
  const auto j = json::parse(same.out);
  CHECK(j["distance"].get<double>() <= 0.05);
  CHECK(j.contains("iterations"));
  CHECK(j.contains("residual"));

  const auto pair = run({"distance", (dir / "p0.csv").string(), (dir / "p1.csv").string(), "--epsilon", "1e-4"});
  CHECK(pair.code == kExitOk);
  CHECK(json::parse(pair.out)["distance"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));

  CHECK(run({"distance", (dir / "bad.csv").string(), (dir / "a.csv").string()}).code == kExitInput);
  CHECK(run({"distance", (dir / "missing.csv").string(), (dir / "a.csv").string()}).code == kExitInput);

  write_text(dir / "b.csv", "x1,mass\n0.1,1\n0.3,0.5\n0.9,2\n");
  const auto capped = run({"distance", (dir / "a.csv").string(), (dir / "b.csv").string(), "--max-iters", "1"});
  CHECK(capped.code == kExitNonconvergence);
}

TEST_CASE("geodesic command") {
  const auto ok = run({"geodesic", "--x0", "0", "--r0", "1", "--x1", "1", "--r1", "2", "--samples", "5"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("t,") == 0);
  const auto far = run({"geodesic", "--x0", "0", "--x1", "2"});
  CHECK(far.code == kExitGeometry);
  CHECK(run({"geodesic", "--x0", "0", "--x1", "0.1", "--r0", "-1"}).code == kExitInput);
}

TEST_CASE("spline command with identical measures") {
  const auto dir = scratch("spline_identical");
  write_text(dir / "mu.csv", "x1,mass\n0,1\n0.5,2\n1,0.5\n");
  const auto out = dir / "run";
  const auto r = run({"spline", "--measure", (dir / "mu.csv").string(), "--measure", (dir / "mu.csv").string(),
                      "--times", "0,1", "--samples", "4", "--output", out.string()});
  REQUIRE(r.code == kExitOk);
  for (int k = 0; k <= 4; ++k) {
    const auto mu = read_measure_csv(out / "curve" / ("t_" + std::to_string(k) + ".csv"));
    CHECK(total_mass(mu) == doctest::Approx(3.5).epsilon(1e-9));
  }
  CHECK(fs::exists(out / "times.csv"));
  CHECK(fs::exists(out / "trajectories.csv"));
  const auto summary = json::parse(read_text(out / "summary.json"));
  for (const char* key : {"schema_version", "seed", "config", "segments", "scales", "mass", "curvature", "samples",
                          "all_converged"}) {
    CHECK_MESSAGE(summary.contains(key), key);
  }
  CHECK(summary["segments"].size() == 1);
  CHECK(summary["segments"][0]["wfr_distance"].is_number());
  CHECK(summary["scales"]["space_scale"].get<double>() == 1.0);
  CHECK(summary["mass"]["vanished_mass"].get<double>() == 0.0);
  CHECK(summary["curvature"]["total"].get<double>() <= 1e-10);
  CHECK(read_text(out / "trajectories.csv").rfind("particle,knot,x1,r,v1,s", 0) == 0);
}

TEST_CASE("spline command validation") {
  const auto dir = scratch("spline_invalid");
  write_text(dir / "mu.csv", "x1,mass\n0,1\n");
  const auto mu = (dir / "mu.csv").string();
  CHECK(run({"spline", "--measure", mu, "--measure", mu, "--times", "1,0", "--output", (dir / "o").string()}).code ==
        kExitInput);
  CHECK(run({"spline", "--measure", mu, "--measure", mu, "--times", "0,1,2", "--output", (dir / "o").string()}).code ==
        kExitInput);
  write_text(dir / "config.json", R"({"times": [0, 1], "bogus": 3})");
  CHECK(run({"spline", "--config", (dir / "config.json").string(), "--measure", mu, "--measure", mu}).code ==
        kExitInput);
  write_text(dir / "config2.json", R"({"times": [0, 1], "epsilon": -1})");
  CHECK(run({"spline", "--config", (dir / "config2.json").string(), "--measure", mu, "--measure", mu}).code ==
        kExitInput);
  CHECK(run({"spline", "--bogus-flag"}).code == kExitInput);
  CHECK(run({}).code == kExitInput);
}

TEST_CASE("config file and round trip") {
  const auto dir = scratch("config");
  write_text(dir / "mu0.csv", "x1,mass\n0,1\n0.2,1\n");
  write_text(dir / "mu1.csv", "x1,mass\n0.1,2\n0.3,1\n");
  json cfg = {{"measures", {(dir / "mu0.csv").string(), (dir / "mu1.csv").string()}},
              {"times", {0.0, 2.0}},
              {"epsilon", 1e-3},
              {"samples_per_segment", 3},
              {"output", (dir / "from_config").string()}};
  write_text(dir / "run.json", cfg.dump());
  REQUIRE(run({"spline", "--config", (dir / "run.json").string()}).code == kExitOk);
  const auto summary = json::parse(read_text(dir / "from_config" / "summary.json"));
  CHECK(summary["config"]["epsilon"].get<double>() == 1e-3);
  CHECK(summary["samples"].get<int>() == 4);
  CHECK(parse_run_config(run_config_to_json(parse_run_config(cfg))).times == std::vector<double>{0.0, 2.0});
  // Flags override the file.
  REQUIRE(run({"spline", "--config", (dir / "run.json").string(), "--epsilon", "2e-3", "--output",
               (dir / "flag").string()}).code == kExitOk);
  CHECK(json::parse(read_text(dir / "flag" / "summary.json"))["config"]["epsilon"].get<double>() == 2e-3);
}

TEST_CASE("one-dimensional experiment") {
  const auto dir = scratch("one_dim");
  const auto r = run({"experiment", "one-dim", "--output", dir.string(), "--samples", "6"});
  REQUIRE(r.code == kExitOk);
  const auto runs = json::parse(read_text(dir / "one-dim" / "runs.json"));
  REQUIRE(runs.size() == 3);
  std::vector<std::map<std::string, std::string>> curves;
  for (const auto& entry : runs) {
    const fs::path run_dir = dir / "one-dim" / entry["directory"].get<std::string>();
    CHECK(entry["all_converged"].get<bool>());
    const auto summary = json::parse(read_text(run_dir / "summary.json"));
    const auto input = summary["mass"]["input"].get<std::vector<double>>();
    const auto knot = summary["mass"]["knot"].get<std::vector<double>>();
    for (std::size_t k = 0; k < input.size(); ++k) CHECK(knot[k] == doctest::Approx(input[k]).epsilon(2e-2));
    curves.push_back(snapshot(run_dir / "curve"));
  }
  // Times (0,1,2,10) against (0,8,9,10): same number of files, different curves.
  CHECK(curves[0].size() == curves[2].size());
  CHECK(curves[0] != curves[2]);
  for (int k = 0; k < 4; ++k) CHECK(fs::exists(dir / "one-dim" / "measures" / ("mu_" + std::to_string(k) + ".csv")));
}

TEST_CASE("experiment overrides are recorded") {
  const auto dir = scratch("override");
  REQUIRE(run({"experiment", "one-dim", "--output", dir.string(), "--times", "0,1,2,3", "--epsilon", "5e-4",
               "--resolution", "128", "--samples", "2"}).code == kExitOk);
  const auto runs = json::parse(read_text(dir / "one-dim" / "runs.json"));
  REQUIRE(runs.size() == 1);
  const auto summary =
      json::parse(read_text(dir / "one-dim" / runs[0]["directory"].get<std::string>() / "summary.json"));
  CHECK(summary["config"]["epsilon"].get<double>() == 5e-4);
  CHECK(summary["segments"][0]["epsilon"].get<double>() == 5e-4);
  CHECK(summary["config"]["grid"]["resolution"].get<int>() == 128);
}

TEST_CASE("two-dimensional experiments") {
  const auto dir = scratch("two_dim");
  REQUIRE(run({"experiment", "two-dim-grid", "--output", dir.string(), "--resolution", "48", "--samples", "2"}).code ==
          kExitOk);
  REQUIRE(run({"experiment", "two-dim-subsample", "--output", dir.string(), "--resolution", "48", "--subsample",
               "100", "--samples", "2"}).code == kExitOk);
  const auto grid_mu = read_measure_csv(dir / "two-dim-grid" / "measures" / "mu_0.csv");
  const auto sub_mu = read_measure_csv(dir / "two-dim-subsample" / "measures" / "mu_0.csv");
  CHECK(sub_mu.size() == 100);
  CHECK(grid_mu.size() > 100);
  CHECK(total_mass(sub_mu) == doctest::Approx(total_mass(grid_mu)).epsilon(1e-12));
  CHECK(run({"experiment", "three-dim", "--output", dir.string()}).code == kExitInput);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto dir = scratch("determinism");
  const std::vector<std::string> args = {"experiment", "two-dim-subsample", "--output", dir.string(),
                                         "--resolution", "48", "--subsample", "80", "--seed", "7", "--samples", "3"};
  REQUIRE(run(args).code == kExitOk);
  const auto first = snapshot(dir);
  fs::remove_all(dir);
  REQUIRE(run(args).code == kExitOk);
  CHECK(first == snapshot(dir));

  auto reseeded = args;
  reseeded[9] = "8";
  fs::remove_all(dir);
  REQUIRE(run(reseeded).code == kExitOk);
  CHECK(first != snapshot(dir));
}

TEST_CASE("verify command") {
  const auto filtered = run({"verify", "--filter", "e-equals-p"});
  CHECK(filtered.code == kExitOk);
  const auto report = json::parse(filtered.out);
  REQUIRE(!report.empty());
  for (const auto& c : report) {
    CHECK(c["check"].get<std::string>().find("e-equals-p") != std::string::npos);
    CHECK(c["status"] == "PASS");
  }
  CHECK(run({"verify", "--filter", "pointwise", "--tolerance", "1e-15"}).code == kExitVerification);
  CHECK(run({"verify", "--filter", "no-such-check"}).code == kExitInput);
}
