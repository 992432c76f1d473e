#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "glab/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path p = [] {
    fs::path d = fs::temp_directory_path() / "glab_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

fs::path write_input(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "grunsky_lab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return glab::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

const std::string kSquare = R"({"vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]})";

}  // namespace

TEST_CASE("map: square and rectangle") {
  const auto in = write_input("square.json", kSquare);
  const auto out = scratch() / "map_square";
  REQUIRE(run({"map", "--input", in.string(), "--out", out.string(), "--N", "16"}) == 0);
  const json r = report(out);
  for (const auto& g : r["gaps"]) CHECK(std::abs(g.get<double>() - std::numbers::pi / 2) < 1e-12);
  CHECK(r["boundary_deviation"].get<double>() < 1e-9);
  CHECK(r.contains("config"));
  CHECK(r.contains("tolerances"));
  CHECK(r["version"] == GLAB_VERSION);
  CHECK(fs::exists(out / "laurent.csv"));

  const auto rect = write_input("rect.json", R"({"vertices": [[2, 1], [-2, 1], [-2, -1], [2, -1]]})");
  const auto out2 = scratch() / "map_rect";
  REQUIRE(run({"map", "--input", rect.string(), "--out", out2.string(), "--N", "8"}) == 0);
  CHECK(report(out2)["residual"].get<double>() < 1e-8);
}

TEST_CASE("exit codes") {
  const auto bad = write_input("collinear.json", R"({"vertices": [[0, 0], [1, 0], [2, 0], [1, 1]]})");
  CHECK(run({"map", "--input", bad.string(), "--out", (scratch() / "bad").string()}) == 2);
  CHECK(run({"map"}) == 1);
  CHECK(run({"frobnicate"}) == 1);
  const auto junk = write_input("junk.json", "{not json");
  CHECK(run({"map", "--input", junk.string(), "--out", (scratch() / "junk").string()}) == 1);
  const auto in = write_input("square2.json", kSquare);
  CHECK(run({"map", "--input", in.string(), "--out", (scratch() / "x").string(), "--tol", "-1"}) == 1);
  const auto nomu = write_input("nomu.json", R"({"type": "spiral"})");
  CHECK(run({"extremality", "--input", nomu.string(), "--out", (scratch() / "y").string()}) == 1);
}

TEST_CASE("grunsky: ellipse, identity and square") {
  const auto e = write_input("ellipse.json", R"({"oracle": "ellipse", "b": 0.3})");
  const auto oe = scratch() / "gr_ellipse";
  REQUIRE(run({"grunsky", "--input", e.string(), "--out", oe.string(), "--N", "4", "8", "16"}) == 0);
  for (const auto& row : report(oe)["rows"]) CHECK(std::abs(row["kappa"].get<double>() - 0.3) < 1e-14);

  const auto id = write_input("identity.json", R"({"oracle": "identity"})");
  const auto oi = scratch() / "gr_identity";
  REQUIRE(run({"grunsky", "--input", id.string(), "--out", oi.string(), "--N", "4", "8"}) == 0);
  for (const auto& row : report(oi)["rows"]) CHECK(row["kappa"].get<double>() == 0.0);

  const auto sq = write_input("square3.json", kSquare);
  const auto os = scratch() / "gr_square";
  REQUIRE(run({"grunsky", "--input", sq.string(), "--out", os.string(), "--N", "8", "16", "32"}) == 0);
  const json r = report(os);
  CHECK(r["monotone"] == true);
  CHECK(r["rows"].back()["kappa"].get<double>() < 1.0);
  // Only n = 3 (mod 4) survives for the square.
  const auto counts = r["sparsity"]["laurent_nonzero_by_residue_mod4"];
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 0);
  CHECK(counts[3].get<int>() > 0);
}

TEST_CASE("extremality reports") {
  const auto c = write_input("const.json", R"({"type": "constant", "t": 0.4})");
  const auto oc = scratch() / "ex_const";
  REQUIRE(run({"extremality", "--input", c.string(), "--out", oc.string(), "--N", "8", "--probe-points", "3"}) == 0);
  const json rc = report(oc);
  CHECK(rc["extremal_flag"] == true);
  CHECK(std::abs(rc["alpha_N"].get<double>() - 0.4) < 1e-10);
  for (const auto& p : rc["probes"]) CHECK(p["limit"].get<double>() < 0.02);

  const auto z = write_input("zero.json", R"({"type": "zero"})");
  const auto oz = scratch() / "ex_zero";
  REQUIRE(run({"extremality", "--input", z.string(), "--out", oz.string(), "--N", "4", "--probe-points", "2",
               "--p-max", "4"}) == 0);
  const json rz = report(oz);
  CHECK(rz["sup_norm"] == 0.0);
  CHECK(rz["bracket"]["lower"] == 0.0);

  const auto t = write_input("teich.json", R"({"type": "teichmuller", "x": [0, 1], "k": 0.5})");
  const auto ot = scratch() / "ex_teich";
  REQUIRE(run({"extremality", "--input", t.string(), "--out", ot.string(), "--N", "8", "--probe-points", "2"}) == 0);
  const json rt = report(ot);
  CHECK(rt["sup_norm"] == 0.5);
  CHECK(rt["teichmuller_flag"] == true);
  for (const auto& p : rt["probes"]) CHECK(p["limit"].get<double>() < 0.025);
}

TEST_CASE("deform reports") {
  const auto e = write_input("dir_ellipse.json", R"({"direction": "ellipse", "b": 0.5})");
  const auto oe = scratch() / "de_ellipse";
  REQUIRE(run({"deform", "--input", e.string(), "--out", oe.string(), "--grid", "32"}) == 0);
  const json re = report(oe);
  CHECK(re["at_origin"]["spread"].get<double>() < 1e-4);
  CHECK(re["chain"]["verdict"] == true);

  const auto z = write_input("dir_zero.json", R"({"direction": "zero"})");
  const auto oz = scratch() / "de_zero";
  REQUIRE(run({"deform", "--input", z.string(), "--out", oz.string(), "--grid", "32"}) == 0);
  const json rz = report(oz);
  CHECK(rz["at_origin"]["lambda_kappa"] == 0.0);
  CHECK(rz["envelope_certificate"]["status"] == "all nodes excluded");

  const auto h = write_input("dir_hyp.json", R"({"direction": "hyperbolic"})");
  const auto oh = scratch() / "de_hyp";
  REQUIRE(run({"deform", "--input", h.string(), "--out", oh.string()}) == 0);
  CHECK(report(oh)["envelope_certificate"]["min_margin"].get<double>() > -1e-2);
}

TEST_CASE("reruns are byte-identical, independent of the thread cap") {
  const auto in = write_input("det.json", R"({"type": "teichmuller", "x": [0.3, 0.9, 0.2], "k": 0.3})");
  const auto out = scratch() / "det";
  const std::vector<std::string> args{"extremality", "--input", in.string(), "--out", out.string(), "--N", "8",
                                      "--probe-points", "2", "--p-max", "6", "--seed", "7"};
  REQUIRE(run(args) == 0);
  const std::string r1 = slurp(out / "report.json"), c1 = slurp(out / "probes.csv");
  setenv("GRUNSKY_LAB_THREADS", "1", 1);
  REQUIRE(run(args) == 0);
  unsetenv("GRUNSKY_LAB_THREADS");
  CHECK(slurp(out / "report.json") == r1);
  CHECK(slurp(out / "probes.csv") == c1);
}
