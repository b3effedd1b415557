#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "degen/cli.hpp"
#include "degen/grid.hpp"

using degen::run_cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Unique scratch directory per use, removed when the test ends.
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("degen_cli_test_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const std::string& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv_rows(const std::string& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        row.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    row.push_back(cur);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("configuration problems exit with code 1") {
  TempDir d;
  CHECK(run_cli({"solve", "--dim", "2", "--gamma", "-1", "--bc",
                 "affine:0,1,1", "--out-dir", d.str()}) == 1);
  CHECK(run_cli({"solve", "--dim", "2"}) == 1);  // --bc is required
  CHECK(run_cli({"solve", "--dim", "3", "--bc", "affine:0,1,1"}) == 1);
  CHECK(run_cli({"estimate", "--in", d.file("nosuch.csv")}) == 1);
  CHECK(run_cli({"estimate", "--in", d.file("nosuch.csv"), "--rho0",
                 "0.9"}) == 1);
  CHECK(run_cli({"table", "--gammas", "", "--out-dir", d.str()}) == 1);
  CHECK(run_cli({"oracle", "--name", "nope", "--out-dir", d.str()}) == 1);
  CHECK(run_cli({"sclimit", "--deltas", "0.1,0.2", "--out-dir", d.str()}) ==
        1);
  CHECK(run_cli({"sclimit", "--deltas", "0.2,-0.1", "--out-dir", d.str()}) ==
        1);
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({"--version"}) == 0);
}

TEST_CASE("an exhausted iteration budget exits with code 2") {
  TempDir d;
  CHECK(run_cli({"solve", "--dim", "1", "--n", "9", "--max-iters", "1",
                 "--gamma", "0", "--bc", "affine:0,1", "--out-dir",
                 d.str()}) == 2);
}

TEST_CASE("identical flags produce byte-identical artifacts") {
  TempDir a, b;
  std::vector<std::string> common = {"solve",  "--dim", "2",
                                     "--n",    "33",    "--gamma",
                                     "1",      "--bc",  "oracle:radial",
                                     "--f",    "const:1"};
  auto run_in = [&](const TempDir& dir) {
    std::vector<std::string> args = common;
    args.push_back("--out-dir");
    args.push_back(dir.str());
    return run_cli(args);
  };
  REQUIRE(run_in(a) == 0);
  REQUIRE(run_in(b) == 0);
  CHECK(slurp(a.file("solution.csv")) == slurp(b.file("solution.csv")));
  json ma = slurp_json(a.file("manifest.json"));
  json mb = slurp_json(b.file("manifest.json"));
  CHECK(ma["outputs"] == mb["outputs"]);
  CHECK(ma["command"] == "solve");
  CHECK(ma["outputs"][0]["file"] == "solution.csv");
  CHECK(ma["params"]["final_residual"].get<double>() <= 1e-5);
}

TEST_CASE("solve then estimate matches the table row") {
  TempDir a, b;
  REQUIRE(run_cli({"solve", "--dim", "1", "--n", "1025", "--gamma", "1",
                   "--solver", "bvp", "--bc", "oracle:ode", "--f", "const:1",
                   "--out-dir", a.str()}) == 0);
  REQUIRE(run_cli({"estimate", "--in", a.file("solution.csv"), "--center",
                   "0", "--rho0", "0.5", "--K", "7", "--out-dir",
                   a.str()}) == 0);
  json decay = slurp_json(a.file("decay.json"));
  double alpha_chain = decay["alpha_hat"].get<double>();

  REQUIRE(run_cli({"table", "--gammas", "1", "--dim", "1", "--n", "1025",
                   "--rho0", "0.5", "--K", "7", "--out-dir", b.str()}) == 0);
  auto rows = read_csv_rows(b.file("table.csv"));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0][0] == "gamma");
  REQUIRE(rows[1][5] == "ok");
  double alpha_table = std::stod(rows[1][1]);
  CHECK(std::fabs(alpha_chain - alpha_table) <= 1e-12);

  // Structure of the decay report.
  CHECK(decay["rho0"].get<double>() == 0.5);
  CHECK(decay["levels"].size() == 7);
  for (size_t k = 0; k < decay["levels"].size(); ++k)
    CHECK(decay["levels"][k]["k"].get<int>() == static_cast<int>(k));
  CHECK(!decay["saturated"].get<bool>());
  CHECK(!decay["truncated"].get<bool>());
  CHECK(std::fabs(alpha_chain - 0.5) <= 0.05);

  json man = slurp_json(a.file("manifest.json"));
  CHECK(man["command"] == "estimate");
  CHECK(man["outputs"][0]["file"] == "decay.json");
}

TEST_CASE("estimate flags affine input as saturated") {
  TempDir d;
  degen::Grid g = degen::make_grid(1, 257, -1.0, 1.0);
  degen::ScalarField u =
      degen::sample(g, [](const degen::Vec& X) { return 1.0 - 0.5 * X[0]; });
  degen::save_csv(u, d.file("affine.csv"));
  REQUIRE(run_cli({"estimate", "--in", d.file("affine.csv"), "--out-dir",
                   d.str()}) == 0);
  json decay = slurp_json(d.file("decay.json"));
  CHECK(decay["saturated"].get<bool>());
  CHECK(decay["alpha_hat"].is_null());
}

TEST_CASE("oracle dumps a field and can self-check") {
  TempDir d;
  REQUIRE(run_cli({"oracle", "--name", "radial", "--gamma", "1", "--d", "2",
                   "--check", "--n", "33", "--out-dir", d.str()}) == 0);
  degen::ScalarField f = degen::load_csv(d.file("field.csv"));
  CHECK(f.grid.dim == 2);
  CHECK(f.grid.n == 33);
  json man = slurp_json(d.file("manifest.json"));
  CHECK(man["params"]["residual_check"].get<double>() <= 1e-10);
  CHECK(man["params"]["alpha_expected"].get<double>() == 0.5);

  REQUIRE(run_cli({"oracle", "--name", "aronsson", "--n", "65", "--out-dir",
                   d.str()}) == 0);
  degen::ScalarField g2 = degen::load_csv(d.file("field.csv"));
  CHECK(g2.grid.n == 65);
}

TEST_CASE("sclimit emits one row per member with distances to the previous") {
  TempDir d;
  REQUIRE(run_cli({"sclimit", "--deltas", "0.4,0.2", "--n", "17", "--ball",
                   "0.6", "--out-dir", d.str()}) == 0);
  auto rows = read_csv_rows(d.file("sclimit.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"delta", "c1_prev", "residual",
                                            "status"});
  CHECK(rows[1][1].empty());  // first member has nothing to compare against
  CHECK(!rows[2][1].empty());
  CHECK(rows[1][3] == "ok");
  CHECK(rows[2][3] == "ok");
  CHECK(std::stod(rows[2][1]) > 0.0);

  TempDir s;
  REQUIRE(run_cli({"sclimit", "--deltas", "0.3", "--n", "17", "--out-dir",
                   s.str()}) == 0);
  auto single = read_csv_rows(s.file("sclimit.csv"));
  REQUIRE(single.size() == 2);
  CHECK(single[1][1].empty());
}
