#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SEMINMF_CLI;
const std::string kIono = std::string(SEMINMF_DATA_DIR) + "/ionosphere.csv";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seminmf_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

// Drops the named columns so timing does not enter comparisons.
std::vector<std::vector<std::string>> without(std::vector<std::vector<std::string>> rows,
                                              const std::vector<std::string>& names) {
  if (rows.empty()) return rows;
  std::vector<std::size_t> drop;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    for (const auto& n : names) {
      if (rows[0][c] == n) drop.push_back(c);
    }
  }
  for (auto& r : rows) {
    for (auto it = drop.rbegin(); it != drop.rend(); ++it) {
      if (*it < r.size()) r.erase(r.begin() + static_cast<std::ptrdiff_t>(*it));
    }
  }
  return rows;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    j.erase("ms_per_iteration");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

const std::string kSmall = "--data " + kIono + " --k 3 --alpha 0.1 --beta 1 --runs 3 --iters 20";

}  // namespace

TEST_CASE("exit codes") {
  const fs::path out = scratch("codes");
  CHECK(run_cli("factorize --data /nonexistent.csv --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_cli("factorize --bogus --out " + out.string()) == 1);
  CHECK(run_cli("factorize --synthetic 20,10,3 --algo magic --out " + out.string()) == 1);
  CHECK(run_cli("evaluate --synthetic 20,10,3 --out " + out.string()) == 1);
  CHECK(run_cli("factorize --synthetic 20,10,3 --k 50 --out " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_cli("factorize --synthetic 20,10,3 --iters 5 --out " + out.string()) == 0);
  fs::remove_all(out);
}

TEST_CASE("factorize with zero iterations writes a single history row") {
  const fs::path out = scratch("zero");
  REQUIRE(run_cli("factorize --synthetic 30,20,3 --iters 0 --out " + out.string()) == 0);
  const auto rows = read_csv(out / "history.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"t", "objective", "proxy", "kkt", "rel_error", "elapsed_ms"});
  CHECK(fs::exists(out / "U.csv"));
  CHECK(fs::exists(out / "V.csv"));
  fs::remove_all(out);
}

TEST_CASE("factorize objective column is nonincreasing") {
  const fs::path out = scratch("mono");
  REQUIRE(run_cli("factorize --synthetic 60,30,4 --iters 50 --out " + out.string()) == 0);
  const auto rows = read_csv(out / "history.csv");
  REQUIRE(rows.size() == 52);
  for (std::size_t t = 2; t < rows.size(); ++t) {
    const double prev = std::stod(rows[t - 1][1]);
    CHECK(std::stod(rows[t][1]) <= prev * (1 + 1e-12) + 1e-9);
  }
  CHECK(read_json(out / "summary.json")["monotone"] == true);
  fs::remove_all(out);
}

TEST_CASE("identical specs give identical outputs apart from timing") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  REQUIRE(run_cli("evaluate " + kSmall + " --sigma 0.1 --out " + a.string()) == 0);
  REQUIRE(run_cli("evaluate " + kSmall + " --sigma 0.1 --out " + b.string()) == 0);
  json ja = read_json(a / "summary.json");
  json jb = read_json(b / "summary.json");
  strip_timing(ja);
  strip_timing(jb);
  CHECK(ja == jb);
  const fs::path cell = fs::path("cells") / "3_0.1_1_0.1";
  for (int r = 0; r < 3; ++r) {
    const std::string name = "run" + std::to_string(r) + ".csv";
    CHECK(without(read_csv(a / cell / name), {"elapsed_ms"}) == without(read_csv(b / cell / name), {"elapsed_ms"}));
  }
  CHECK(without(read_csv(a / cell / "runs.csv"), {"wall_time_s"}) ==
        without(read_csv(b / cell / "runs.csv"), {"wall_time_s"}));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("summary statistics are recomputable from runs.csv") {
  const fs::path out = scratch("stats");
  REQUIRE(run_cli("evaluate " + kSmall + " --out " + out.string()) == 0);
  const json cell = read_json(out / "summary.json")["cells"][0];
  const auto rows = read_csv(out / "cells" / "3_0.1_1_0" / "runs.csv");
  REQUIRE(rows.size() == 4);
  std::vector<double> accs;
  for (std::size_t i = 1; i < rows.size(); ++i) accs.push_back(std::stod(rows[i][2]));
  double mean = 0.0;
  for (double v : accs) mean += v;
  mean /= 3.0;
  double q = 0.0;
  for (double v : accs) q += (v - mean) * (v - mean);
  CHECK(cell["acc"]["mean"].get<double>() == doctest::Approx(mean).epsilon(1e-15));
  CHECK(cell["acc"]["sd"].get<double>() == doctest::Approx(std::sqrt(q / 2.0)).epsilon(1e-14));
  CHECK(cell["runs"] == 3);
  fs::remove_all(out);
}

TEST_CASE("a 1x1 grid reduces to evaluate and sigma = 0 reproduces it") {
  const fs::path e = scratch("eval");
  const fs::path g = scratch("grid");
  const fs::path n = scratch("noise");
  REQUIRE(run_cli("evaluate " + kSmall + " --out " + e.string()) == 0);
  REQUIRE(run_cli("grid-search " + kSmall + " --out " + g.string()) == 0);
  REQUIRE(run_cli("noise-sweep " + kSmall + " --sigma 0 --out " + n.string()) == 0);
  const json je = read_json(e / "summary.json")["cells"][0];
  const json jg = read_json(g / "summary.json")["cells"][0];
  const json jn = read_json(n / "summary.json")["cells"][0];
  CHECK(jg["best"] == true);
  CHECK(je["acc"] == jg["acc"]);
  CHECK(je["nmi"] == jg["nmi"]);
  CHECK(je["acc"] == jn["acc"]);
  CHECK(je["nmi"] == jn["nmi"]);
  fs::remove_all(e);
  fs::remove_all(g);
  fs::remove_all(n);
}

TEST_CASE("grid flags one best cell") {
  const fs::path out = scratch("grid2");
  REQUIRE(run_cli("grid-search --data " + kIono + " --k 3 --alpha 0.1,1 --beta 1,10 --runs 2 --iters 10 --out " +
                  out.string()) == 0);
  const json s = read_json(out / "summary.json");
  int best = 0;
  double best_acc = -1.0;
  double top = -1.0;
  for (const auto& c : s["cells"]) {
    top = std::max(top, c["acc"]["mean"].get<double>());
    if (c["best"] == true) {
      ++best;
      best_acc = c["acc"]["mean"].get<double>();
    }
  }
  CHECK(s["cells"].size() == 4);
  CHECK(best == 1);
  CHECK(best_acc == top);
  fs::remove_all(out);
}

TEST_CASE("converge reports the one-percent iteration") {
  const fs::path out = scratch("conv");
  REQUIRE(run_cli("converge --synthetic 60,30,4 --iters 60 --out " + out.string()) == 0);
  const json s = read_json(out / "summary.json");
  const int t = s["first_within_1pct"].get<int>();
  const auto rows = read_csv(out / "history.csv");
  const double final_j = std::stod(rows.back()[1]);
  CHECK(std::stod(rows[static_cast<std::size_t>(t) + 1][1]) <= final_j + 0.01 * std::abs(final_j));
  if (t > 0) CHECK(std::stod(rows[static_cast<std::size_t>(t)][1]) > final_j + 0.01 * std::abs(final_j));
  fs::remove_all(out);
}

TEST_CASE("synthetic writes one cell per algorithm and sigma") {
  const fs::path out = scratch("syn");
  REQUIRE(run_cli("synthetic --synthetic 40,20,3 --runs 2 --iters 30 --out " + out.string()) == 0);
  const json s = read_json(out / "summary.json");
  CHECK(s["cells"].size() == 6);
  CHECK(s["comparisons"].size() == 3);
  CHECK(fs::exists(out / "cells" / "3_0_0_0.02" / "snf" / "run1.csv"));
  fs::remove_all(out);
}
