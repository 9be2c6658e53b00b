#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relqi/cli.hpp"
#include "relqi/state_io.hpp"

using namespace relqi;
using namespace relqi::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json json_of(const Run& r) { return nlohmann::json::parse(r.out); }

// Data rows of a CSV report (comments and header removed).
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("multiplicity table") {
  const Run r = run_cli({"multiplicity", "--n-max", "4", "--deterministic"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("\n4,0,2,ok\n") != std::string::npos);
  CHECK(r.out.find("timestamp") == std::string::npos);
  for (const auto& row : csv_rows(r.out)) CHECK(row.back() == "ok");
}

TEST_CASE("wigner rotation for perpendicular boost and momentum") {
  const Run r = run_cli({"wigner", "--boost", "0.5,0,0", "--momentum", "0,0,1", "--deterministic"});
  REQUIRE(r.code == kExitOk);
  const auto j = json_of(r);
  const double g1 = std::sqrt(2.0), g2 = 1.0 / std::sqrt(0.75);
  const double expected = std::acos((g1 + g2) / (1.0 + g1 * g2));
  const double angle = j["angle"].get<double>();
  const double ay = j["axis"][1].get<double>();
  CHECK(std::abs(std::abs(ay) - 1.0) < 1e-12);
  const double signed_angle = ay > 0 ? angle : 2.0 * M_PI - angle;
  CHECK(std::min(signed_angle, 2.0 * M_PI - signed_angle) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(j["meta"]["command"] == "wigner");
}

TEST_CASE("selftest passes") {
  const Run r = run_cli({"selftest"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"--bogus"}).code == kExitUsage);
  CHECK(run_cli({"channel", "boost-approx", "--v", "abc"}).code == kExitUsage);
  CHECK(run_cli({"overlap", "--delta", "0.01", "--a-range", "0:1:0"}).code == kExitUsage);
  CHECK(run_cli({"overlap", "--delta", "0.01", "--a-range", "0:1:20000"}).code == kExitDomain);
  const Run fast = run_cli({"channel", "boost-approx", "--v", "1.5", "--delta", "0.01"});
  CHECK(fast.code == kExitDomain);
  CHECK_FALSE(fast.err.empty());
  CHECK(run_cli({"twirl", "--n", "9", "--method", "exact"}).code == kExitDomain);
  CHECK(run_cli({"--help"}).code == kExitOk);
  CHECK(run_cli({"--version"}).code == kExitOk);
  CHECK(exit_code_for(ErrorCode::kAccuracy) == kExitAccuracy);
  CHECK(exit_code_for(ErrorCode::kFormat) == kExitDomain);
}

TEST_CASE("boost-v sweep fidelity decreases with speed") {
  const Run r = run_cli({"sweep", "--kind", "boost-v", "--v-range", "0.1:0.9:9", "--delta", "0.05", "--deterministic"});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][3]) < std::stod(rows[i - 1][3]));
}

TEST_CASE("boost-delta sweep shows fourth-order convergence") {
  const Run r = run_cli({"sweep", "--kind", "boost-delta", "--v", "0.5", "--delta", "0.04", "--halvings", "2",
                         "--deterministic"});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) >= 8.0);
}

TEST_CASE("deterministic runs are byte-identical") {
  const std::vector<std::string> sweep = {"sweep", "--kind", "twirl-mc", "--n", "2", "--samples", "500,2000",
                                          "--deterministic"};
  CHECK(run_cli(sweep).out == run_cli(sweep).out);
  const std::vector<std::string> tw = {"twirl", "--n", "3", "--method", "mc", "--samples", "1000", "--preset",
                                       "random", "--deterministic"};
  const Run a = run_cli(tw), b = run_cli(tw);
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  std::vector<std::string> other = tw;
  other.insert(other.begin(), {"--seed", "5"});
  CHECK(run_cli(other).out != a.out);
}

TEST_CASE("seed from the environment") {
  ::setenv("RELQI_SEED", "77", 1);
  const Run r = run_cli({"multiplicity", "--n-max", "2", "--deterministic"});
  ::unsetenv("RELQI_SEED");
  CHECK(r.out.find("# seed: 77") != std::string::npos);
  const Run d = run_cli({"multiplicity", "--n-max", "2", "--deterministic"});
  CHECK(d.out.find("# seed: 20040101") != std::string::npos);
}

TEST_CASE("config file supplies defaults and explicit flags win") {
  const auto cfg = temp_file("relqi_test.cfg");
  {
    std::ofstream f(cfg);
    f << "# defaults\nseed=11\ndeterministic=true\n";
  }
  const Run from_cfg = run_cli({"--config", cfg.string(), "multiplicity", "--n-max", "2"});
  CHECK(from_cfg.out.find("# seed: 11") != std::string::npos);
  CHECK(from_cfg.out.find("timestamp") == std::string::npos);
  const Run flag = run_cli({"--config", cfg.string(), "--seed", "12", "multiplicity", "--n-max", "2"});
  CHECK(flag.out.find("# seed: 12") != std::string::npos);
  std::filesystem::remove(cfg);
}

TEST_CASE("output flag writes the report to a file") {
  const auto path = temp_file("relqi_test_out.json");
  const Run r = run_cli({"--output", path.string(), "--deterministic", "channel", "boost-approx", "--v", "0.5",
                         "--delta", "0.05"});
  CHECK(r.code == kExitOk);
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  CHECK(j["channel"] == "boost-approx");
  std::filesystem::remove(path);
}

TEST_CASE("channel reports carry Choi diagnostics") {
  for (const std::string kind : {"boost-approx", "boost-exact"}) {
    const Run r = run_cli({"channel", kind, "--v", "0.5", "--delta", "0.05", "--preset", "plus", "--deterministic"});
    REQUIRE(r.code == kExitOk);
    const auto j = json_of(r);
    CHECK(j["choi_defects"]["accepted"] == true);
    CHECK(j["fidelity_to_input"].get<double>() < 1.0);
    CHECK(j["fidelity_to_input"].get<double>() > 0.99);
  }
  const Run mix = run_cli({"channel", "mixture", "--speeds", "0.2,0.6", "--weights", "1,3", "--delta", "0.05",
                           "--deterministic"});
  CHECK(mix.code == kExitOk);
}

TEST_CASE("state files are read and validated") {
  const auto path = temp_file("relqi_test_input.json");
  CVector v(2);
  v << 1.0, 1.0;
  write_json_file(path, state_to_json(PureState::from_amplitudes(v, false)));
  const std::vector<std::string> base = {"channel", "boost-approx", "--v", "0.5", "--delta", "0.05", "--state",
                                         path.string(), "--deterministic"};
  CHECK(run_cli(base).code == kExitDomain);
  std::vector<std::string> loose = base;
  loose.insert(loose.begin(), "--no-validate");
  const Run r = run_cli(loose);
  CHECK(r.code == kExitOk);
  CHECK(json_of(r)["meta"]["input_validated"] == false);

  write_json_file(path, state_to_json(PureState::basis(2, 1)));
  CHECK(run_cli(base).code == kExitOk);
  std::filesystem::remove(path);
}

TEST_CASE("photon report keeps the logical state") {
  const Run r = run_cli({"photon", "--boost", "0.3,0.4,0", "--rotation", "1,0,0,0.7", "--momentum", "0,1,1",
                         "--logical", "0.6,0,0,0.8", "--deterministic"});
  REQUIRE(r.code == kExitOk);
  const auto j = json_of(r);
  CHECK(j["state"]["logical_fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j["omega"].is_number());
  CHECK(j["beta"].size() == 2);
}

TEST_CASE("codec info lists sectors") {
  const Run r = run_cli({"codec", "info", "--n", "4", "--deterministic"});
  REQUIRE(r.code == kExitOk);
  CHECK(json_of(r)["logical_qubit_count"] == 1);
}

TEST_CASE("doubles print with round-trip precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}
