// End-to-end checks of the CLI binary: exit codes, determinism, and the
// wire formats round-tripping through actual files.

#include "projgeom/json_io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace projgeom;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "projgeom_cli_out.txt";
  const std::string cmd = std::string(PROJGEOM_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path fixture_dir() {
  static fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "projgeom_cli_fixtures";
    const RunResult r = run_cli("fixtures --out-dir " + d.string());
    REQUIRE(r.exit_code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("fixtures subcommand writes loadable canonical inputs") {
  const fs::path dir = fixture_dir();
  CHECK(fs::exists(dir / "planar_pi3_p.json"));
  CHECK(fs::exists(dir / "truncated_n5_p.json"));
  CHECK(fs::exists(dir / "extension_system.json"));
  const Matrix p = matrix_from_file((dir / "planar_pi3_p.json").string());
  CHECK(p.rows() == 2);
}

TEST_CASE("analyze-pair reports the planar closed form") {
  const fs::path dir = fixture_dir();
  const RunResult r = run_cli("analyze-pair " + (dir / "planar_pi3_p.json").string() +
                              " " + (dir / "planar_pi3_q.json").string());
  REQUIRE(r.exit_code == 0);
  const Json out = Json::parse(r.output);
  CHECK(out.at("c").get<double>() == Catch::Approx(0.5).margin(1e-10));
  CHECK(out.at("meet_rank").get<int>() == 0);
  CHECK(out.at("join_rank").get<int>() == 2);
  CHECK_FALSE(out.at("degenerate_angle").get<bool>());
  CHECK(out.at("battery").at("contract_ok").get<bool>());
}

TEST_CASE("analyze-pair on identical inputs has empty generic part") {
  const fs::path dir = fixture_dir();
  const std::string pf = (dir / "planar_pi4_p.json").string();
  const RunResult r = run_cli("analyze-pair " + pf + " " + pf);
  REQUIRE(r.exit_code == 0);
  const Json out = Json::parse(r.output);
  CHECK(out.at("c").get<double>() < 1e-10);
  CHECK(out.at("form").at("generic").empty());
}

TEST_CASE("CLI output is deterministic for identical inputs and seed") {
  const fs::path dir = fixture_dir();
  const std::string args = "--seed 7 closure " +
                           (dir / "planar_pi6_p.json").string() + " " +
                           (dir / "planar_pi6_q.json").string();
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
  const Json out = Json::parse(a.output);
  CHECK(out.at("algebra").at("dim").get<int>() == 4);
  CHECK(out.at("center").at("block_dims").get<std::vector<int>>() ==
        std::vector<int>{2});
}

TEST_CASE("malformed and invalid inputs exit with code 2") {
  const fs::path bad = fs::temp_directory_path() / "projgeom_bad.json";
  {
    std::ofstream out(bad);
    out << "{ this is not json";
  }
  CHECK(run_cli("analyze-pair " + bad.string() + " " + bad.string()).exit_code == 2);

  const fs::path notproj = fs::temp_directory_path() / "projgeom_notproj.json";
  {
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    matrix_to_file(m, notproj.string());
  }
  CHECK(run_cli("analyze-pair " + notproj.string() + " " + notproj.string())
            .exit_code == 2);

  CHECK(run_cli("family-scan --n-max 1").exit_code == 2);
  CHECK(run_cli("family-scan --kind weird --n-max 3").exit_code == 2);
}

TEST_CASE("family-scan emits the cos(1/N) columns, monotone increasing") {
  for (const std::string kind : {"counterexample", "forbidden"}) {
    const RunResult r = run_cli("family-scan --kind " + kind + " --n-max 5");
    REQUIRE(r.exit_code == 0);
    const Json out = Json::parse(r.output);
    REQUIRE(out.at("rows").size() == 4);
    double prev = 0.0;
    for (const auto& row : out.at("rows")) {
      const double c = row.at("c").get<double>();
      const int n = row.at("N").get<int>();
      CHECK(c == Catch::Approx(std::cos(1.0 / n)).margin(1e-10));
      CHECK(c > prev);
      prev = c;
    }
  }
}

TEST_CASE("extension lift with zero noise is the exact scalar projection") {
  const fs::path dir = fixture_dir();
  const std::string sys_file = (dir / "extension_system.json").string();
  const RunResult r =
      run_cli("extension " + sys_file + " lift --bit x=1 --bit y=0");
  REQUIRE(r.exit_code == 0);
  const Json out = Json::parse(r.output);
  const SystemDescription desc = system_from_file(sys_file);
  const ExtensionElement p =
      element_from_json(desc.system, out.at("projection"));
  for (const auto& blk : p.blocks) CHECK(op_norm(blk.finite) < 1e-14);
  CHECK(p.blocks[0].scalar == Complex(1.0, 0.0));
}

TEST_CASE("extension lift with borderline noise exits with code 3") {
  const fs::path dir = fixture_dir();
  const fs::path noise = fs::temp_directory_path() / "projgeom_noise.json";
  Matrix nz = Matrix::Zero(6, 6);
  nz(0, 0) = 0.5 - 1e-8;
  matrix_to_file(nz, noise.string());
  const RunResult r = run_cli("extension " + (dir / "extension_system.json").string() +
                              " lift --bit x=0 --bit y=0 --noise b1=" +
                              noise.string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("extension decompose of a scalar projection has zero compact part") {
  const fs::path dir = fixture_dir();
  const RunResult r =
      run_cli("extension " + (dir / "extension_system.json").string() +
              " decompose --p-file " + (dir / "extension_p.json").string());
  REQUIRE(r.exit_code == 0);
  const Json out = Json::parse(r.output);
  const SystemDescription desc =
      system_from_file((dir / "extension_system.json").string());
  const ExtensionElement compact =
      element_from_json(desc.system, out.at("compact"));
  CHECK(ext_norm(desc.system, compact) < 1e-14);
}

TEST_CASE("extension scan and angle agree on the max formula") {
  const fs::path dir = fixture_dir();
  const std::string sys_file = (dir / "extension_system.json").string();
  const RunResult r = run_cli("extension " + sys_file +
                              " scan --block b1 --p-rank 3 --family 2");
  REQUIRE(r.exit_code == 0);
  const Json out = Json::parse(r.output);
  CHECK(out.at("c").get<double>() ==
        Catch::Approx(std::cos(0.5)).margin(1e-10));
  CHECK(out.at("meet_rank").get<int>() == out.at("p1_rank").get<int>());
}

TEST_CASE("text format renders 12 significant digits") {
  const fs::path dir = fixture_dir();
  const RunResult r = run_cli("--format text analyze-pair " +
                              (dir / "planar_t01_p.json").string() + " " +
                              (dir / "planar_t01_q.json").string());
  REQUIRE(r.exit_code == 0);
  // cos(0.1) = 0.995004165278...
  CHECK(r.output.find("0.995004165278") != std::string::npos);
}
