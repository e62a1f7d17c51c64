#include "doctest.h"

#include "hhrp/cli.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace hhrp;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hhrp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(json::parse(line));
  }
  return lines;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "hhrp_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("build reports dimensions and Hermiticity") {
  const auto r = run_cli({"build", "--nmax", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["total_dim"] == 144);
  CHECK(j["fermion_dim"] == 16);
  CHECK(j["boson_dim"] == 9);
  CHECK(j["hermiticity_H"].get<double>() < 1e-12);
  CHECK(j["hermiticity_H1"].get<double>() < 1e-12);
  CHECK(j["hermiticity_H2"].get<double>() < 1e-12);
  CHECK(j["spectral_min"].get<double>() <= j["spectral_max"].get<double>());
}

TEST_CASE("build rejects even L and oversized spaces") {
  const auto even = run_cli({"build", "--set", "L=2"});
  CHECK(even.code == 2);
  CHECK(even.err.find("odd") != std::string::npos);
  const auto capped = run_cli({"build", "--nmax", "2", "--cap", "100"});
  CHECK(capped.code == 2);
  CHECK_FALSE(capped.err.empty());
}

TEST_CASE("build matrix dump layout") {
  const auto path = temp_dir() / "h.bin";
  const auto r = run_cli({"build", "--nmax", "1", "--dump", path.string()});
  REQUIRE(r.code == 0);
  const std::string bytes = slurp(path);
  const std::size_t n = 64;
  REQUIRE(bytes.size() == 16 + n * n * 16);
  std::uint64_t rows = 0, cols = 0;
  std::memcpy(&rows, bytes.data(), 8);
  std::memcpy(&cols, bytes.data() + 8, 8);
  CHECK(rows == n);
  CHECK(cols == n);
  // Hermitian: entry (i, j) equals conj of (j, i).
  const auto entry = [&](std::size_t i, std::size_t j, int part) {
    double v;
    std::memcpy(&v, bytes.data() + 16 + (i * n + j) * 16 + part * 8, 8);
    return v;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(entry(i, j, 0) - entry(j, i, 0)));
      worst = std::max(worst, std::abs(entry(i, j, 1) + entry(j, i, 1)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("verify requires a seed and validates the suite") {
  CHECK(run_cli({"verify", "--suite", "dls"}).code == 2);
  CHECK(run_cli({"verify", "--suite", "nonsense", "--seed", "1"}).code == 2);
}

TEST_CASE("verify halffill passes for random parameters") {
  const auto r = run_cli({"verify", "--suite", "halffill", "--seed", "5", "--nmax", "3"});
  CHECK(r.code == 0);
  const auto lines = json_lines(r.out);
  CHECK(lines.size() >= 20);
  for (const auto& j : lines) {
    CHECK(j["pass"] == true);
    CHECK(j.contains("paper_ref"));
    CHECK(j.contains("slack"));
  }
}

TEST_CASE("verify dls with a fixed seed passes every instance") {
  const auto r = run_cli({"verify", "--suite", "dls", "--seed", "17"});
  CHECK(r.code == 0);
  const auto lines = json_lines(r.out);
  std::size_t fuzz = 0;
  for (const auto& j : lines) {
    CHECK(j["pass"] == true);
    if (j["name"].get<std::string>().rfind("dls[", 0) == 0) ++fuzz;
  }
  CHECK(fuzz == 1000);
}

TEST_CASE("verify gauss at tolerance zero exposes roundoff slacks") {
  const std::vector<std::string> base{"verify", "--suite", "gauss", "--seed", "3", "--nmax", "1", "--count", "20"};
  const auto strict_args = [&] {
    auto a = base;
    a.insert(a.end(), {"--tol", "0"});
    return a;
  }();
  const auto strict = run_cli(strict_args);
  const auto normal = run_cli(base);
  CHECK(normal.code == 0);
  double worst = 0.0;
  for (const auto& j : json_lines(strict.out)) {
    if (!j["pass"].get<bool>()) worst = std::min(worst, j["slack"].get<double>());
  }
  CHECK(worst > -1e-12);
}

TEST_CASE("verify flags failing records and exits 1") {
  // On nu = 2 the displayed constant b0 is violated.
  const auto r = run_cli({"verify", "--suite", "infrared", "--seed", "2", "--set", "nu=2", "--nmax", "0", "--count", "5",
                          "--set", "t=0.8", "--set", "U=1.3", "--set", "V=0.6", "--set", "g=0.5", "--set", "omega=1.4",
                          "--set", "beta=0.9"});
  CHECK(r.code == 1);
  bool flagged = false;
  for (const auto& j : json_lines(r.out)) flagged = flagged || !j["pass"].get<bool>();
  CHECK(flagged);
  CHECK(r.err.find("FAIL") != std::string::npos);
}

TEST_CASE("correlate at the origin is in [0, 1]") {
  const auto r = run_cli({"correlate", "--nmax", "2"});
  REQUIRE(r.code == 0);
  const double v = json::parse(r.out)["value"].get<double>();
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
  const auto other = run_cli({"correlate", "--nmax", "2", "--x=-1", "--frame", "H2"});
  REQUIRE(other.code == 0);
  const auto j = json::parse(other.out);
  CHECK(j["x"][0] == -1);
  CHECK(run_cli({"correlate", "--x", "0,0"}).code == 2);
}

TEST_CASE("bound reports an uncertified row when the gap closes") {
  const auto r = run_cli({"bound", "--nu", "3", "--set", "U=100", "--set", "g=0.1", "--set", "V=1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["certified"] == false);
  CHECK(j["gap"].get<double>() <= 0.0);
  const auto fixture = run_cli({"bound", "--nu", "3", "--set", "t=1", "--set", "V=10", "--set", "U=1", "--set", "g=3",
                                "--set", "omega=1", "--set", "beta=10"});
  const auto f = json::parse(fixture.out);
  CHECK(f["certified"] == true);
  CHECK(f["rhs"].get<double>() == doctest::Approx(0.324907228803).epsilon(1e-10));
}

TEST_CASE("sweep over a 5 x 5 grid") {
  const std::vector<std::string> args{"sweep", "--nu", "3", "--set", "sweep.g=0:4:5", "--set", "sweep.beta=1,2,5,10,20",
                                      "--set", "V=10"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,U,V,g,omega,beta,u_eff,gap,entropy_term,hopping_term,ir_term,gamma2_term,rhs,certified");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 25);
}

TEST_CASE("integral subcommand") {
  const auto bad = run_cli({"integral", "--nu", "2"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("integral diverges for ν ≤ 2") != std::string::npos);
  const auto r = run_cli({"integral", "--nu", "3", "--tol", "1e-6"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["converged"] == true);
  CHECK(std::abs(j["relative_difference"].get<double>()) < 1e-6);
}

TEST_CASE("config file with flag overrides") {
  const auto path = temp_dir() / "run.cfg";
  {
    std::ofstream f(path);
    f << "# model\nnu = 1\nL = 1\nn_max = 1\nt = 0.5\nseed = 9  # trailing comment\n\nU = 2\n";
  }
  const auto r = run_cli({"--config", path.string(), "build", "--nmax", "2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["total_dim"] == 144);
  const auto cfg = cli::load_config(path.string());
  CHECK(cfg.model.t == 0.5);
  CHECK(cfg.model.U == 2.0);
  CHECK(cfg.seed == 9u);
  {
    std::ofstream f(path);
    f << "bogus = 1\n";
  }
  CHECK(run_cli({"--config", path.string(), "build"}).code == 2);
  {
    std::ofstream f(path);
    f << "t 1\n";
  }
  CHECK(run_cli({"--config", path.string(), "build"}).code == 2);
  CHECK(run_cli({"--config", (temp_dir() / "missing.cfg").string(), "build"}).code == 2);
  CHECK(run_cli({"build", "--set", "t=abc"}).code == 2);
}

TEST_CASE("range syntax") {
  CHECK(cli::parse_range("2.5") == std::vector<double>{2.5});
  CHECK(cli::parse_range("1, 2,3") == std::vector<double>{1, 2, 3});
  CHECK(cli::parse_range("0:1:5") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK_THROWS_AS(cli::parse_range("0:1"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_range("0:1:0"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_range(""), cli::ConfigError);
}

TEST_CASE("identical seeds give byte-identical report files") {
  const auto a = temp_dir() / "a.jsonl";
  const auto b = temp_dir() / "b.jsonl";
  const std::vector<std::string> common{"verify", "--suite", "theta", "--seed", "21", "--nmax", "1"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", a.string()});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", b.string(), "--workers", "2"});
  REQUIRE(run_cli(args_a).code == 0);
  REQUIRE(run_cli(args_b).code == 0);
  const std::string sa = slurp(a);
  CHECK_FALSE(sa.empty());
  CHECK(sa == slurp(b));
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = HHRP_CLI_PATH;
  const auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("build") == 0);
  CHECK(status("build --set L=2") == 2);
  CHECK(status("integral --nu 1") == 2);
  CHECK(status("--help") == 0);
  CHECK(status("frobnicate") == 2);
}
