#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kSmall = " --paths 600 --dt 0.015625 --ode-dt 0.0009765625";

int run(const std::string& args, const std::string& env = "", std::string* err = nullptr) {
  const std::string err_path = "test_cli_stderr.txt";
  const std::string cmd = env + " " + BLQ_CLI_PATH + " " + args + " > /dev/null 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  if (err) {
    std::ifstream in(err_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    *err = ss.str();
  }
  fs::remove(err_path);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kArtifacts[] = {"riccati.csv", "bsde.csv", "trajectory.csv", "control.csv", "cost.json",
                            "diagnostics.json"};

}  // namespace

TEST_CASE("a preset run writes every artifact") {
  const fs::path out = "cli_out_blqb";
  fs::remove_all(out);
  REQUIRE(run("--preset blqb --out " + out.string() + kSmall) == 0);
  for (const char* f : kArtifacts) CHECK(fs::exists(out / f));
  const json cost = json::parse(slurp(out / "cost.json"));
  CHECK(cost["j_mc"].get<double>() > 0.0);
  CHECK(cost.contains("terms"));
  const json diag = json::parse(slurp(out / "diagnostics.json"));
  CHECK(diag.contains("riccati"));
  std::ifstream ric(out / "riccati.csv");
  std::string header;
  std::getline(ric, header);
  CHECK(header.rfind("t,", 0) == 0);
  fs::remove_all(out);
}

TEST_CASE("the closed-form preset reports its reference cost") {
  const fs::path out = "cli_out_blqa";
  fs::remove_all(out);
  REQUIRE(run("--preset blqa --artifacts cost --out " + out.string() + kSmall) == 0);
  const json cost = json::parse(slurp(out / "cost.json"));
  CHECK(cost["reference_cost"].get<double>() == doctest::Approx(0.04386760523895318));
  CHECK(!fs::exists(out / "riccati.csv"));
  fs::remove_all(out);
}

TEST_CASE("invalid problems and arguments") {
  const fs::path cfg = "cli_bad_r.ini";
  std::ofstream(cfg) << "[problem]\nR = 0\nB = 1\nG = 1\n[grid]\nT = 1\n";
  std::string err;
  CHECK(run("--config " + cfg.string() + " --out cli_out_bad" + kSmall, "", &err) == 2);
  CHECK(err.find("REJECT_INDEFINITE") != std::string::npos);
  fs::remove(cfg);
  fs::remove_all("cli_out_bad");

  CHECK(run("--preset blqb --no-such-flag") == 2);
  CHECK(run("--preset blqb --config x.ini") == 2);
  CHECK(run("--preset blqb --paths 10") == 2);
  CHECK(run("--preset blqb --artifacts nope") == 2);
  CHECK(run("--config /nonexistent/problem.ini", "", &err) == 4);
  CHECK(err.find("IO_ERROR") != std::string::npos);
}

TEST_CASE("outputs do not depend on the thread count") {
  const fs::path a = "cli_out_t1", b = "cli_out_t3";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run("--preset blqb --out " + a.string() + kSmall, "BACKWARD_LQ_THREADS=1") == 0);
  REQUIRE(run("--preset blqb --out " + b.string() + kSmall, "BACKWARD_LQ_THREADS=3") == 0);
  for (const char* f : {"riccati.csv", "bsde.csv", "trajectory.csv", "control.csv", "cost.json"})
    CHECK(slurp(a / f) == slurp(b / f));
  fs::remove_all(a);
  fs::remove_all(b);
}
