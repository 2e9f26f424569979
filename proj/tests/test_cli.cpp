#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FC_CLI_PATH + "\" " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.output.append(buf, n);
  const int st = pclose(pipe);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("flatcircle_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("version and usage") {
  Outcome v = cli("--version");
  CHECK(v.code == 0);
  CHECK(v.output.find("0.1.0") != std::string::npos);
  CHECK(cli("--help").code == 0);
  CHECK(cli("").code == 2);
  CHECK(cli("explode").code == 2);
  CHECK(cli("tune --precision-bits many").code == 2);
}

TEST_CASE("tune writes tune.json") {
  fs::path dir = scratch("tune");
  Outcome o = cli("tune --u 0.05 --l 2 --precision-bits 256 --out " + dir.string());
  CHECK(o.code == 0);
  CHECK(o.output.find("PASS closest returns") != std::string::npos);
  CHECK(fs::exists(dir / "tune.json"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(cli("-q tune --u 0.05 --l 2 --precision-bits 256").output.empty());
  fs::remove_all(dir);
}

TEST_CASE("config file and flag precedence") {
  fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"l": "0.5", "u": "0.05", "precision_bits": 256})";
  }
  CHECK(cli("tune --config " + (dir / "cfg.json").string()).code == 2);
  CHECK(cli("tune --l 2 --config " + (dir / "cfg.json").string()).code == 0);
  {
    std::ofstream f(dir / "broken.json");
    f << "{ not json";
  }
  CHECK(cli("tune --config " + (dir / "broken.json").string()).code == 2);
  CHECK(cli("tune --config " + (dir / "missing.json").string()).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  Outcome dissipative = cli("cherry --l 2");
  CHECK(dissipative.code == 2);
  CHECK(dissipative.output.find("ERROR") != std::string::npos);
  CHECK(cli("scalings --l 0.5").code == 2);
  CHECK(cli("verify --precision-bits 64 --n-max 12").code == 3);
  CHECK(cli("partition --n-max 6").code == 0);
}
