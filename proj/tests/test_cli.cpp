#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dsurf/cli.hpp"
#include "support.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dsurf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("verify on the clifford torus") {
  const Result r = run({"verify", testing::corpus("clifford"), "--grid", "3x3"});
  CHECK(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["command"] == "verify");
  CHECK(doc["spec"] == "clifford");
  CHECK(doc["pass"] == true);
  CHECK(doc["records"].size() == 9);
  bool saw_residual = false;
  for (const auto& c : doc["checks"]) {
    CHECK(c["pass"] == true);
    if (c["name"] == "weierstrass_residual") {
      saw_residual = true;
      CHECK(c["worst"].get<double>() <= 1e-8);
    }
  }
  CHECK(saw_residual);
}

TEST_CASE("single point frame report") {
  const Result r = run({"frame", testing::corpus("clifford-rotated"), "--at", "1.0", "2.0"});
  CHECK(r.code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc["records"].size() == 1);
  const json& rec = doc["records"][0];
  CHECK(rec["s"][0].get<double>() == 1.0);
  CHECK(std::abs(rec["torsion"][0].get<double>() - 1.0) <= 1e-6);
}

TEST_CASE("gauged verify") {
  const Result r = run({"verify", testing::corpus("clifford-rotated"), "--grid", "3x3", "--gauged"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["gauged"] == true);
}

TEST_CASE("spectrum and parse-check") {
  Result r = run({"spectrum", testing::corpus("clifford"), "--grid", "4x4"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["spectrum"]["dimension"] == 64);
  r = run({"parse-check", testing::corpus("graph")});
  CHECK(r.code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({"verify", "/nonexistent.imm"}).code == 2);
  CHECK(run({"bogus", testing::corpus("plane")}).code == 2);
  CHECK(run({"verify", testing::corpus("plane"), "--grid", "0x3"}).code == 2);
  CHECK(run({"verify", testing::corpus("plane"), "--grid", "ax3"}).code == 2);
  CHECK(run({"verify", testing::corpus("plane"), "--at", "5", "0"}).code == 2);
  CHECK(run({"verify", testing::corpus("plane"), "--json", "--csv"}).code == 2);
  CHECK(run({"spectrum", testing::corpus("plane"), "--grid", "8x8"}).code == 2);
  CHECK(run({"spectrum", testing::corpus("clifford"), "--grid", "64x64"}).code == 3);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("reports are deterministic across thread counts") {
  const std::string file = testing::corpus("graph");
  const Result a = run({"verify", file, "--grid", "4x4", "--threads", "1"});
  const Result b = run({"verify", file, "--grid", "4x4", "--threads", "3"});
  const Result c = run({"verify", file, "--grid", "4x4"});
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("csv export and --out") {
  const Result r = run({"tube", testing::corpus("graph"), "--grid", "2x2", "--csv"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, line;
  std::getline(lines, header);
  CHECK(header.find("s_0") != std::string::npos);
  int rows = 0;
  while (std::getline(lines, line)) rows += !line.empty();
  CHECK(rows == 4);

  const std::string path = "dsurf_cli_test_out.json";
  CHECK(run({"frame", testing::corpus("plane"), "--grid", "2x2", "--out", path}).code == 0);
  std::ifstream f(path);
  CHECK(json::parse(f)["pass"] == true);
  std::remove(path.c_str());
}
