#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "mql/cli.hpp"

namespace fs = std::filesystem;
using mql::json;

namespace {

struct Out {
  int status;
  std::string out;
  std::string err;
};

Out run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = mql::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mql_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("every engine operation is reachable from a command") {
  std::set<std::string> reachable, names;
  for (const auto& c : mql::cli::command_table()) {
    CHECK(names.insert(c.name).second);
    reachable.insert(c.operations.begin(), c.operations.end());
  }
  for (const auto& op : mql::cli::engine_operations()) {
    CAPTURE(op);
    CHECK(reachable.contains(op));
  }
  for (const char* required : {"decompose", "cp-enum", "lift", "invert", "check-maass", "hecke", "synth", "satake",
                               "stability", "adjoint"}) {
    CHECK(names.contains(required));
  }
  const auto help = run({"--help"});
  CHECK(help.status == 0);
  for (const auto& n : names) CHECK(help.out.find(n) != std::string::npos);
}

TEST_CASE("cp-enum and decompose") {
  auto r = run({"cp-enum", "3"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out).size() == 4);
  CHECK(json::parse(run({"cp-enum", "13"}).out).size() == 14);

  r = run({"decompose", "2ij"});
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out).at(0);
  CHECK(j["K"] == 4);
  CHECK(j["u"] == 1);
  CHECK(j["n"] == 1);
  r = run({"decompose", "(3,0,0,-3)"});
  CHECK(json::parse(r.out).at(0)["K"] == 18);
  CHECK(json::parse(r.out).at(0)["n"] == 3);
}

TEST_CASE("malformed input exits 2 and names the offending record") {
  auto r = run({"decompose", "1-ij", "1+i+j"});
  CHECK(r.status == 2);
  CHECK(r.err.find("\"1+i+j\"") != std::string::npos);
  CHECK(r.err.find("#1") != std::string::npos);

  r = run({"cp-enum", "9"});
  CHECK(r.status == 2);
  r = run({"cp-enum", "x"});
  CHECK(r.status == 2);
  CHECK(r.err.find("\"x\"") != std::string::npos);

  const auto cfg = scratch("bad.json");
  write(cfg, R"({"epsilon": 1, "kmax": "lots"})");
  r = run({"--config", cfg.string(), "lift"});
  CHECK(r.status == 2);
  CHECK(r.err.find("kmax") != std::string::npos);

  write(cfg, R"({"lambdas": {"3": 1.0, "9": 0.5}})");
  r = run({"--config", cfg.string(), "synth"});
  CHECK(r.status == 2);
  CHECK(r.err.find("9") != std::string::npos);

  write(cfg, "{ not json");
  CHECK(run({"--config", cfg.string(), "adjoint"}).status == 2);
  CHECK(run({"--config", (cfg.parent_path() / "missing.json").string(), "adjoint"}).status == 2);
  CHECK(run({"no-such-command"}).status == 2);
  CHECK(run({"--kmax", "1", "lift"}).status == 2);

  // A table with a corrupted record.
  const auto table = scratch("table.json");
  REQUIRE(run({"--kmax", "64", "--out", table.string(), "lift"}).status == 0);
  auto j = json::parse(slurp(table));
  j["entries"][5]["u"] = 7;
  write(table, j.dump());
  r = run({"check-maass", table.string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("table entry #5") != std::string::npos);
}

TEST_CASE("lift, check-maass and invert") {
  const auto table = scratch("formal.json");
  REQUIRE(run({"--kmax", "128", "--out", table.string(), "lift"}).status == 0);
  auto r = run({"check-maass", table.string()});
  CHECK(r.status == 0);
  CHECK(json::parse(r.out)["pass"] == true);
  r = run({"invert", table.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"1\"") != std::string::npos);

  // Perturb one entry of a numeric table: check-maass now reports a failure.
  const auto numeric = scratch("numeric.json");
  const auto cfg = scratch("cfg.json");
  write(cfg, R"({"epsilon": -1, "kmax": 600, "lambdas": {"3": 1.5, "5": -2.0}})");
  REQUIRE(run({"--config", cfg.string(), "--backend", "numeric", "--out", numeric.string(), "lift"}).status == 0);
  CHECK(run({"check-maass", numeric.string()}).status == 0);
  auto j = json::parse(slurp(numeric));
  j["entries"][0]["value"] = j["entries"][0]["value"].get<double>() + 1.0;
  const auto broken = scratch("broken.json");
  write(broken, j.dump());
  r = run({"check-maass", broken.string()});
  CHECK(r.status == 1);
  CHECK(json::parse(r.out)["failures_2a"][0] == "(4,1,1)");
}

TEST_CASE("hecke, extract-lambda, satake, stability, adjoint") {
  const auto cfg = scratch("eigen.json");
  write(cfg, R"({"epsilon": 1, "kmax": 3000, "lambdas": {"3": 1.5, "5": -2.0}, "primes": [2, 3, 5]})");
  const auto numeric = scratch("eigen-table.json");
  REQUIRE(run({"--config", cfg.string(), "--backend", "numeric", "--out", numeric.string(), "lift"}).status == 0);
  auto r = run({"--config", cfg.string(), "hecke", numeric.string()});
  CHECK(r.status == 0);
  r = run({"--config", cfg.string(), "extract-lambda", numeric.string()});
  REQUIRE(r.status == 0);
  const auto lam = json::parse(r.out);
  REQUIRE(lam.size() == 2);
  CHECK(lam[0]["lambda"].get<double>() == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(lam[1]["lambda"].get<double>() == doctest::Approx(-2.0).epsilon(1e-10));
  r = run({"--op", "H2", "--prime", "3", "--mode", "image", "hecke", numeric.string()});
  CHECK(r.status == 0);
  CHECK(json::parse(r.out)["backend"] == "numeric");

  const auto report = scratch("satake-report.json");
  r = run({"--config", cfg.string(), "--report", report.string(), "satake"});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("p,lambda,", 0) == 0);
  CHECK(json::parse(slurp(report)).dump().find("violated") != std::string::npos);

  CHECK(run({"--kmax", "1200", "stability"}).status == 0);
  CHECK(run({"adjoint"}).status == 0);
  CHECK(run({"--config", cfg.string(), "descriptor", "2", "3"}).status == 0);
  CHECK(run({"--config", cfg.string(), "synth"}).status == 0);
  CHECK(run({"lemma51", "2+i+j", "3"}).status == 0);
  CHECK(run({"represent", "36", "1", "3"}).status == 0);
  CHECK(run({"represent", "8", "0", "1"}).status == 2);
  CHECK(run({"arith", "1+i", "*", "j+k"}).status == 0);
  CHECK(run({"formal", "reduce", R"({"4":"1"})"}).status == 0);
}

TEST_CASE("the suite is deterministic") {
  const auto a = scratch("suite-a"), b = scratch("suite-b");
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run({"--kmax", "600", "--seed", "7", "--out", a.string(), "suite"}).status == 0);
  REQUIRE(run({"--kmax", "600", "--seed", "7", "--out", b.string(), "suite"}).status == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto other = b / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
    ++files;
  }
  CHECK(files >= 20);
  fs::remove_all(scratch("").parent_path());
}
