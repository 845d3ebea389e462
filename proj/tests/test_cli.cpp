#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = bgcs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const Outcome& o) { return nlohmann::json::parse(o.out); }

}  // namespace

TEST_CASE("help lists every parameter with its default", "[cli]") {
  const auto top = run({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"eval-f", "inner", "measure-check", "formula-a", "formula-b", "rou", "sample", "trace"}) {
    CHECK_THAT(top.out, Catch::Matchers::ContainsSubstring(sub));
  }
  const auto trace = run({"trace", "--help"});
  CHECK(trace.code == 0);
  for (const char* opt : {"--beta", "--m", "--cutoff", "--backend", "--weights", "--seed", "--workers", "--budget",
                          "--out", "--format"}) {
    CHECK_THAT(trace.out, Catch::Matchers::ContainsSubstring(opt));
  }
  CHECK_THAT(trace.out, Catch::Matchers::ContainsSubstring("[64]"));
  CHECK_THAT(trace.out, Catch::Matchers::ContainsSubstring("[matrix]"));
}

TEST_CASE("usage errors exit with 1", "[cli]") {
  CHECK(run({}).code == 1);
  CHECK(run({"nope"}).code == 1);
  CHECK(run({"eval-f", "--k", "abc"}).code == 1);
  CHECK(run({"rou", "--mode", "bogus"}).code == 1);
  CHECK(run({"trace", "--n", "2", "--mu", "1"}).code == 1);
  CHECK(run({"eval-f", "--format", "xml"}).code == 1);
}

TEST_CASE("domain errors exit with 1 and explain themselves", "[cli]") {
  const auto o = run({"formula-b", "--mu", "1", "--nu", "2"});
  CHECK(o.code == 1);
  CHECK_THAT(o.err, Catch::Matchers::ContainsSubstring("mu > |nu|"));
  CHECK(run({"measure-check", "--k", "-1"}).code == 1);
  CHECK(run({"trace", "--m", "4"}).code == 1);  // sliced trace without a cutoff
}

TEST_CASE("passing checks exit with 0 and report JSON", "[cli]") {
  const auto o = run({"eval-f", "--k", "2.5", "--w-re", "0.4,1.1", "--w-im", "0.2,-0.3"});
  REQUIRE(o.code == 0);
  const auto j = parse(o);
  CHECK(j["command"] == "eval-f");
  CHECK(j["pass"] == true);
  CHECK(j["seed"] == 42);
  const auto& r = j["records"][0];
  CHECK(r["rel_err"].get<double>() <= 1e-10);
  CHECK(r.contains("lhs"));
  CHECK(r["lhs"].contains("re"));
  CHECK(r["params"]["K"] == 2.5);

  CHECK(run({"inner", "--z-re", "0.3,0.1", "--z-im", "0,0.2", "--zp-re", "0.5,-0.2", "--zp-im", "0.1,0"}).code == 0);
  CHECK(run({"measure-check", "--n", "2", "--k", "1.5", "--moment", "2,1"}).code == 0);
  CHECK(run({"formula-a", "--k", "0.3", "--s", "-0.9,2.3,0.4"}).code == 0);
  CHECK(run({"formula-b", "--mu", "3.5", "--nu", "1.5", "--a", "0.7"}).code == 0);
  CHECK(run({"rou", "--n", "2", "--k", "0.75", "--cutoff", "4"}).code == 0);
  CHECK(run({"trace", "--backend", "kernel-quadrature", "--n", "2", "--mu", "1,2"}).code == 0);
  const auto sliced = run({"trace", "--n", "1", "--k", "1", "--mu", "1", "--beta", "1", "--m", "64", "--mode",
                           "imaginary", "--backend", "matrix", "--cutoff", "40"});
  REQUIRE(sliced.code == 0);
  CHECK(std::fabs(parse(sliced)["records"][0]["value"].get<double>() - 1.5819767069) / 1.5819767069 <= 1e-2);
  const auto rou = run({"rou", "--n", "1", "--k", "0.5", "--cutoff", "6", "--mode", "quadrature"});
  REQUIRE(rou.code == 0);
  CHECK(parse(rou)["records"][0]["lhs"].get<double>() <= 1e-8);
  CHECK(run({"trace", "--cutoff", "40", "--m", "16"}).code == 1);  // unstable linear slicing
}

TEST_CASE("tolerance breaches exit with 2", "[cli]") {
  const auto o = run({"trace", "--cutoff", "3", "--m", "8", "--tol", "1e-6"});
  CHECK(o.code == 2);
  CHECK(parse(o)["pass"] == false);
  CHECK(run({"eval-f", "--w-re", "1e4", "--max-shells", "5"}).code == 2);  // non-convergence
}

TEST_CASE("CSV output flattens records", "[cli]") {
  const auto o = run({"sample", "--k", "2", "--budget", "20000", "--format", "csv"});
  REQUIRE(o.code == 0);
  std::istringstream in(o.out);
  std::string header;
  std::getline(in, header);
  CHECK_THAT(header, Catch::Matchers::ContainsSubstring("z_score"));
  CHECK_THAT(header, Catch::Matchers::ContainsSubstring("params.K"));
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 13);  // E[r], two angle modes, 10 quantiles
}

TEST_CASE("reports are byte-identical for a fixed seed and worker count", "[cli][property]") {
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--n", "2", "--k", "1.5", "--budget", "50000", "--points", "5"},
      {"rou", "--mode", "montecarlo", "--k", "2", "--cutoff", "3", "--budget", "50000"},
      {"trace", "--backend", "kernel-montecarlo", "--mu", "4", "--budget", "50000"},
      {"trace", "--backend", "montecarlo", "--cutoff", "3", "--m", "4", "--budget", "20000"}};
  for (const auto& base : commands) {
    for (const char* workers : {"1", "3"}) {
      auto args = base;
      args.insert(args.end(), {"--seed", "123", "--workers", workers});
      const auto a = run(args);
      const auto b = run(args);
      INFO(base[0] << " workers " << workers);
      CHECK(a.code == b.code);
      CHECK(a.out == b.out);
    }
    auto other = base;
    other.insert(other.end(), {"--seed", "124"});
    auto same = base;
    same.insert(same.end(), {"--seed", "123"});
    CHECK(run(other).out != run(same).out);
  }
}

TEST_CASE("seed defaults to the environment", "[cli]") {
  ::setenv(bgcs::cli::kSeedEnv, "777", 1);
  const auto a = run({"sample", "--budget", "1000"});
  ::setenv(bgcs::cli::kSeedEnv, "not-a-number", 1);
  const auto bad = run({"sample", "--budget", "1000"});
  ::unsetenv(bgcs::cli::kSeedEnv);
  const auto b = run({"sample", "--budget", "1000"});
  CHECK(parse(a)["seed"] == 777);
  CHECK(parse(b)["seed"] == 42);
  CHECK(bad.code == 1);
}

TEST_CASE("--out writes the report to a file", "[cli]") {
  const auto path = std::filesystem::temp_directory_path() / "bgcs_cli_out_test.json";
  const auto o = run({"formula-b", "--out", path.string()});
  CHECK(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["command"] == "formula-b");
  std::filesystem::remove(path);
}
