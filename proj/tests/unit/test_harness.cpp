#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eclab/harness.hpp"

using namespace eclab::harness;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text with sections", "[harness]") {
  auto c = Config::parse(R"(top = 1
[params]
x = 2.5   # trailing comment
list = 1, 2,3
name = tf{dim=1, P="1", Q="-w1^2"}
[tolerances]
on = true
)");
  CHECK(c.integer("top") == 1);
  CHECK(c.num("params.x") == 2.5);
  CHECK(c.nums("params.list") == std::vector<double>{1, 2, 3});
  CHECK(c.str("params.name") == "tf{dim=1, P=\"1\", Q=\"-w1^2\"}");
  CHECK(c.flag("tolerances.on"));
  CHECK_THROWS_AS(c.num("params.name"), UsageError);
  CHECK_THROWS_AS(c.str("params.missing"), UsageError);
  CHECK_THROWS_AS(Config::parse("[open\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("novalue\n"), UsageError);

  // dump then parse is the identity
  auto again = Config::parse(c.dump());
  CHECK(again.entries() == c.entries());

  Config over;
  over.set("params.x", "3");
  c.merge(over);
  CHECK(c.num("params.x") == 3.0);
  over.set("params.nope", "1");
  CHECK_THROWS_AS(c.merge(over), UsageError);
}

TEST_CASE("registry order and lookup", "[harness]") {
  const std::vector<std::string> expected{
      "example1-divergence", "decompose-demo",       "laplace-boundary",   "check-transform",
      "wick-oracle",         "coefficient-condition", "convergence-bound", "lambda-constant",
      "wightman-closed-form", "schwinger-bounds",    "chronological-order", "reconstruction",
      "boost-intertwine",    "hyperfunction-example"};
  CHECK(scenario_names() == expected);
  CHECK(scenario_names() == scenario_names());
  CHECK_THROWS_AS(find_scenario("no-such"), UsageError);
  for (const auto& n : expected) {
    auto c = default_config(n);
    CHECK(c.has("run.seed"));
    CHECK(c.has("run.threads"));
  }
}

TEST_CASE("shipped config files match the built-in defaults", "[harness]") {
  for (const auto& n : scenario_names()) {
    const std::string path = std::string(ECLAB_CONFIG_DIR) + "/" + n + ".cfg";
    INFO(path);
    REQUIRE(std::filesystem::exists(path));
    CHECK(Config::load(path).entries() == default_config(n).entries());
  }
}

TEST_CASE("csv quoting and seed column", "[harness]") {
  Table t("x", {"a", "b"});
  t.add({1.5, "p, q"});
  t.add({0.1, "say \"hi\""});
  CHECK(t.csv(7) == "seed,a,b\r\n7,1.5,\"p, q\"\r\n7,0.10000000000000001,\"say \"\"hi\"\"\"\r\n");
  CHECK_THROWS(t.add({1.0}));
}

TEST_CASE("scenario runs write identical artifacts", "[harness]") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "eclab-harness-test";
  fs::remove_all(base);
  Config over;
  over.set("params.n", "3");
  over.set("params.kmax", "6");
  auto a = run_scenario("wick-oracle", over);
  auto b = run_scenario("wick-oracle", over);
  CHECK(a.passed());
  auto pa = write_artifacts(a, (base / "a").string());
  auto pb = write_artifacts(b, (base / "b").string());
  REQUIRE(pa.size() == 2);
  CHECK(slurp(pa[0]) == slurp(pb[0]));
  auto j = nlohmann::json::parse(slurp(pa[1]));
  CHECK(j["scenario"] == "wick-oracle");
  CHECK(j["seed"] == 0);
  CHECK(j["assertions"].size() == a.assertions.size());
  CHECK(j["assertions"][0].contains("bound"));
  fs::remove_all(base);
}

TEST_CASE("thread count does not change chronological results", "[harness]") {
  Config one, two;
  one.set("params.count", "60");
  two.set("params.count", "60");
  two.set("run.threads", "2");
  auto a = run_scenario("chronological-order", one);
  auto b = run_scenario("chronological-order", two);
  REQUIRE(a.tables.size() == 1);
  CHECK(a.tables[0].rows() == b.tables[0].rows());
  CHECK(a.seed == 2024);
}

TEST_CASE("overrides are validated", "[harness]") {
  Config bad;
  bad.set("params.unknown", "1");
  CHECK_THROWS_AS(run_scenario("wick-oracle", bad), UsageError);
  Config neg;
  neg.set("run.threads", "0");
  CHECK_THROWS_AS(run_scenario("wick-oracle", neg), UsageError);
}

TEST_CASE("failing assertions are reported", "[harness]") {
  Config strict;
  strict.set("tolerances.max_seconds", "0");
  strict.set("params.n", "2");
  strict.set("params.kmax", "2");
  auto r = run_scenario("wick-oracle", strict);
  CHECK_FALSE(r.passed());
  CHECK(r.summary_text().find("FAIL  runtime in seconds") != std::string::npos);
  CHECK(r.summary()["pass"] == false);
}

TEST_CASE("parallel_for covers every index once", "[harness]") {
  std::vector<int> hits(101, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 7) throw std::runtime_error("boom");
  }));
}
