#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "htdbu_cli_test";

int run(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = "cd '" + kWork.string() + "' && '" + HTDBU_CLI_PATH + "' " + args + " > '" +
                          (kWork / "stdout.txt").string() + "' 2> '" + (kWork / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stdout_text() { return read(kWork / "stdout.txt"); }

std::string path(const std::string& rel) { return "'" + testing::kRoot + "/" + rel + "'"; }

const std::string kWeak = "--data " + path("fixtures/bank.csv") + " --corpus " + path("fixtures/phrasebank.csv") +
                          " --rule " + path("rules/gemini.json");

}  // namespace

TEST_CASE("validate-rule") {
  CHECK(run("validate-rule " + path("rules/manual.json")) == 0);
  CHECK(run("validate-rule " + path("rules/gemini.json") + " --data " + path("fixtures/bank.csv")) == 0);
  CHECK(stdout_text().find("ok: gemini") != std::string::npos);
  // German credit has no "y" column
  CHECK(run("validate-rule " + path("rules/gemini.json") + " --data " + path("fixtures/german.csv")) == 2);
  CHECK(stdout_text().find("UnknownColumn") != std::string::npos);
}

TEST_CASE("usage and data errors") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("synth --rows banana") == 1);
  CHECK(run("synth --method ctgan --data " + path("fixtures/bank.csv")) == 1);
  CHECK(run("synth --data /no/such/file.csv") == 2);
  CHECK(read(kWork / "stderr.txt").find("MissingFile") != std::string::npos);
  CHECK(run("bench --config /no/such/config.json") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("synth is byte-identical across runs and attaches text") {
  const std::string args = "synth " + kWeak + " --method copula --rows 300 --seed 9 --out ";
  REQUIRE(run(args + "a.csv") == 0);
  REQUIRE(run(args + "b.csv") == 0);
  const std::string a = read(kWork / "a.csv");
  CHECK(a == read(kWork / "b.csv"));
  CHECK(a.substr(0, a.find('\n')).find("text") != std::string::npos);
  REQUIRE(run("synth " + kWeak + " --method copula --rows 300 --seed 10 --out c.csv") == 0);
  CHECK(a != read(kWork / "c.csv"));
}

TEST_CASE("saved models resample identically") {
  const std::string base = "synth --data " + path("fixtures/german.csv") + " --method seq-rf --rows 200 --seed 3";
  REQUIRE(run(base + " --save-model m.json --out fit.csv") == 0);
  REQUIRE(run(base + " --load-model m.json --out loaded.csv") == 0);
  CHECK(read(kWork / "fit.csv") == read(kWork / "loaded.csv"));
}

TEST_CASE("summarize") {
  REQUIRE(run("summarize --data " + path("fixtures/bank.csv") + " --corpus " + path("fixtures/phrasebank.csv") +
              " --target y") == 0);
  const auto doc = nlohmann::json::parse(stdout_text());
  CHECK(doc["row_count"] == 4000);
  CHECK(doc.contains("sentiment_distribution"));
  CHECK(run("summarize --data " + path("fixtures/bank.csv") + " --target label") == 2);
}

TEST_CASE("eval scores a synthetic file") {
  REQUIRE(run("synth " + kWeak + " --method independent --rows 2000 --seed 4 --out ind.csv") == 0);
  REQUIRE(run("eval " + kWeak + " --seed 4 --synthetic ind.csv --format json") == 0);
  const auto doc = nlohmann::json::parse(stdout_text());
  CHECK(doc.contains("xmodal"));
  REQUIRE(run("eval " + kWeak + " --seed 4 --synthetic ind.csv --format csv") == 0);
  CHECK(stdout_text().rfind("metric,value\n", 0) == 0);
  REQUIRE(run("eval " + kWeak + " --seed 4 --synthetic ind.csv --format md") == 0);
  CHECK(stdout_text().find("| ind |") != std::string::npos);
  CHECK(run("eval " + kWeak + " --seed 4 --synthetic missing.csv") == 2);
}

TEST_CASE("reconcile exit codes") {
  const std::string args = "reconcile " + kWeak + " --method independent --rows 2000 --seed 4 ";
  CHECK(run(args + "--out rec") == 0);
  const auto trail = nlohmann::json::parse(read(kWork / "rec" / "trail.json"));
  CHECK(trail["format"] == "htdbu.trail/1");
  CHECK(trail["accepted"] == true);
  CHECK(fs::exists(kWork / "rec" / "synthetic.csv"));

  // a ceiling of zero can never be met
  auto rule = nlohmann::json::parse(read(testing::kRoot + "/rules/gemini.json"));
  rule["thresholds"]["xmodal_max"] = 0.0;
  std::ofstream(kWork / "strict.json") << rule.dump();
  CHECK(run("reconcile --data " + path("fixtures/bank.csv") + " --corpus " + path("fixtures/phrasebank.csv") +
            " --rule strict.json --method copula --rows 1000 --max-iters 2 --out strict") == 3);
  const auto strict = nlohmann::json::parse(read(kWork / "strict" / "trail.json"));
  CHECK(strict["iterations"].size() == 2);
  CHECK(strict["accepted"] == false);
}

TEST_CASE("tiny bench writes every report") {
  std::ofstream(kWork / "tiny.json") << R"({
    "datasets": [{"name": "german", "data": ")" + testing::kRoot + R"(/fixtures/german.csv", "target": "Risk"}],
    "methods": ["independent", "copula"], "seeds": [1], "synthetic_rows": 300})";
  REQUIRE(run("bench --config tiny.json --out tiny-out") == 0);
  for (const char* f : {"report.md", "report.csv", "report.json"}) CHECK(fs::exists(kWork / "tiny-out" / f));
  CHECK_FALSE(fs::exists(kWork / "tiny-out" / "ablation.csv"));
  const std::string first = read(kWork / "tiny-out" / "report.csv");
  REQUIRE(run("bench --config tiny.json --out tiny-out2 --format csv") == 0);
  CHECK(read(kWork / "tiny-out2" / "report.csv") == first);
  CHECK_FALSE(fs::exists(kWork / "tiny-out2" / "report.md"));
}
