#include "barabanov/error.hpp"
#include "barabanov/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace barabanov;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::current_path() / "runner_out" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig config(const std::string& text, const fs::path& out) {
  RunConfig c = parse_config(text);
  c.out_dir = out.string();
  c.timestamp = false;
  return c;
}

}  // namespace

TEST_CASE("jsr of a scaled identity") {
  const auto dir = fresh_dir("jsr");
  const auto c = config(R"({"version": "config-v1", "command": "jsr",
      "set": {"kind": "matrices", "matrices": [[["2", "0"], ["0", "2"]]]}})", dir);
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitCertified);
  CHECK(r.report.at("schema") == "jsr-report-v1");
  CHECK(r.report["results"]["lower"] == 2.0);
  CHECK(r.report["results"]["upper"] == 2.0);
  CHECK(r.files == std::vector<std::string>{"report.json"});
  CHECK(slurp(dir / "report.json") == dump_report(r.report));
  CHECK_FALSE(r.report.contains("timestamp"));
  CHECK_FALSE(r.report["config"].contains("out_dir"));
}

TEST_CASE("reproduce example1 writes a norm family") {
  const auto dir = fresh_dir("ex1");
  const auto c = config(R"({"version": "config-v1", "command": "reproduce", "recipe": "example1",
      "set": {"kind": "example1", "theta": {"rational_pi": [1, 3]}}})", dir);
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitCertified);
  CHECK(r.report["results"]["verdict"] == "NotUnique");
  const auto& norms = r.report["results"]["family"]["norms"];
  REQUIRE(norms.size() >= 2);
  for (const auto& n : norms) {
    CHECK(fs::exists(dir / n["file"].get<std::string>()));
    CHECK(n["residual"].get<double>() <= 1e-9);
  }
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(r.files.back() == "report.json");
  CHECK(r.report["results"]["reproduction"].contains("euclidean_residual"));
}

TEST_CASE("reports are byte identical without timestamp") {
  const std::string text = R"({"version": "config-v1", "command": "unique",
      "set": {"kind": "example1", "theta": {"rational_pi": [1, 4]}}})";
  const auto a = fresh_dir("rep_a");
  const auto b = fresh_dir("rep_b");
  const RunResult ra = run(config(text, a));
  const RunResult rb = run(config(text, b));
  CHECK(ra.files == rb.files);
  for (const auto& f : ra.files) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("reducible input is an error") {
  const auto dir = fresh_dir("reducible");
  const auto c = config(R"({"version": "config-v1", "command": "unique",
      "set": {"kind": "matrices", "matrices": [[["1", "1"], ["0", "1"]], [["2", "0"], ["0", "1"]]]}})", dir);
  CHECK_THROWS_AS(run(c), ReducibleInputError);
}

TEST_CASE("undetermined verdicts exit with 2") {
  const auto dir = fresh_dir("undetermined");
  // A float angle without an irrationality declaration cannot be certified.
  const auto c = config(R"({"version": "config-v1", "command": "unique",
      "set": {"kind": "example1", "theta": {"radians": 1.0}},
      "transitivity": {"escalate": false}})", dir);
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitUndetermined);
  CHECK(r.report["results"]["verdict"] == "Undetermined");
  CHECK(r.report["exit_code"] == kExitUndetermined);
  CHECK(r.report["results"]["family"].is_null());
}

TEST_CASE("perturb writes kappa norms") {
  const auto dir = fresh_dir("perturb");
  const auto c = config(R"({"version": "config-v1", "command": "perturb",
      "set": {"kind": "theorem2", "b1": [["1/2", "0"], ["0", "0"]], "b2": [["0", "-1"], ["1", "0"]],
              "b2_angle": {"rational_pi": [1, 2]}},
      "family": {"kappas": [0.2, 0.4, 0.6]}})", dir);
  const RunResult r = run(c);
  CHECK(r.report["schema"] == "perturb-report-v1");
  CHECK(r.report["results"]["family"]["norms"].size() == 3);
  for (const auto& m : r.report["results"]["margins"]) CHECK(m.get<double>() > 0.0);
}
