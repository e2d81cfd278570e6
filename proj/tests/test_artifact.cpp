#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "oel/artifact.hpp"
#include "oel/errors.hpp"

using namespace oel;
using nlohmann::json;

namespace {

const std::string& worked_text() {
  static const std::string text = serialize_artifact(run_construct(RunConfig::worked_run()));
  return text;
}

const Check* find_failed(const std::vector<Check>& checks, const std::string& name) {
  const auto it = std::find_if(checks.begin(), checks.end(),
                               [&](const Check& c) { return c.name == name && !c.pass; });
  return it == checks.end() ? nullptr : &*it;
}

const ReportRow* find_row(const std::vector<ReportRow>& rows, const std::string& table, const std::string& key,
                          const std::string& bound_name) {
  for (const auto& r : rows) {
    if (r.table == table && r.key == key && r.bound_name == bound_name) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("worked run artifact") {
  const auto result = run_construct(RunConfig::worked_run());
  CHECK(result.state.system().moduli() == std::vector<Level>{1, 12, 132});
  CHECK(exit_status(result.checks) == 0);
  const auto doc = json::parse(worked_text());
  CHECK(doc.at("schedule").size() == 2);
  CHECK(doc.at("schedule")[1].at("beta") == "61/132");
  CHECK(doc.at("stages").size() == 3);
  CHECK(doc.at("ledgers").at("K").at("1").at("measure") == "3/4");
  CHECK(doc.at("tool_version") == tool_version());
}

TEST_CASE("construction is deterministic and verify reproduces it") {
  CHECK(serialize_artifact(run_construct(RunConfig::worked_run())) == worked_text());
  const auto report = verify_artifact(worked_text());
  CHECK(report.all_pass);
  CHECK(report.checks.back().name == "artifact-bytes");
  CHECK(report.checks.back().pass);
}

TEST_CASE("an empty construction is trivially valid") {
  auto cfg = RunConfig::worked_run();
  cfg.stages = 0;
  const auto result = run_construct(cfg);
  CHECK(result.state.depth() == 0);
  CHECK(exit_status(result.checks) == 0);
  CHECK(verify_artifact(serialize_artifact(result)).all_pass);
}

TEST_CASE("depth cap below d_2 stops the construction") {
  auto cfg = RunConfig::worked_run();
  cfg.depth_cap = 100;
  CHECK_THROWS_AS(run_construct(cfg), CapExceededError);
}

TEST_CASE("a mutated rung is caught with its position") {
  auto doc = json::parse(worked_text());
  for (auto& st : doc.at("stages")) {
    if (st.at("n") == 1 && st.at("m") == 2) st.at("s")[0] = 0;
  }
  const auto report = verify_artifact(doc.dump(1) + "\n");
  CHECK_FALSE(report.all_pass);
  const Check* c = find_failed(report.checks, "ladder-disjoint");
  REQUIRE(c != nullptr);
  CHECK(c->stage == "n=1,m=2,i=0");
  CHECK(find_failed(report.checks, "verdicts-reproduced") != nullptr);
}

TEST_CASE("malformed and foreign artifacts are rejected") {
  CHECK_THROWS_AS(verify_artifact("{not json"), ArtifactError);
  auto doc = json::parse(worked_text());
  doc["tool_version"] = "0.0.0-other";
  CHECK_THROWS_AS(verify_artifact(doc.dump()), ArtifactError);
  auto missing = json::parse(worked_text());
  missing.at("stages").erase(0);
  CHECK_THROWS_AS(load_artifact(missing.dump()), ArtifactError);
}

TEST_CASE("entropy report pairs every quantity with its bound") {
  auto [cfg, state] = load_artifact(worked_text());
  const auto result = run_from_state(cfg, std::move(state));
  const auto rows = entropy_report(result, {8, 64});
  for (const auto& r : rows) {
    INFO(r.table << " " << r.key << " " << r.quantity << " " << r.value << " vs " << r.bound_name << " " << r.bound);
    CHECK(r.pass != "false");
  }
  REQUIRE(find_row(rows, "S_over_T", "pieces", "H(P_ST v pieces)") != nullptr);
  REQUIRE(find_row(rows, "first_digit", "bernoulli", "H(P)") != nullptr);
  const auto* last = find_row(rows, "first_digit", "64", "ln(d_1 n)/n");
  REQUIRE(last != nullptr);
  CHECK(std::stod(last->value) < 0.15);
  const auto csv = report_to_csv(rows);
  CHECK(csv.rfind("table,key,quantity,value,bound_name,bound,pass\n", 0) == 0);
  CHECK(json::parse(report_to_json(rows)).size() == rows.size());
}
