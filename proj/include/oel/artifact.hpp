#pragma once

// Run configuration, the end-to-end construction pipeline, and the JSON run
// artifact that `verify` and `entropy` work from.
//
// Artifacts are canonical: keys sorted, exact quantities as "p/q" strings,
// no timestamps. The same configuration always serialises to the same bytes.

#include <optional>
#include <string>
#include <vector>

#include "oel/checks.hpp"
#include "oel/ladder.hpp"
#include "oel/odometer.hpp"
#include "oel/orbit_equivalence.hpp"
#include "oel/schedule.hpp"

namespace oel {

std::string tool_version();

struct RunConfig {
  std::string q = "2:inf,3:inf,5:inf,7:inf,11:inf";
  std::vector<Prime> prefix;  // factors the stream emits before its default order
  std::string primes = "diagonal";
  std::string schedule = "relaxed";
  int stages = 2;
  Level min_quotient = 12;
  Level depth_cap = 1'000'000;

  // q, prefix 2,2,3,11, relaxed, two stages: d = (12, 132).
  static RunConfig worked_run();
  ScheduleConfig schedule_config() const;
};

struct RunResult {
  RunConfig config;
  LadderState state;
  std::vector<ScheduleRow> rows;
  std::optional<OrbitAnalysis> analysis;  // absent for an empty construction
  std::vector<Check> checks;              // recursion invariants, orbit checks, inequalities
};

// Plans the schedule and analyses the result. Throws CapExceededError or
// InfeasibleError from planning; invariant failures inside the analysis are
// turned into failed checks.
RunResult run_construct(const RunConfig& config);

// Re-analyses a state that was built elsewhere (for example read back from an
// artifact) without re-planning.
RunResult run_from_state(const RunConfig& config, LadderState state);

std::string serialize_artifact(const RunResult& result);

// Rebuilds the config and ladder stages. Throws ArtifactError on malformed
// input or a tool-version mismatch.
std::pair<RunConfig, LadderState> load_artifact(const std::string& text);

struct VerifyReport {
  std::vector<Check> checks;  // recomputed checks, then the reproduction checks
  bool all_pass = false;
};

// Recomputes every check from the artifact alone and compares verdicts and
// bytes with what the artifact recorded.
VerifyReport verify_artifact(const std::string& text);

// One line of an entropy report: a computed quantity next to the bound it is
// held against.
struct ReportRow {
  std::string table;
  std::string key;
  std::string quantity;
  std::string value;
  std::string bound_name;
  std::string bound;
  std::string pass;  // "true", "false" or "" for informational rows
};

struct EntropyOptions {
  int rate_max_n = 8;
  int first_digit_max_n = 64;
};

std::vector<ReportRow> entropy_report(const RunResult& result, const EntropyOptions& options);

std::string report_to_csv(const std::vector<ReportRow>& rows);
std::string report_to_json(const std::vector<ReportRow>& rows);

// Exit status of construct/verify: 0 ok, 2 structural failure, 3 an enforced
// analytic inequality failed.
int exit_status(const std::vector<Check>& checks);

}  // namespace oel
