#include "oel/artifact.hpp"

#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "oel/errors.hpp"

#ifndef OEL_VERSION
#define OEL_VERSION "0.0.0"
#endif

namespace oel {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "oel-run-artifact/1";

std::string kind_name(CheckKind k) { return k == CheckKind::structural ? "structural" : "analytic"; }

std::string key_name(const StageKey& k) { return std::to_string(k.first) + "," + std::to_string(k.second); }

json level_set_json(const LevelSet& s) {
  return {{"depth", s.depth()}, {"modulus", s.modulus()}, {"members", s.members()}, {"measure", to_string(s.measure())}};
}

json distribution_json(const CocycleDistribution& d) {
  json masses = json::array();
  for (const auto& [k, mass] : d.masses) masses.push_back({k, to_string(mass)});
  return {{"masses", masses},
          {"domain", to_string(d.domain)},
          {"defect", to_string(d.defect)},
          {"entropy", d.entropy()}};
}

json check_json(const Check& c) {
  return {{"name", c.name}, {"stage", c.stage},   {"lhs", c.lhs},
          {"rhs", c.rhs},   {"pass", c.pass},     {"kind", kind_name(c.kind)},
          {"enforced", c.enforced}};
}

json config_json(const RunConfig& c) {
  return {{"q", c.q},
          {"prefix", c.prefix},
          {"primes", c.primes},
          {"schedule", c.schedule},
          {"stages", c.stages},
          {"min_quotient", c.min_quotient},
          {"depth_cap", c.depth_cap}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.q = j.at("q").get<std::string>();
  c.prefix = j.at("prefix").get<std::vector<Prime>>();
  c.primes = j.at("primes").get<std::string>();
  c.schedule = j.at("schedule").get<std::string>();
  c.stages = j.at("stages").get<int>();
  c.min_quotient = j.at("min_quotient").get<Level>();
  c.depth_cap = j.at("depth_cap").get<Level>();
  return c;
}

json analysis_json(const OrbitAnalysis& a) {
  json s_table = json::array();
  for (const auto& run : a.S.runs()) s_table.push_back({run.start, run.length, run.k});
  json pieces = json::array();
  for (const auto& key : a.S.pieces()) pieces.push_back({key.first, key.second});

  json ledgers = json::object();
  auto stage_sets = [](const std::map<StageKey, LevelSet>& m) {
    json out = json::object();
    for (const auto& [k, s] : m) out[key_name(k)] = level_set_json(s);
    return out;
  };
  auto index_sets = [](const std::map<int, LevelSet>& m) {
    json out = json::object();
    for (const auto& [k, s] : m) out[std::to_string(k)] = level_set_json(s);
    return out;
  };
  ledgers["D"] = stage_sets(a.ledger.D);
  ledgers["E"] = stage_sets(a.ledger.E);
  ledgers["A"] = stage_sets(a.ledger.A);
  ledgers["W"] = stage_sets(a.ledger.W);
  ledgers["K"] = index_sets(a.ledger.K);
  ledgers["K_prime"] = index_sets(a.ledger.K_prime);

  json st_pieces = json::array();
  for (const auto& p : a.s_over_t.pieces) {
    st_pieces.push_back({{"stage", key_name(p.key)},
                         {"distribution", distribution_json(p.dist)},
                         {"count_bound", p.count_bound},
                         {"uniform_bound", p.uniform_bound},
                         {"stage_majorant", p.stage_majorant},
                         {"majorant_is_actual", p.majorant_is_actual}});
  }
  json ts_blocks = json::array();
  for (const auto& b : a.t_over_s.blocks) {
    ts_blocks.push_back({{"n", b.n},
                         {"distribution", distribution_json(b.dist)},
                         {"lambda", b.lambda.str()},
                         {"crude_bound", b.crude_bound},
                         {"max_abs_k", b.max_abs_k},
                         {"uniform_bound", b.uniform_bound},
                         {"beta_bound", b.beta_bound}});
  }
  return {{"S_table", {{"depth", a.S.depth()},
                       {"modulus", a.S.modulus()},
                       {"runs", s_table},
                       {"pieces", pieces},
                       {"domain_size", a.S.domain_size()},
                       {"cycles", a.chains.cycles}}},
          {"ledgers", ledgers},
          {"distributions",
           {{"S_over_T", {{"total", distribution_json(a.s_over_t.total)},
                          {"pieces", st_pieces},
                          {"uniform_total", a.s_over_t.uniform_total},
                          {"majorant_total", a.s_over_t.majorant_total}}},
            {"T_over_S", {{"total", distribution_json(a.t_over_s.total)},
                          {"blocks", ts_blocks},
                          {"uniform_total", a.t_over_s.uniform_total},
                          {"majorant_total", a.t_over_s.majorant_total}}}}}};
}

Check failure_check(const std::string& name, const std::string& what) {
  return Check{name, "all", what, "no exception", false, CheckKind::structural, true};
}

std::string real(double x) { return format_real(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string tool_version() { return OEL_VERSION; }

RunConfig RunConfig::worked_run() {
  RunConfig c;
  c.prefix = {2, 2, 3, 11};
  return c;
}

ScheduleConfig RunConfig::schedule_config() const {
  ScheduleConfig sc;
  sc.stages = stages;
  sc.mode = ScheduleMode::parse(schedule);
  sc.primes = PrimeSequence::parse(primes);
  sc.min_quotient = min_quotient;
  sc.depth_cap = depth_cap;
  return sc;
}

RunResult run_from_state(const RunConfig& config, LadderState state) {
  RunResult out;
  out.config = config;
  out.state = std::move(state);
  const auto sc = config.schedule_config();
  try {
    out.checks = verify_recursion_invariants(out.state);
  } catch (const std::exception& e) {
    out.checks.push_back(failure_check("recursion-invariants", e.what()));
  }
  try {
    out.rows = schedule_rows(out.state, sc.primes);
    auto analysis = analyze_orbit(out.state, out.rows);
    out.checks.insert(out.checks.end(), analysis.checks.begin(), analysis.checks.end());
    if (out.state.depth() > 0) out.analysis = std::move(analysis);
    const auto ineq = check_inequalities(out.rows, sc.mode);
    out.checks.insert(out.checks.end(), ineq.begin(), ineq.end());
  } catch (const std::exception& e) {
    // A corrupted ladder can break the assembly of S outright.
    out.analysis.reset();
    out.checks.push_back(failure_check("analysis", e.what()));
  }
  return out;
}

RunResult run_construct(const RunConfig& config) {
  if (config.stages < 0) throw std::invalid_argument("stages must be non-negative");
  const auto sc = config.schedule_config();
  EnumerationPolicy policy;
  policy.prefix = config.prefix;
  FactorStream stream(SupernaturalNumber::parse(config.q), policy);
  return run_from_state(config, plan_schedule(stream, sc));
}

std::string serialize_artifact(const RunResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"p", row.p},
                    {"d", row.d},
                    {"a", row.a},
                    {"w", row.w},
                    {"v", row.v},
                    {"beta", to_string(row.beta)},
                    {"lambda_prev", row.lambda_prev.str()}});
  }
  json stages = json::array();
  for (const auto& [key, st] : r.state.stages()) {
    stages.push_back({{"n", st.n},
                      {"m", st.m},
                      {"modulus", st.modulus},
                      {"a", st.a},
                      {"t", st.t},
                      {"r", st.r()},
                      {"s", st.s},
                      {"spreads", st.spreads()}});
  }
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));

  json doc = {{"format", kFormat},
              {"tool_version", tool_version()},
              {"config", config_json(r.config)},
              {"depth", r.state.depth()},
              {"moduli", r.state.system().moduli()},
              {"schedule", rows},
              {"stages", stages},
              {"checks", checks}};
  if (r.analysis) {
    const json analysis = analysis_json(*r.analysis);
    for (const auto& [k, v] : analysis.items()) doc[k] = v;
  }
  return doc.dump(1) + "\n";
}

std::pair<RunConfig, LadderState> load_artifact(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArtifactError(std::string("artifact is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw ArtifactError("unknown artifact format");
    const auto version = doc.at("tool_version").get<std::string>();
    if (version != tool_version()) {
      throw ArtifactError("artifact written by version " + version + ", this is " + tool_version());
    }
    RunConfig config = config_from_json(doc.at("config"));
    const auto moduli = doc.at("moduli").get<std::vector<Level>>();
    if (moduli.empty() || moduli.front() != 1) throw ArtifactError("moduli must start at d_0 = 1");

    std::map<StageKey, LadderStage> stored;
    for (const auto& js : doc.at("stages")) {
      LadderStage st;
      st.n = js.at("n").get<int>();
      st.m = js.at("m").get<int>();
      st.modulus = js.at("modulus").get<Level>();
      st.a = js.at("a").get<Level>();
      st.t = js.at("t").get<Level>();
      st.s = js.at("s").get<std::vector<Level>>();
      if (!stored.emplace(StageKey{st.n, st.m}, std::move(st)).second) {
        throw ArtifactError("duplicate stage in artifact");
      }
    }
    LadderState state;
    for (std::size_t m = 1; m < moduli.size(); ++m) {
      state.push_modulus(moduli[m]);
      const int mm = static_cast<int>(m);
      // Off-diagonal stages first so that a_m is known only after its own stage.
      for (int n = 1; n <= mm; ++n) {
        const auto it = stored.find({n, mm});
        if (it == stored.end()) throw ArtifactError("missing stage (" + std::to_string(n) + "," + std::to_string(mm) + ")");
        for (Level x : it->second.s) {
          if (x < 0 || x >= moduli[m]) throw ArtifactError("stage level outside its tower");
        }
        state.add_stage(it->second);
        stored.erase(it);
      }
    }
    if (!stored.empty()) throw ArtifactError("stage beyond the artifact depth");
    return {config, state};
  } catch (const ArtifactError&) {
    throw;
  } catch (const std::exception& e) {
    throw ArtifactError(std::string("malformed artifact: ") + e.what());
  }
}

VerifyReport verify_artifact(const std::string& text) {
  auto [config, state] = load_artifact(text);
  const RunResult result = run_from_state(config, std::move(state));
  VerifyReport out;
  out.checks = result.checks;

  // Stored verdicts against recomputed ones, check by check.
  const json stored = json::parse(text).at("checks");
  std::size_t mismatched = 0;
  const std::size_t common = std::min(stored.size(), result.checks.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (stored[i] != check_json(result.checks[i])) ++mismatched;
  }
  mismatched += std::max(stored.size(), result.checks.size()) - common;
  out.checks.push_back(Check{"verdicts-reproduced", "all", std::to_string(mismatched) + " differing",
                             "0 differing", mismatched == 0, CheckKind::structural, true});
  const bool same_bytes = serialize_artifact(result) == text;
  out.checks.push_back(Check{"artifact-bytes", "all", same_bytes ? "identical" : "different", "identical",
                             same_bytes, CheckKind::structural, true});
  out.all_pass = exit_status(out.checks) == 0;
  return out;
}

std::vector<ReportRow> entropy_report(const RunResult& result, const EntropyOptions& options) {
  std::vector<ReportRow> rows;
  if (!result.analysis) return rows;
  const auto& a = *result.analysis;

  const auto& st = a.s_over_t;
  for (const auto& p : st.pieces) {
    const std::string key = key_name(p.key);
    const double h = p.dist.entropy();
    rows.push_back({"S_over_T", key, "support", std::to_string(p.dist.support_size()), "count_bound",
                    std::to_string(p.count_bound),
                    flag(static_cast<Level>(p.dist.support_size()) <= p.count_bound)});
    rows.push_back({"S_over_T", key, "entropy", real(h), "uniform_bound", real(p.uniform_bound),
                    flag(h <= p.uniform_bound + 1e-9)});
    rows.push_back({"S_over_T", key, "entropy", real(h),
                    p.majorant_is_actual ? "stage_majorant(actual)" : "stage_majorant", real(p.stage_majorant),
                    flag(h <= p.stage_majorant + 1e-9)});
  }
  // Additivity over the disjoint pieces: the per-piece entropies add up to the
  // entropy of the partition by (piece, displacement), counted off the S table.
  {
    CompensatedSum piecewise;
    for (const auto& p : st.pieces) piecewise.add(p.dist.entropy());
    std::map<std::pair<int, Level>, std::int64_t> joint;
    for (Level x = 0; x < a.S.modulus(); ++x) {
      if (a.S.defined(x)) ++joint[{a.S.piece(x), a.S.displacement(x)}];
    }
    std::vector<std::int64_t> counts;
    for (const auto& [cell, c] : joint) counts.push_back(c);
    const double direct = entropy_of_counts(counts, a.S.modulus());
    rows.push_back({"S_over_T", "pieces", "sum_of_stage_entropies", real(piecewise.value()), "H(P_ST v pieces)",
                    real(direct), flag(std::abs(piecewise.value() - direct) <= 1e-9)});
  }
  const double hst = st.total.entropy();
  rows.push_back({"S_over_T", "total", "entropy", real(hst), "closing_chain_majorant", real(st.majorant_total),
                  flag(hst <= st.majorant_total + 1e-9)});
  rows.push_back({"S_over_T", "total", "defect", to_string(st.total.defect), "", "", ""});

  const auto& ts = a.t_over_s;
  for (const auto& b : ts.blocks) {
    const std::string key = std::to_string(b.n);
    const double h = b.dist.entropy();
    rows.push_back({"T_over_S", key, "support", std::to_string(b.dist.support_size()), "lambda_prev",
                    b.lambda.str(), flag(BigInt(b.dist.support_size()) <= b.lambda)});
    rows.push_back({"T_over_S", key, "max_abs_k", std::to_string(b.max_abs_k), "E-crude",
                    std::to_string(b.crude_bound), flag(b.max_abs_k <= b.crude_bound)});
    rows.push_back({"T_over_S", key, "entropy", real(h), "uniform_bound", real(b.uniform_bound),
                    flag(h <= b.uniform_bound + 1e-9)});
    rows.push_back({"T_over_S", key, "entropy", real(h), "beta_bound", real(b.beta_bound),
                    flag(h <= b.beta_bound + 1e-9)});
  }
  const double hts = ts.total.entropy();
  rows.push_back({"T_over_S", "total", "entropy", real(hts), "closing_chain_majorant", real(ts.majorant_total),
                  flag(hts <= ts.majorant_total + 1e-9)});
  rows.push_back({"T_over_S", "total", "defect", to_string(ts.total.defect), "", "", ""});

  const auto rate = cocycle_entropy_rate(a, options.rate_max_n);
  for (const auto& r : rate.rows) {
    const std::string key = std::to_string(r.n);
    rows.push_back({"rate", key, "H_lumped/n", real(r.entropy_lumped / r.n), "H_lumped(T)",
                    real(rate.rows.front().entropy_lumped),
                    flag(r.entropy_lumped / r.n <= rate.rows.front().entropy_lumped + 1e-9)});
    rows.push_back({"rate", key, "H_resolved/n", real(r.entropy_resolved / r.n), "", "",
                    r.inconclusive ? "inconclusive" : ""});
    rows.push_back({"rate", key, "defect", to_string(r.defect), "", "", ""});
  }
  for (const auto& c : rate.checks) {
    rows.push_back({"rate_checks", c.name + "@" + c.stage, "lhs", c.lhs, "rhs", c.rhs, flag(c.pass)});
  }

  const auto fd = first_digit_entropy(result.state, options.first_digit_max_n);
  for (const auto& r : fd.rows) {
    rows.push_back({"first_digit", std::to_string(r.n), "H/n", real(r.rate), "ln(d_1 n)/n", real(r.bound),
                    flag(r.rate <= r.bound + 1e-9)});
  }
  rows.push_back({"first_digit", "bernoulli", "H(P^F)/|F|", real(fd.bernoulli_rate), "H(P)",
                  real(fd.bernoulli_rate), "true"});
  for (const auto& c : fd.checks) {
    rows.push_back({"first_digit_checks", c.name + "@" + c.stage, "lhs", c.lhs, "rhs", c.rhs, flag(c.pass)});
  }
  return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << "table,key,quantity,value,bound_name,bound,pass\n";
  for (const auto& r : rows) {
    os << field(r.table) << ',' << field(r.key) << ',' << field(r.quantity) << ',' << field(r.value) << ','
       << field(r.bound_name) << ',' << field(r.bound) << ',' << field(r.pass) << '\n';
  }
  return os.str();
}

std::string report_to_json(const std::vector<ReportRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"table", r.table},
                   {"key", r.key},
                   {"quantity", r.quantity},
                   {"value", r.value},
                   {"bound_name", r.bound_name},
                   {"bound", r.bound},
                   {"pass", r.pass}});
  }
  return out.dump(1) + "\n";
}

int exit_status(const std::vector<Check>& checks) {
  if (!all_enforced_pass(checks, CheckKind::structural)) return 2;
  if (!all_enforced_pass(checks, CheckKind::analytic)) return 3;
  return 0;
}

}  // namespace oel
