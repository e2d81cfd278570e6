// oel: construct, verify and report on orbit-equivalence runs between odometers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "oel/artifact.hpp"
#include "oel/errors.hpp"
#include "oel/growth.hpp"
#include "oel/remark.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kStructural = 2,
  kAnalytic = 3,
  kCap = 4,
  kInfeasible = 5,
  kArtifact = 6,
};

struct Globals {
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;
  oel::Level depth_cap = 1'000'000;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("oel");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("OEL_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw oel::ArtifactError("cannot write " + g.out);
  f << text;
  spdlog::info("wrote {}", g.out);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw oel::ArtifactError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string render(const Globals& g, const std::vector<oel::ReportRow>& rows) {
  return g.format == "csv" ? oel::report_to_csv(rows) : oel::report_to_json(rows);
}

std::vector<oel::ReportRow> check_rows(const std::vector<oel::Check>& checks) {
  std::vector<oel::ReportRow> rows;
  for (const auto& c : checks) {
    const std::string kind = c.kind == oel::CheckKind::structural ? "structural" : "analytic";
    rows.push_back({kind + (c.enforced ? "" : "(informational)"), c.name + "@" + c.stage, c.name, c.lhs, c.name,
                    c.rhs, c.pass ? "true" : "false"});
  }
  return rows;
}

void log_failures(const std::vector<oel::Check>& checks) {
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (c.pass) continue;
    ++failed;
    if (c.enforced) spdlog::warn("FAIL {} [{}]: {} vs {}", c.name, c.stage, c.lhs, c.rhs);
  }
  spdlog::info("{} checks, {} failed", checks.size(), failed);
}

std::vector<oel::Prime> parse_prefix(const std::string& text) {
  std::vector<oel::Prime> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoull(item));
  }
  return out;
}

int cmd_construct(const Globals& g, oel::RunConfig cfg, const std::string& prefix) {
  cfg.prefix = parse_prefix(prefix);
  cfg.depth_cap = g.depth_cap;
  const auto result = oel::run_construct(cfg);
  std::string moduli;
  for (auto d : result.state.system().moduli()) moduli += std::to_string(d) + " ";
  spdlog::info("moduli: {}", moduli);
  log_failures(result.checks);
  emit(g, oel::serialize_artifact(result));
  return oel::exit_status(result.checks);
}

int cmd_verify(const Globals& g, const std::string& path) {
  const auto report = oel::verify_artifact(read_file(path));
  log_failures(report.checks);
  emit(g, render(g, check_rows(report.checks)));
  return oel::exit_status(report.checks);
}

int cmd_entropy(const Globals& g, const std::string& path, const oel::EntropyOptions& opts) {
  auto [cfg, state] = oel::load_artifact(read_file(path));
  const auto result = oel::run_from_state(cfg, std::move(state));
  emit(g, render(g, oel::entropy_report(result, opts)));
  return kOk;
}

std::string z2_text(const oel::Z2& z) { return "(" + std::to_string(z.m) + "," + std::to_string(z.k) + ")"; }

int cmd_remark(const Globals& g, int n_max, int depth, int identity_depth) {
  using oel::format_real;
  std::vector<oel::ReportRow> rows;
  const auto q = oel::entropy_Q(n_max);
  for (const auto& a : q.atoms) {
    rows.push_back({"Q_atoms", "N=" + std::to_string(a.carry) + ",j=" + std::to_string(a.j), "cocycle",
                    z2_text(a.value), "mass", oel::to_string(a.mass), ""});
  }
  rows.push_back({"Q_entropy", "partial", "H", format_real(q.partial), "closed_form", format_real(q.limit),
                  std::abs(q.partial + q.tail - q.limit) <= 1e-9 ? "true" : "false"});
  rows.push_back({"Q_entropy", "tail", "remainder", format_real(q.tail), "", "", ""});
  rows.push_back({"Q_entropy", "coarse", "H(P) partial", format_real(q.coarse_partial), "H(Q) partial",
                  format_real(q.partial), q.coarse_partial <= q.partial + 1e-12 ? "true" : "false"});
  const auto [u, v] = oel::cocycle_Z2_generators(depth);
  for (const auto* rep : {&u, &v}) {
    for (const auto& r : rep->rows) {
      rows.push_back({"generator_" + rep->name, "N=" + std::to_string(r.carry), "displacement",
                      std::to_string(r.displacement), "mass", oel::to_string(r.mass), ""});
    }
    rows.push_back({"generator_" + rep->name, "partial", "H", format_real(rep->partial), "limit",
                    format_real(rep->limit), std::abs(rep->partial + rep->tail - rep->limit) <= 1e-9 ? "true" : "false"});
    rows.push_back({"generator_" + rep->name, "tail", "remainder", format_real(rep->tail), "", "", ""});
  }
  const auto ident = oel::cocycle_identity_check(identity_depth);
  const auto bij = oel::phi_bijection_check(std::min(identity_depth, 8));
  auto checks = check_rows({ident, bij});
  rows.insert(rows.end(), checks.begin(), checks.end());
  emit(g, render(g, rows));
  return ident.pass && bij.pass ? kOk : kStructural;
}

std::string element_text(const oel::GroupElement& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s + ")";
}

int cmd_growth(const Globals& g, const std::string& group_name, int n, int r, const std::string& omega0,
               bool sweep) {
  const auto group = oel::GrowthGroup::parse(group_name);
  const auto constants = group.constants();
  std::vector<oel::GrowthInstance> instances;
  if (sweep) {
    instances = oel::sweep_instances(group, n, r, g.seed);
  } else {
    instances.push_back({n, r, oel::parse_omega0(omega0, group)});
  }
  std::vector<oel::ReportRow> rows;
  rows.push_back({"constants", group.name(), "|E|", std::to_string(constants.E_size), "c1", oel::format_real(constants.c1), ""});
  rows.push_back({"constants", group.name(), "d", std::to_string(constants.d), "k", std::to_string(constants.k), ""});
  rows.push_back({"constants", group.name(), "C", oel::to_string(constants.C), "c2", oel::to_string(constants.c2), ""});
  bool all = true;
  for (const auto& inst : instances) {
    const auto rep = oel::check_bound(inst, group, constants);
    all = all && rep.pass;
    std::string key = "omega0={";
    bool first = true;
    for (const auto& [i, b] : inst.fixed) {
      key += (first ? "" : ";") + std::to_string(i) + "=" + element_text(b);
      first = false;
    }
    key += "}";
    rows.push_back({"count", key, "count", std::to_string(rep.count),
                    rep.stated_applies ? "e^{c1|O0|} c2 (rn)^k" : "|E|^{|O0|} C (((r+1)d+1)n)^k",
                    oel::to_string(rep.stated_applies ? rep.stated_bound : rep.proof_bound), rep.pass ? "true" : "false"});
  }
  emit(g, render(g, rows));
  return all ? kOk : kStructural;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Orbit equivalence between odometers: construction, verification and entropy reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", oel::tool_version());

  Globals g;
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "Seed for randomized sweeps");
  app.add_option("--depth-cap", g.depth_cap, "Largest admissible d_M")->check(CLI::PositiveNumber);

  oel::RunConfig cfg;
  std::string prefix;
  auto* construct = app.add_subcommand("construct", "Plan a schedule, build the ladders and S, write an artifact");
  construct->fallthrough();
  construct->add_option("--q", cfg.q, "Supernatural number, e.g. \"2:inf,3:inf\" or \"*:inf\"");
  construct->add_option("--prefix", prefix, "Factors the stream emits first, e.g. 2,2,3,11");
  construct->add_option("--primes", cfg.primes, "Prime sequence: diagonal or a single prime");
  construct->add_option("--schedule", cfg.schedule, "strict, relaxed or relaxed:<slack>");
  construct->add_option("--stages", cfg.stages, "Number of stages N")->check(CLI::NonNegativeNumber);
  construct->add_option("--min-quotient", cfg.min_quotient, "Lower bound on d_1");

  std::string artifact;
  auto* verify = app.add_subcommand("verify", "Recompute every check from a stored artifact");
  verify->fallthrough();
  verify->add_option("artifact", artifact, "Artifact path")->required();

  oel::EntropyOptions eopts;
  auto* entropy = app.add_subcommand("entropy", "Entropy ledgers, rate table and first-digit table");
  entropy->fallthrough();
  entropy->add_option("artifact", artifact, "Artifact path")->required();
  entropy->add_option("--rate-n", eopts.rate_max_n, "Largest power n in the rate table")->check(CLI::PositiveNumber);
  entropy->add_option("--window", eopts.first_digit_max_n, "Largest first-digit window")->check(CLI::PositiveNumber);

  int n_max = 20;
  int gen_depth = 12;
  int identity_depth = 6;
  auto* remark = app.add_subcommand("remark", "Base-4 odometer against two base-2 odometers");
  remark->fallthrough();
  remark->add_option("--n-max", n_max, "Series terms for H(Q)")->check(CLI::Range(1, 26));
  remark->add_option("--depth", gen_depth, "Carry lengths for the Z^2 generators")->check(CLI::Range(1, 26));
  remark->add_option("--identity-depth", identity_depth, "Depth of the cocycle identity check")->check(CLI::Range(1, 8));

  std::string group_name = "z";
  int gn = 3;
  int gr = 2;
  std::string omega0;
  bool sweep = false;
  auto* growth = app.add_subcommand("growth", "Count products against the polynomial bound");
  growth->fallthrough();
  growth->add_option("--group", group_name, "z, z^2, z^3 or dihedral");
  growth->add_option("--n", gn, "Number of factors")->check(CLI::Range(0, 10));
  growth->add_option("--r", gr, "Ball radius for free factors")->check(CLI::Range(0, 3));
  growth->add_option("--omega0", omega0, "Fixed factors, e.g. \"2=5\" or \"1=(3,1)\"");
  growth->add_flag("--sweep", sweep, "Every Omega_0 pattern with seeded random fixed factors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*construct) return cmd_construct(g, cfg, prefix);
    if (*verify) return cmd_verify(g, artifact);
    if (*entropy) return cmd_entropy(g, artifact, eopts);
    if (*remark) return cmd_remark(g, n_max, gen_depth, identity_depth);
    if (*growth) return cmd_growth(g, group_name, gn, gr, omega0, sweep);
  } catch (const oel::CapExceededError& e) {
    spdlog::error("depth cap: {}", e.what());
    return kCap;
  } catch (const oel::InfeasibleError& e) {
    spdlog::error("infeasible: {}", e.what());
    return kInfeasible;
  } catch (const oel::ArtifactError& e) {
    spdlog::error("artifact: {}", e.what());
    return kArtifact;
  } catch (const oel::InvariantError& e) {
    spdlog::error("invariant: {}", e.what());
    return kStructural;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  }
  return kUsage;
}
