// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// Each criterion reads the library's own verdicts and also recomputes the
// quantities it is about from first principles (lifted levels, S images,
// direct series sums, brute-force digit words), so a check that silently
// stopped firing would still be caught.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oel/artifact.hpp"
#include "oel/growth.hpp"
#include "oel/remark.hpp"

using namespace oel;

namespace {

constexpr double kEntropyTol = 1e-9;

// Collects failures for one criterion; the first few are printed.
struct Verdict {
  std::vector<std::string> failures;
  std::string summary;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool pass() const { return failures.empty(); }
};

std::string str(const Rational& r) { return to_string(r); }

// y at depth M lies over x at depth m iff y = x mod d_m.
std::vector<Level> lift_levels(Level x, Level d_m, Level d_M) {
  std::vector<Level> out;
  for (Level y = x; y < d_M; y += d_m) out.push_back(y);
  return out;
}

Level w_before(const std::vector<ScheduleRow>& rows, int n) { return n <= 1 ? 1 : rows.at(static_cast<std::size_t>(n - 2)).w; }

const RunResult& worked() {
  static const RunResult r = run_construct(RunConfig::worked_run());
  return r;
}

struct Config {
  std::string q;
  Level min_quotient;
  int stages;
  std::vector<Prime> prefix;
};

std::string describe(const Config& c) {
  std::ostringstream os;
  os << c.q << " mq=" << c.min_quotient << " N=" << c.stages;
  return os.str();
}

// Every configuration of the structural sweep; all stay at d_M <= 10^5.
const std::vector<std::pair<Config, RunResult>>& sweep() {
  static const auto runs = [] {
    std::vector<Config> configs;
    const std::vector<std::pair<std::string, Level>> bases = {
        {"*:inf", 3},       {"*:inf", 12},      {"2:inf,3:inf", 3}, {"2:inf,3:inf", 12}, {"3:inf", 3},
        {"3:inf", 12},      {"2:inf", 3},       {"2:inf", 12},      {"5:inf", 3},        {"5:inf", 12},
        {"2:inf,5:inf", 3}, {"2:inf,5:inf", 12}, {"3:inf,7:inf", 3}, {"3:inf,7:inf", 12},
        {"2:inf,3:inf,5:inf,7:inf,11:inf", 3}};
    for (int stages = 1; stages <= 3; ++stages) {
      for (const auto& [q, mq] : bases) configs.push_back({q, mq, stages, {}});
      configs.push_back({"2:inf,3:inf,5:inf,7:inf,11:inf", 12, stages, {2, 2, 3, 11}});
    }
    std::vector<std::pair<Config, RunResult>> out;
    for (const auto& c : configs) {
      RunConfig rc;
      rc.q = c.q;
      rc.min_quotient = c.min_quotient;
      rc.stages = c.stages;
      rc.prefix = c.prefix;
      out.emplace_back(c, run_construct(rc));
    }
    return out;
  }();
  return runs;
}

std::size_t count_named(const std::vector<Check>& checks, const std::string& name) {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [&](const Check& c) { return c.name == name; }));
}

// Every check with the given name must pass; returns how many there were.
std::size_t require_named(Verdict& v, const std::string& where, const std::vector<Check>& checks,
                          const std::string& name) {
  std::size_t seen = 0;
  for (const auto& c : checks) {
    if (c.name != name) continue;
    ++seen;
    v.expect(c.pass, where + ": " + c.name + " " + c.stage + " " + c.lhs + " vs " + c.rhs);
  }
  return seen;
}

// ---------------------------------------------------------------------------

Verdict worked_reference_run() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = run_construct(RunConfig::worked_run());
  const auto text = serialize_artifact(result);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& st = result.state;

  v.expect(st.system().moduli() == std::vector<Level>{1, 12, 132}, "d != (12, 132)");
  v.expect(st.a_values() == std::vector<Level>{10, 12}, "a != (10, 12)");

  // (1,1): rungs {0}, ..., {9}, leftovers {10, 11}.
  const auto& s11 = st.stage(1, 1);
  v.expect(s11.t == 1 && s11.a == 10, "(1,1) shape");
  for (Level i = 0; i < 10 && s11.t == 1; ++i) v.expect(s11.rung_level(0, i) == i, "(1,1) rung " + std::to_string(i));
  v.expect(s11.leftovers().members() == std::vector<Level>{10, 11}, "(1,1) leftovers");

  // (1,2): W = lifts of {10, 11}; sub-ladder 0 on 10,11,22,23,...,58,59 and
  // sub-ladder 1 on 70,...,119.
  const auto& s12 = st.stage(1, 2);
  std::vector<Level> w12;
  for (Level x = 0; x < 132; ++x) {
    if (x % 12 >= 10) w12.push_back(x);
  }
  v.expect(s12.s == w12, "(1,2) W");
  v.expect(s12.r() == 21, "r_{1,2} = " + std::to_string(s12.r()));
  v.expect(s12.t == 2, "t_{1,2} = " + std::to_string(s12.t));
  if (s12.t == 2) {
    for (Level j = 0; j < 2; ++j) {
      for (Level i = 0; i < 10; ++i) {
        v.expect(s12.rung_level(j, i) == w12[static_cast<std::size_t>(10 * j + i)],
                 "(1,2) rung " + std::to_string(j) + "," + std::to_string(i));
      }
    }
    v.expect(s12.rung_level(0, 9) == 59 && s12.rung_level(1, 0) == 70 && s12.rung_level(1, 9) == 119,
             "(1,2) sub-ladder endpoints");
  }
  v.expect(s12.leftovers().members() == std::vector<Level>{130, 131}, "(1,2) leftovers");

  // (2,2): W = {0, 12, ..., 120} with {10, 70}; the first 12 are rungs.
  const auto& s22 = st.stage(2, 2);
  std::vector<Level> w22 = {10, 70};
  for (Level x = 0; x <= 120; x += 12) w22.push_back(x);
  std::sort(w22.begin(), w22.end());
  v.expect(s22.s == w22, "(2,2) W");
  v.expect(s22.r() == 12, "r_{2,2} = " + std::to_string(s22.r()));
  v.expect(s22.t == 1 && s22.a == 12, "(2,2) shape");
  v.expect(s22.leftovers().members() == std::vector<Level>{120}, "(2,2) leftovers");

  // The spread bound d_{m-1} concerns stages with m > n; here only (1,2).
  v.expect(s12.spreads() == std::vector<Level>{11, 11}, "(1,2) spreads");
  Level max_spread = 0;
  for (const auto& [key, stage] : st.stages()) {
    if (key.second == key.first) continue;
    for (Level s : stage.spreads()) max_spread = std::max(max_spread, s);
  }
  v.expect(max_spread <= 11, "spread " + std::to_string(max_spread) + " > 11");

  v.expect(all_enforced_pass(result.checks, CheckKind::structural), "a structural check failed");
  v.expect(serialize_artifact(run_construct(RunConfig::worked_run())) == text, "second construction differs");

  std::ifstream golden(OEL_ACCEPTANCE_DATA "/worked_run.json", std::ios::binary);
  std::stringstream buf;
  buf << golden.rdbuf();
  v.expect(golden.good() || golden.eof(), "reference artifact missing");
  v.expect(buf.str() == text, "artifact bytes differ from the reference artifact");
  v.expect(secs < 1.0, "runtime " + std::to_string(secs) + " s");

  std::ostringstream os;
  os << "d=(12,132) a=(10,12) max spread " << max_spread << ", " << text.size() << " bytes, " << secs << " s";
  v.summary = os.str();
  return v;
}

Verdict structural_suite() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checks_seen = 0;
  Level largest = 0;
  for (const auto& [cfg, result] : sweep()) {
    const auto where = describe(cfg);
    const auto& st = result.state;
    const Level dM = st.system().moduli().back();
    largest = std::max(largest, dM);
    v.expect(dM <= 100000, where + ": d_M = " + std::to_string(dM));

    for (const auto& c : result.checks) {
      if (c.kind != CheckKind::structural || !c.enforced) continue;
      ++checks_seen;
      v.expect(c.pass, where + ": " + c.name + " " + c.stage + " " + c.lhs + " vs " + c.rhs);
    }
    for (const char* name : {"prop-i", "ladder-disjoint", "E-q"}) {
      v.expect(count_named(result.checks, name) > 0, where + ": no " + name + " check ran");
    }
    if (st.depth() >= 2) {
      for (const char* name : {"prop-ii", "spread"}) {
        v.expect(count_named(result.checks, name) > 0, where + ": no " + name + " check ran");
      }
    }
    if (st.depth() == 0) continue;
    v.expect(count_named(result.checks, "S-injective") > 0, where + ": no S-injective check ran");

    // Rungs of one family never share a depth-M level; spreads stay within d_{m-1}.
    for (int n = 1; n <= st.depth(); ++n) {
      std::vector<char> used(static_cast<std::size_t>(dM), 0);
      for (int m = n; m <= st.depth(); ++m) {
        const auto& stage = st.stage(n, m);
        const Level dm = st.system().modulus(m);
        for (Level j = 0; j < stage.t; ++j) {
          for (Level i = 0; i < stage.a; ++i) {
            for (Level y : lift_levels(stage.rung_level(j, i), dm, dM)) {
              v.expect(!used[static_cast<std::size_t>(y)], where + ": family " + std::to_string(n) +
                                                               " reuses level " + std::to_string(y));
              used[static_cast<std::size_t>(y)] = 1;
            }
            if (m > n && i + 1 < stage.a) {
              v.expect(stage.step(j, i) <= st.system().modulus(m - 1),
                       where + ": spread at (" + std::to_string(n) + "," + std::to_string(m) + ")");
            }
          }
        }
      }
    }

    // S is injective and D_{n,m} displacements lie in [-d_{m-1}, w_{n-1} d_{m-1}] \ {0}.
    const auto& S = result.analysis->S;
    std::vector<char> hit(static_cast<std::size_t>(dM), 0);
    for (Level x = 0; x < dM; ++x) {
      if (!S.defined(x)) continue;
      const Level k = S.displacement(x);
      const Level y = ((x - k) % dM + dM) % dM;
      v.expect(S.image(x) == y, where + ": image of " + std::to_string(x));
      v.expect(!hit[static_cast<std::size_t>(y)], where + ": S not injective at " + std::to_string(x));
      hit[static_cast<std::size_t>(y)] = 1;
      const auto [n, m] = S.pieces().at(static_cast<std::size_t>(S.piece(x)));
      const Level d_prev = st.system().modulus(m - 1);
      v.expect(k != 0 && k >= -d_prev && k <= w_before(result.rows, n) * d_prev,
               where + ": displacement " + std::to_string(k) + " on D_{" + std::to_string(n) + "," +
                   std::to_string(m) + "}");
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  std::ostringstream os;
  os << sweep().size() << " runs, " << checks_seen << " structural checks, d_M up to " << largest << ", " << secs
     << " s";
  v.summary = os.str();
  return v;
}

Verdict measure_bounds() {
  Verdict v;
  std::size_t seen = 0;
  for (const auto& [cfg, result] : sweep()) {
    if (!result.analysis) continue;
    const auto where = describe(cfg);
    const int N = result.state.depth();
    for (const char* name : {"E-Kn", "E-Knbeta", "E-Fn", "E-Dnm"}) seen += require_named(v, where, result.checks, name);
    v.expect(count_named(result.checks, "E-Kn") == static_cast<std::size_t>(N), where + ": E-Kn missing a stage");
    v.expect(count_named(result.checks, "E-Knbeta") == static_cast<std::size_t>(N), where + ": E-Knbeta missing a stage");
    v.expect(count_named(result.checks, "E-Fn") == static_cast<std::size_t>(N - 1), where + ": E-Fn missing a stage");
  }

  // mu(X \ E_{1,1}) = 2/12 = (v_0 + p_1 w_0) / d_1.
  const auto& a = *worked().analysis;
  const auto& row1 = worked().rows.front();
  const Rational outside = a.ledger.E.at({1, 1}).complement().measure();
  const Rational bound(BigInt(0 + row1.p * 1), BigInt(row1.d));
  v.expect(outside == Rational(2, 12), "mu(X \\ E_{1,1}) = " + str(outside));
  v.expect(outside == bound, "bound at n=1 is " + str(bound));
  const Rational outside2 = a.ledger.E.at({2, 2}).complement().measure();
  v.expect(outside2 <= Rational(30, 132), "mu(X \\ E_{2,2}) = " + str(outside2));

  v.summary = std::to_string(seen) + " exact inequalities; worked n=1: " + str(outside) + " = " + str(bound);
  return v;
}

Verdict crude_displacement() {
  Verdict v;
  std::size_t levels = 0;
  for (const auto& [cfg, result] : sweep()) {
    if (!result.analysis) continue;
    const auto where = describe(cfg);
    require_named(v, where, result.checks, "E-crude");
    const auto& st = result.state;
    const auto& ts = result.analysis->t_over_s;
    const Level dM = st.system().moduli().back();
    for (int n = 1; n <= st.depth(); ++n) {
      const Level w = w_before(result.rows, n);
      const Level bound = 4 * w * w * st.system().modulus(n - 1);
      for (Level x : result.analysis->ledger.K_prime.at(n).members()) {
        for (Level y : lift_levels(x, st.system().modulus(n), dM)) {
          const Level k = ts.kappa.at(static_cast<std::size_t>(y));
          if (k == kUndefined) continue;
          ++levels;
          v.expect(std::abs(k) <= bound, where + ": |k| = " + std::to_string(std::abs(k)) + " > " +
                                             std::to_string(bound) + " on K'_" + std::to_string(n));
        }
      }
    }
  }

  const auto& a = *worked().analysis;
  const Rational k1 = a.ledger.K.at(1).measure();
  v.expect(k1 == Rational(3, 4), "mu(K_1) = " + str(k1));
  v.expect(!a.t_over_s.blocks.empty(), "no T-over-S blocks");
  if (!a.t_over_s.blocks.empty()) {
    const auto& b1 = a.t_over_s.blocks.front();
    v.expect(b1.n == 1 && b1.dist.defect == 0, "K_1 not fully resolved");
    v.expect(b1.dist.masses.size() == 1 && b1.dist.masses.begin()->first == -1 &&
                 b1.dist.masses.begin()->second == Rational(3, 4),
             "K_1 is not {k = -1 : 3/4}");
  }
  // Level by level: K_1 = B_1 levels 1..9, kappa = -1 on each lift.
  for (Level x = 0; x < 132; ++x) {
    if (x % 12 >= 1 && x % 12 <= 9) v.expect(a.t_over_s.kappa.at(static_cast<std::size_t>(x)) == -1, "kappa at " + std::to_string(x));
  }
  v.summary = std::to_string(levels) + " resolved K' levels within 4 w^2 d; worked K_1: k = -1, mass " + str(k1);
  return v;
}

Verdict entropy_ledgers() {
  Verdict v;
  double worst_st = 0;
  double worst_ts = 0;
  for (const auto& [cfg, result] : sweep()) {
    if (!result.analysis) continue;
    const auto where = describe(cfg);
    const auto& a = *result.analysis;
    const auto& st = result.state;
    for (const char* name : {"S-T-count", "S-T-chain", "T-S-count", "T-S-chain"}) require_named(v, where, result.checks, name);

    const double h_st = a.s_over_t.total.entropy();
    const double h_ts = a.t_over_s.total.entropy();
    v.expect(std::isfinite(h_st) && std::isfinite(h_ts), where + ": non-finite entropy");
    v.expect(h_st <= a.s_over_t.majorant_total + kEntropyTol, where + ": H(P_ST) above its majorant");
    v.expect(h_ts <= a.t_over_s.majorant_total + kEntropyTol, where + ": H(P_TS) above its majorant");
    if (a.s_over_t.majorant_total > 0) worst_st = std::max(worst_st, h_st / a.s_over_t.majorant_total);
    if (a.t_over_s.majorant_total > 0) worst_ts = std::max(worst_ts, h_ts / a.t_over_s.majorant_total);

    // Masses are exact: resolved plus defect is the domain, never more than 1.
    for (const auto* dist : {&a.s_over_t.total, &a.t_over_s.total}) {
      Rational sum = 0;
      for (const auto& [k, m] : dist->masses) {
        v.expect(m > 0, where + ": nonpositive mass");
        sum += m;
      }
      v.expect(sum + dist->defect == dist->domain && dist->domain <= 1, where + ": masses do not add up");
    }

    // Possibility counts (1 + w_{n-1}) d_{m-1} and lambda_{n-1} = 8 w_{n-1}^2 d_{n-1} + 1.
    for (const auto& p : a.s_over_t.pieces) {
      const auto [n, m] = p.key;
      const Level count = (1 + w_before(result.rows, n)) * st.system().modulus(m - 1);
      v.expect(static_cast<Level>(p.dist.support_size()) <= count,
               where + ": piece (" + std::to_string(n) + "," + std::to_string(m) + ") has " +
                   std::to_string(p.dist.support_size()) + " values");
    }
    for (const auto& b : a.t_over_s.blocks) {
      const BigInt w = w_before(result.rows, b.n);
      const BigInt lambda = 8 * w * w * st.system().modulus(b.n - 1) + 1;
      v.expect(BigInt(b.dist.support_size()) <= lambda, where + ": block " + std::to_string(b.n) + " exceeds lambda");
    }
  }
  const auto& a = *worked().analysis;
  std::ostringstream os;
  os << "worked H(P_ST)=" << a.s_over_t.total.entropy() << " <= " << a.s_over_t.majorant_total
     << ", H(P_TS)=" << a.t_over_s.total.entropy() << " <= " << a.t_over_s.majorant_total
     << "; worst ratios " << worst_st << ", " << worst_ts;
  v.summary = os.str();
  return v;
}

// sum_{n = from+1}^{to} n x^n, summed term by term.
double series(double x, int from, int to) {
  double s = 0;
  for (int n = from + 1; n <= to; ++n) s += n * std::pow(x, n);
  return s;
}

Verdict remark_example() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  // The atom with n - 1 carries has mass 4^{-n} and there are three of them,
  // so H(Q) = sum_n 3 * 4^{-n} * n ln 4.
  const double oracle = 3 * std::log(4.0) * series(0.25, 0, 400);
  v.expect(std::abs(oracle - 8.0 / 3.0 * std::log(2.0)) < 1e-12, "series oracle disagrees with (8/3) ln 2");

  const auto q = entropy_Q(20);
  v.expect(std::abs(q.partial - oracle) < 1e-6, "partial sum " + std::to_string(q.partial));
  v.expect(std::abs(q.limit - oracle) < 1e-12, "limit " + std::to_string(q.limit));
  double direct = 0;
  for (const auto& atom : q.atoms) direct += -to_double(atom.mass) * std::log(to_double(atom.mass));
  v.expect(std::abs(direct - q.partial) < 1e-12, "partial is not the sum over atoms");

  v.expect(cocycle_Z_generator(0, 0) == Z2{0, 1}, "atom j=0");
  v.expect(cocycle_Z_generator(0, 1) == Z2{1, -1}, "atom j=1");
  v.expect(cocycle_Z_generator(0, 2) == Z2{0, 1}, "atom j=2");

  const int depth = 12;
  const auto [u, w] = cocycle_Z2_generators(depth);
  const double geometric = std::log(2.0) * series(0.5, depth, 400);
  for (const auto* g : {&u, &w}) {
    v.expect(std::isfinite(g->partial) && std::isfinite(g->tail), g->name + ": non-finite entropy");
    v.expect(g->tail >= 0 && g->tail <= geometric + 1e-12, g->name + ": tail above the geometric bound");
    v.expect(g->partial <= g->limit + 1e-12, g->name + ": partial above the limit");
  }
  v.expect(cocycle_identity_check(6).pass, "cocycle identity");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 1.0, "runtime " + std::to_string(secs) + " s");

  std::ostringstream os;
  os.precision(10);
  os << "H(Q) partial(20)=" << q.partial << " limit=" << oracle << "; u " << u.partial << "+" << u.tail << ", v "
     << w.partial << "+" << w.tail << "; " << secs << " s";
  v.summary = os.str();
  return v;
}

Verdict growth_suite() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t instances = 0;
  auto run = [&](const GrowthGroup& g, int n, int r, std::uint64_t seed) {
    const auto constants = g.constants();
    for (const auto& inst : sweep_instances(g, n, r, seed)) {
      ++instances;
      const auto rep = check_bound(inst, g, constants);
      if (!rep.pass) {
        std::ostringstream os;
        os << g.name() << " n=" << n << " r=" << r << " |Omega0|=" << inst.fixed.size() << " seed=" << seed
           << ": count " << rep.count << " > " << (rep.stated_applies ? str(rep.stated_bound) : str(rep.proof_bound));
        v.expect(false, os.str());
      }
    }
  };
  for (int rank : {1, 2}) {
    const auto g = GrowthGroup::free_abelian(rank);
    for (int n = 1; n <= 6; ++n) {
      for (int r = 0; r <= 2; ++r) run(g, n, r, static_cast<std::uint64_t>(100 * n + r));
    }
  }
  const auto dihedral = GrowthGroup::infinite_dihedral();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (int n = 1; n <= 8; ++n) {
      for (int r = 0; r <= 2; ++r) run(dihedral, n, r, seed);
    }
  }

  const auto z = GrowthGroup::free_abelian(1);
  const GrowthInstance reference{3, 2, {{2, {5}}}};
  const auto count = count_products(reference, z);
  // Independent: 5 + {-2..2} + {-2..2} = {1, ..., 9}.
  std::set<std::int64_t> sums;
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) sums.insert(x + 5 + y);
  }
  v.expect(count == 9 && sums.size() == 9, "reference instance counts " + std::to_string(count));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 120.0, "runtime " + std::to_string(secs) + " s");
  std::ostringstream os;
  os << instances << " instances within bound; Z reference count " << count << "; " << secs << " s";
  v.summary = os.str();
  return v;
}

Verdict first_digit_witness() {
  Verdict v;
  const auto& st = worked().state;
  const auto fd = first_digit_entropy(st, 64);
  require_named(v, "worked", fd.checks, "first-digit-bound");
  require_named(v, "worked", fd.checks, "first-digit-monotone");
  v.expect(fd.rows.size() == 64, "expected 64 windows");

  // Brute force at depth 2: T x = x - 1 mod d_2, first digit x mod d_1, each
  // level of mass 1/d_2. Group levels by their window word.
  const Level d1 = st.system().modulus(1);
  const Level d2 = st.system().moduli().back();
  for (const auto& row : fd.rows) {
    std::map<std::vector<Level>, Level> words;
    for (Level x = 0; x < d2; ++x) {
      std::vector<Level> word;
      for (int j = 0; j < row.n; ++j) word.push_back((((x - j) % d2 + d2) % d2) % d1);
      ++words[word];
    }
    double h = 0;
    for (const auto& [word, count] : words) {
      const double p = static_cast<double>(count) / static_cast<double>(d2);
      h -= p * std::log(p);
    }
    v.expect(words.size() == row.atoms, "atoms at n=" + std::to_string(row.n));
    v.expect(std::abs(h / row.n - row.rate) < 1e-12, "rate at n=" + std::to_string(row.n));
    v.expect(row.rate <= std::log(static_cast<double>(d1 * row.n)) / row.n + 1e-12,
             "bound at n=" + std::to_string(row.n));
  }
  for (std::size_t i = 1; i < fd.rows.size(); ++i) {
    v.expect(fd.rows[i].rate <= fd.rows[i - 1].rate + 1e-12, "rate increases at n=" + std::to_string(fd.rows[i].n));
  }
  const double last = fd.rows.empty() ? 1.0 : fd.rows.back().rate;
  v.expect(last < 0.15, "rate at n=64 is " + std::to_string(last));
  std::ostringstream os;
  os << "H/n: n=1 " << (fd.rows.empty() ? 0.0 : fd.rows.front().rate) << ", n=64 " << last << " < 0.15";
  v.summary = os.str();
  return v;
}

Verdict rate_refinement() {
  Verdict v;
  const int max_n = 8;
  const auto rate = cocycle_entropy_rate(*worked().analysis, max_n);
  require_named(v, "worked", rate.checks, "rate-cocycle-identity");
  const auto pairs = require_named(v, "worked", rate.checks, "rate-refines-join");
  require_named(v, "worked", rate.checks, "rate-join-subadditive");
  v.expect(rate.rows.size() == static_cast<std::size_t>(max_n), "expected rows n = 1.." + std::to_string(max_n));

  std::size_t compared = 0;
  for (int m = 1; m <= max_n; ++m) {
    for (int n = 2; n * m <= max_n; ++n) {
      const auto& rm = rate.rows.at(static_cast<std::size_t>(m - 1));
      const auto& rnm = rate.rows.at(static_cast<std::size_t>(n * m - 1));
      ++compared;
      const std::string label = "n=" + std::to_string(n) + ",m=" + std::to_string(m);
      v.expect(rnm.entropy_lumped / (n * m) <= rm.entropy_lumped / m + kEntropyTol, "rate rises at " + label);
      // T^{nm} is resolved only where every T^m step is.
      v.expect(rnm.defect >= rm.defect, "defect shrinks at " + label);
    }
  }
  v.expect(pairs == compared, "library compared " + std::to_string(pairs) + " pairs, expected " + std::to_string(compared));
  std::ostringstream os;
  os << compared << " pairs; H/n: n=1 " << rate.rows.front().entropy_lumped << ", n=" << max_n << " "
     << rate.rows.back().entropy_lumped / max_n << " (defect " << str(rate.rows.back().defect) << ")";
  v.summary = os.str();
  return v;
}

Verdict determinism() {
  Verdict v;
  std::size_t verified = 0;
  std::vector<RunConfig> configs = {RunConfig::worked_run()};
  RunConfig universal;
  universal.q = "*:inf";
  universal.stages = 3;
  configs.push_back(universal);
  RunConfig strict = universal;
  strict.schedule = "strict";
  strict.stages = 1;
  configs.push_back(strict);
  for (const auto& cfg : configs) {
    const auto first = serialize_artifact(run_construct(cfg));
    const auto second = serialize_artifact(run_construct(cfg));
    v.expect(first == second, cfg.q + ": artifacts differ");
    const auto report = verify_artifact(first);
    v.expect(report.all_pass, cfg.q + ": verify failed");
    for (const char* name : {"verdicts-reproduced", "artifact-bytes"}) {
      v.expect(count_named(report.checks, name) == 1, cfg.q + ": no " + name + " check");
      require_named(v, cfg.q, report.checks, name);
    }
    ++verified;
  }
  v.summary = std::to_string(verified) + " configurations byte-identical and reproduced by verify";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"worked reference run", worked_reference_run},
      {"structural invariants, N <= 3", structural_suite},
      {"measure bounds", measure_bounds},
      {"crude displacement bound", crude_displacement},
      {"entropy ledgers vs majorants", entropy_ledgers},
      {"base-4 remark example", remark_example},
      {"growth bound sweeps", growth_suite},
      {"first-digit entropy-zero witness", first_digit_witness},
      {"cocycle rate refinement", rate_refinement},
      {"determinism and verify", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    std::printf("%s  %2d  %s: %s\n", v.pass() ? "PASS" : "FAIL", index, name.c_str(), v.summary.c_str());
    const std::size_t shown = std::min<std::size_t>(v.failures.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) std::printf("        %s\n", v.failures[i].c_str());
    if (v.failures.size() > shown) std::printf("        ... %zu more\n", v.failures.size() - shown);
    if (!v.pass()) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
