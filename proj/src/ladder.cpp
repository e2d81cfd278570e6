#include "oel/ladder.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "oel/errors.hpp"

namespace oel {

namespace {

std::string stage_label(int n, int m) {
  return "n=" + std::to_string(n) + ",m=" + std::to_string(m);
}

std::string stage_label(int n, int m, Level i) {
  return stage_label(n, m) + ",i=" + std::to_string(i);
}

Check make_check(std::string name, std::string stage, std::string lhs, std::string rhs,
                 bool pass) {
  return Check{std::move(name), std::move(stage), std::move(lhs), std::move(rhs), pass,
               CheckKind::structural, true};
}

}  // namespace

// ---------------------------------------------------------------------------
// LadderStage

LevelSet LadderStage::rung(Level i) const {
  std::vector<Level> out;
  out.reserve(static_cast<std::size_t>(t));
  for (Level j = 0; j < t; ++j) out.push_back(rung_level(j, i));
  return LevelSet(m, modulus, std::move(out));
}

LevelSet LadderStage::all_rungs() const {
  const auto used = static_cast<std::size_t>(a * t);
  return LevelSet(m, modulus, std::vector<Level>(s.begin(), s.begin() + static_cast<long>(used)));
}

LevelSet LadderStage::w_set() const { return LevelSet(m, modulus, s); }

LevelSet LadderStage::leftovers() const {
  const auto used = static_cast<long>(a * t);
  return LevelSet(m, modulus, std::vector<Level>(s.begin() + used, s.end()));
}

std::vector<Level> LadderStage::spreads() const {
  std::vector<Level> out;
  for (Level j = 0; j < t; ++j) {
    Level spread = 0;
    for (Level i = 0; i + 1 < a; ++i) spread = std::max(spread, step(j, i));
    out.push_back(spread);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LadderState

const LadderStage& LadderState::stage(int n, int m) const {
  auto it = stages_.find({n, m});
  if (it == stages_.end()) {
    throw std::out_of_range("stage (" + std::to_string(n) + "," + std::to_string(m) +
                            ") not built");
  }
  return it->second;
}

void LadderState::push_modulus(Level d) { system_.push(d); }

void LadderState::add_stage(LadderStage stage) {
  if (stage.n < 1 || stage.n > stage.m || stage.m > depth()) {
    throw std::invalid_argument("add_stage: stage (" + std::to_string(stage.n) + "," +
                                std::to_string(stage.m) + ") outside the current depth");
  }
  if (stage.modulus != system_.modulus(stage.m)) {
    throw std::invalid_argument("add_stage: stage modulus does not match d_m");
  }
  if (stage.n == stage.m) {
    if (static_cast<int>(a_.size()) != stage.n - 1) {
      throw std::invalid_argument("add_stage: diagonal stages must arrive in order");
    }
    a_.push_back(stage.a);
  } else if (static_cast<int>(a_.size()) < stage.n || a_[static_cast<std::size_t>(stage.n - 1)] != stage.a) {
    throw std::invalid_argument("add_stage: rung count disagrees with a_n");
  }
  const auto key = std::make_pair(stage.n, stage.m);
  stages_[key] = std::move(stage);
}

// ---------------------------------------------------------------------------
// Construction

namespace {

// Union over l in [lo, hi] of rung-0 (or all rungs) of stages (k, l), lifted to depth m.
LevelSet lifted_union(const LadderState& state, int k, int lo, int hi, int m, bool base_only) {
  const auto& sys = state.system();
  std::vector<Level> members;
  for (int l = lo; l <= hi; ++l) {
    if (!state.has_stage(k, l)) continue;
    const auto& st = state.stage(k, l);
    const LevelSet part = base_only ? st.rung(0) : st.all_rungs();
    const auto lifted = sys.lift(part, m);
    members.insert(members.end(), lifted.members().begin(), lifted.members().end());
  }
  return LevelSet(m, sys.modulus(m), std::move(members));
}

}  // namespace

LevelSet compute_W(int n, int m, const LadderState& state) {
  const auto& sys = state.system();
  if (n < 1 || m < n || m > sys.depth()) {
    throw std::invalid_argument("compute_W: bad stage indices");
  }
  if (n == 1 && m == 1) return sys.tower_levels(1);
  if (n == 1) {
    const auto used = lifted_union(state, 1, 1, m - 1, m, false);
    return used.complement();
  }
  if (m == n) return lifted_union(state, n - 1, n - 1, n, m, true);
  const auto bases = lifted_union(state, n - 1, n - 1, m, m, true);
  const auto used = lifted_union(state, n, n, m - 1, m, false);
  return set_difference(bases, used);
}

LadderStage build_case_I(Level d1, Level a1) {
  if (a1 < 2 || a1 > d1 - 1) {
    throw InfeasibleError("case I: a_1 = " + std::to_string(a1) + " outside [2, d_1 - 1 = " +
                          std::to_string(d1 - 1) + "]");
  }
  LadderStage st;
  st.n = 1;
  st.m = 1;
  st.modulus = d1;
  st.a = a1;
  st.s.resize(static_cast<std::size_t>(d1));
  for (Level i = 0; i < d1; ++i) st.s[static_cast<std::size_t>(i)] = i;
  st.t = 1;
  return st;
}

LadderStage build_case_II(int n, const LadderState& state, Level a_n) {
  if (n < 2) throw std::invalid_argument("case II needs n > 1");
  LadderStage st;
  st.n = n;
  st.m = n;
  st.modulus = state.system().modulus(n);
  st.a = a_n;
  st.s = compute_W(n, n, state).members();
  if (a_n < 2 || a_n > st.r()) {
    throw InfeasibleError("case II at n=" + std::to_string(n) + ": W has " +
                          std::to_string(st.s.size()) + " levels, cannot hold " +
                          std::to_string(a_n) + " rungs plus a leftover");
  }
  st.t = 1;
  return st;
}

LadderStage build_case_III(int n, int m, const LadderState& state) {
  if (m <= n) throw std::invalid_argument("case III needs m > n");
  LadderStage st;
  st.n = n;
  st.m = m;
  st.modulus = state.system().modulus(m);
  st.a = state.a(n);
  st.s = compute_W(n, m, state).members();
  st.t = st.r() >= st.a ? st.r() / st.a : 0;
  return st;
}

// ---------------------------------------------------------------------------
// Verification

std::vector<Check> verify_recursion_invariants(const LadderState& state) {
  std::vector<Check> out;
  const auto& sys = state.system();
  const int depth = sys.depth();

  for (const auto& [key, st] : state.stages()) {
    const auto [n, m] = key;
    const auto label = stage_label(n, m);

    bool increasing = true;
    for (std::size_t k = 0; k < st.s.size(); ++k) {
      if (st.s[k] < 0 || st.s[k] >= st.modulus || (k > 0 && st.s[k] <= st.s[k - 1])) {
        increasing = false;
        out.push_back(make_check("rung-levels-increasing", stage_label(n, m, static_cast<Level>(k)),
                                 std::to_string(st.s[k]), "strictly increasing in [0,d_m)", false));
        break;
      }
    }
    if (increasing) {
      out.push_back(make_check("rung-levels-increasing", label, std::to_string(st.s.size()),
                               "levels", true));
    }

    // Re-derive W from the earlier stages and compare with the stored enumeration.
    const auto w = compute_W(n, m, state);
    out.push_back(make_check("W-enumeration", label, std::to_string(st.s.size()),
                             std::to_string(w.size()), w.members() == st.s));

    const Level r = st.r();
    const Level used = st.a * st.t;
    if (n == m) {
      out.push_back(make_check("E-q", label, std::to_string(st.a), std::to_string(r),
                               st.t == 1 && st.a <= r));
    } else {
      out.push_back(make_check("E-q", label, std::to_string(used), std::to_string(r), used <= r));
      out.push_back(make_check("t-maximal", label, std::to_string(st.a * (st.t + 1)),
                               std::to_string(r), st.a * (st.t + 1) > r));
    }
    out.push_back(make_check("leftover", label, std::to_string(r + 1 - used), "1",
                             r + 1 - used >= 1));

    if (m > n && increasing) {
      const Level bound = sys.modulus(m - 1);
      const auto spreads = st.spreads();
      for (std::size_t j = 0; j < spreads.size(); ++j) {
        out.push_back(make_check("spread", label + ",j=" + std::to_string(j),
                                 std::to_string(spreads[j]), std::to_string(bound),
                                 spreads[j] <= bound));
      }
    }

    if (n > 1 && increasing) {
      const auto bases = lifted_union(state, n - 1, n - 1, m, m, true);
      out.push_back(make_check("prop-ii", label, std::to_string(used), std::to_string(bases.size()),
                               is_subset(st.all_rungs(), bases)));
    }

    // Property (i): rungs of (n, l) for n <= l <= m are whole B_m levels.
    if (increasing) {
      bool whole = true;
      for (int l = n; l <= m; ++l) {
        if (!state.has_stage(n, l)) continue;
        const auto rungs = state.stage(n, l).all_rungs();
        try {
          whole = whole && project(sys.lift(rungs, m), l, sys.modulus(l)) == rungs;
        } catch (const std::invalid_argument&) {
          whole = false;
        }
      }
      out.push_back(make_check("prop-i", label, whole ? "whole levels" : "split level",
                               "whole levels", whole));
    }
  }

  // Rungs of the ladders L_{n,m}, m >= n, are pairwise disjoint for fixed n.
  if (depth >= 1) {
    const Level d_top = sys.modulus(depth);
    for (int n = 1; n <= depth; ++n) {
      std::vector<int> owner(static_cast<std::size_t>(d_top), 0);
      bool ok = true;
      for (int m = n; m <= depth && ok; ++m) {
        if (!state.has_stage(n, m)) continue;
        const auto& st = state.stage(n, m);
        const Level copies = d_top / st.modulus;
        for (Level j = 0; j < st.t && ok; ++j) {
          for (Level i = 0; i < st.a && ok; ++i) {
            const Level base = st.rung_level(j, i);
            if (base < 0 || base >= st.modulus) continue;
            for (Level c = 0; c < copies; ++c) {
              auto& o = owner[static_cast<std::size_t>(base + c * st.modulus)];
              if (o != 0) {
                out.push_back(make_check("ladder-disjoint", stage_label(n, m, i),
                                         "level " + std::to_string(base), "unused by other rungs",
                                         false));
                ok = false;
                break;
              }
              o = m;
            }
          }
        }
      }
      if (ok) {
        out.push_back(make_check("ladder-disjoint", "n=" + std::to_string(n), "disjoint",
                                 "disjoint", true));
      }
    }
  }
  return out;
}

}  // namespace oel
