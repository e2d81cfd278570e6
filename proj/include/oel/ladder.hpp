#pragma once

// The doubly recursive ladder construction.
//
// For n <= m the stage (n, m) enumerates the B_m-tower levels of a set W_{n,m}
// as s(n,m,0) < ... < s(n,m,r) and cuts t blocks of a_n consecutive indices
// into sub-ladders. Rung i of sub-ladder j is the single level s(n,m,a_n j + i);
// on it S_{n,m} = T^{-(s(next) - s(this))}.
//
// Stage (1,1) is stored with W_{1,1} = X (all d_1 levels) so that every stage
// follows the same "r + 1 levels, a_n t used, at least one left over" shape.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oel/checks.hpp"
#include "oel/measure.hpp"
#include "oel/odometer.hpp"

namespace oel {

struct LadderStage {
  int n = 0;
  int m = 0;
  Level modulus = 1;      // d_m
  Level a = 0;            // a_n, rungs per sub-ladder
  std::vector<Level> s;   // levels of W_{n,m}, strictly increasing
  Level t = 0;            // number of sub-ladders; 0 marks an empty stage

  Level r() const { return static_cast<Level>(s.size()) - 1; }
  bool empty_stage() const { return t == 0; }

  Level rung_level(Level j, Level i) const { return s[static_cast<std::size_t>(a * j + i)]; }
  // Displacement of S_{n,m} on rung i of sub-ladder j (i <= a - 2).
  Level step(Level j, Level i) const { return rung_level(j, i + 1) - rung_level(j, i); }

  LevelSet rung(Level i) const;     // C_{n,m,i} = union over sub-ladders
  LevelSet all_rungs() const;       // union of every C_{n,m,i}
  LevelSet w_set() const;           // W_{n,m}
  LevelSet leftovers() const;       // W minus the rungs
  std::vector<Level> spreads() const;
};

// Everything the construction has committed to so far.
class LadderState {
 public:
  LadderState() = default;

  const OdometerSystem& system() const { return system_; }
  int depth() const { return system_.depth(); }

  // a_n, 1-based; defined once stage (n,n) exists.
  Level a(int n) const { return a_.at(static_cast<std::size_t>(n - 1)); }
  const std::vector<Level>& a_values() const { return a_; }

  bool has_stage(int n, int m) const { return stages_.count({n, m}) != 0; }
  const LadderStage& stage(int n, int m) const;
  const std::map<std::pair<int, int>, LadderStage>& stages() const { return stages_; }

  // Deepen the system by one modulus; stages at the new depth come after.
  void push_modulus(Level d);
  void add_stage(LadderStage stage);

 private:
  OdometerSystem system_;
  std::vector<Level> a_;
  std::map<std::pair<int, int>, LadderStage> stages_;
};

// W_{n,m} as a level set at depth m, from the stages already in the state.
LevelSet compute_W(int n, int m, const LadderState& state);

// Case I: rungs are levels 0..a_1-1 of the B_1 tower, S_{1,1} = T^{-1}.
LadderStage build_case_I(Level d1, Level a1);

// Case II: a single ladder on the first a_n levels of W_{n,n}.
// Throws InfeasibleError if W_{n,n} has fewer than a_n + 1 levels.
LadderStage build_case_II(int n, const LadderState& state, Level a_n);

// Case III: t = floor(r / a_n) sub-ladders on consecutive blocks of W_{n,m};
// t = 0 (empty stage) when a_n > r.
LadderStage build_case_III(int n, int m, const LadderState& state);

// Extends the state to a new depth d_n = d, building stages (1,n),...,(n-1,n)
// and then (n,n) with a_n chosen by `choose_a` from r_{n,n}.
template <class ChooseA>
void extend_depth(LadderState& state, Level d, ChooseA&& choose_a);

// Properties (i) and (ii), disjointness, spreads, (E-q) and W re-enumeration.
// Failures carry the offending (n, m[, i]) in Check::stage.
std::vector<Check> verify_recursion_invariants(const LadderState& state);

// ---------------------------------------------------------------------------

template <class ChooseA>
void extend_depth(LadderState& state, Level d, ChooseA&& choose_a) {
  state.push_modulus(d);
  const int n = state.depth();
  if (n == 1) {
    const Level a1 = choose_a(d - 1);
    state.add_stage(build_case_I(d, a1));
    return;
  }
  for (int k = 1; k < n; ++k) state.add_stage(build_case_III(k, n, state));
  const auto w = compute_W(n, n, state);
  const Level a_n = choose_a(static_cast<Level>(w.size()) - 1);
  state.add_stage(build_case_II(n, state, a_n));
}

}  // namespace oel
