#pragma once

// Parameter schedule: primes p_n, moduli d_n, rung counts a_n and the derived
// quantities w_n, v_n, beta_n, theta_{n,m}, lambda_{n-1}, together with the
// growth inequalities that make both cocycle entropies finite.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oel/checks.hpp"
#include "oel/ladder.hpp"
#include "oel/measure.hpp"
#include "oel/odometer.hpp"

namespace oel {

struct ScheduleMode {
  enum class Kind { strict, relaxed };
  Kind kind = Kind::relaxed;
  // Relaxed mode counts an analytic inequality lhs <= rhs as passing when
  // lhs <= slack * rhs. Strict mode always uses 1.
  double slack = 1.0;

  static ScheduleMode strict() { return {Kind::strict, 1.0}; }
  static ScheduleMode relaxed(double slack = 1.0) { return {Kind::relaxed, slack}; }
  // "strict", "relaxed" or "relaxed:<slack>".
  static ScheduleMode parse(std::string_view text);
  std::string to_string() const;

  bool is_strict() const { return kind == Kind::strict; }
  // Whether the ratio condition w_n/d_n in [1/2, 1] is required at stage n.
  bool enforces_ratio(int n) const { return is_strict() || n >= 3; }
};

// The sequence p_1, p_2, ... in which every prime should recur.
class PrimeSequence {
 public:
  // 2, 2,3, 2,3,5, 2,3,5,7, ...
  static PrimeSequence diagonal();
  static PrimeSequence constant(Prime p);
  // "diagonal" or a single prime such as "2".
  static PrimeSequence parse(std::string_view text);

  Prime at(int n) const;  // 1-based
  std::vector<Prime> prefix(int count) const;
  std::string to_string() const;

 private:
  std::optional<Prime> constant_;
};

// a_n = p_n floor(r / p_n). Throws InfeasibleError when r < p_n.
Level derive_a(int n, Level r, Prime p);

struct ScheduleRow {
  int n = 0;
  Prime p = 0;
  Level d = 0;
  Level a = 0;
  Level w = 0;          // a_1 ... a_n
  Level v = 0;          // w_1 + ... + w_n
  Rational beta;        // (1 + 2(v_{n-1} + p_n w_{n-1})) / d_n
  BigInt lambda_prev;   // 8 w_{n-1}^2 d_{n-1} + 1
};

// Rows for every stage of the state, with w_0 = 1, v_0 = 0, d_0 = 1.
std::vector<ScheduleRow> schedule_rows(const LadderState& state, const PrimeSequence& primes);

// theta_{n,m} = (1 + w_{n-1}) d_{m-1}.
Level theta(const std::vector<ScheduleRow>& rows, int n, int m);

// Analytic inequalities whose ingredients are fixed once stage n exists.
std::vector<Check> stage_inequalities(const std::vector<ScheduleRow>& rows, int n,
                                      const ScheduleMode& mode);
// All stages in order.
std::vector<Check> check_inequalities(const std::vector<ScheduleRow>& rows,
                                      const ScheduleMode& mode);

struct ScheduleConfig {
  int stages = 2;
  ScheduleMode mode;
  PrimeSequence primes = PrimeSequence::diagonal();
  Level min_quotient = 12;  // floor on d_1
  Level depth_cap = 1'000'000;
};

// Greedily multiplies d_{n-1} by factors from the stream until stage n is
// admissible: quotient > 2 (and >= min_quotient when n = 1), r_{n,n} >= p_n in
// a dry run, t_{n-1,n} >= 1, and the stage-n inequalities that the mode
// enforces. Throws CapExceededError past the depth cap and InfeasibleError
// when a finite q runs out of factors.
Level propose_d(int n, FactorStream& stream, const LadderState& state, const ScheduleConfig& config);

// Adds stage n to the state with a_n = derive_a(n, r_{n,n}, p_n).
void extend_with(LadderState& state, Level d, const PrimeSequence& primes);

// Runs propose_d and extend_with for n = 1..config.stages.
LadderState plan_schedule(FactorStream& stream, const ScheduleConfig& config);

}  // namespace oel
