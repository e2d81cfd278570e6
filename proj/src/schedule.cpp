#include "oel/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "oel/errors.hpp"

namespace oel {

// ---------------------------------------------------------------------------
// Modes and prime sequences

ScheduleMode ScheduleMode::parse(std::string_view text) {
  if (text == "strict") return strict();
  if (text == "relaxed") return relaxed();
  constexpr std::string_view prefix = "relaxed:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string value(text.substr(prefix.size()));
    std::size_t used = 0;
    double slack = 0.0;
    try {
      slack = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || !(slack >= 1.0) || !std::isfinite(slack)) {
      throw std::invalid_argument("relaxed slack must be a finite number >= 1, got '" + value + "'");
    }
    return relaxed(slack);
  }
  throw std::invalid_argument("schedule mode must be strict or relaxed[:slack], got '" +
                              std::string(text) + "'");
}

std::string ScheduleMode::to_string() const {
  if (is_strict()) return "strict";
  if (slack == 1.0) return "relaxed";
  return "relaxed:" + format_real(slack);
}

PrimeSequence PrimeSequence::diagonal() { return PrimeSequence{}; }

PrimeSequence PrimeSequence::constant(Prime p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  PrimeSequence s;
  s.constant_ = p;
  return s;
}

PrimeSequence PrimeSequence::parse(std::string_view text) {
  if (text == "diagonal") return diagonal();
  Prime p = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("prime sequence must be 'diagonal' or a prime, got '" +
                                  std::string(text) + "'");
    }
    p = p * 10 + static_cast<Prime>(c - '0');
  }
  return constant(p);
}

Prime PrimeSequence::at(int n) const {
  if (n < 1) throw std::out_of_range("prime sequence is 1-based");
  if (constant_) return *constant_;
  // Block k (k = 1, 2, ...) lists the first k primes.
  std::size_t index = static_cast<std::size_t>(n - 1);
  std::size_t block = 1;
  while (index >= block) {
    index -= block;
    ++block;
  }
  return nth_prime(index);
}

std::vector<Prime> PrimeSequence::prefix(int count) const {
  std::vector<Prime> out;
  for (int n = 1; n <= count; ++n) out.push_back(at(n));
  return out;
}

std::string PrimeSequence::to_string() const {
  return constant_ ? std::to_string(*constant_) : std::string("diagonal");
}

Level derive_a(int n, Level r, Prime p) {
  const auto pl = static_cast<Level>(p);
  if (r < pl) {
    throw InfeasibleError("stage " + std::to_string(n) + ": r = " + std::to_string(r) +
                          " is smaller than p_n = " + std::to_string(p));
  }
  return pl * (r / pl);
}

// ---------------------------------------------------------------------------
// Rows

namespace {

struct Prev {
  Level d = 1;
  Level w = 1;
  Level v = 0;
};

Prev prev_of(const std::vector<ScheduleRow>& rows, int n) {
  if (n <= 1) return {};
  const auto& r = rows.at(static_cast<std::size_t>(n - 2));
  return {r.d, r.w, r.v};
}

const ScheduleRow& row_of(const std::vector<ScheduleRow>& rows, int n) {
  return rows.at(static_cast<std::size_t>(n - 1));
}

// -x ln(x / bound), zero at x = 0.
double spread_term(double x, double bound) { return x > 0.0 ? -x * std::log(x / bound) : 0.0; }

Check analytic(std::string name, int n, double lhs, double rhs, bool strict_less,
               const ScheduleMode& mode, bool enforced) {
  const double threshold = mode.is_strict() ? rhs : mode.slack * rhs;
  const bool pass = strict_less ? lhs < threshold : lhs <= threshold;
  return Check{std::move(name), "n=" + std::to_string(n), format_real(lhs), format_real(rhs), pass,
               CheckKind::analytic, enforced};
}

}  // namespace

std::vector<ScheduleRow> schedule_rows(const LadderState& state, const PrimeSequence& primes) {
  std::vector<ScheduleRow> rows;
  Level w_prev = 1;
  Level v_prev = 0;
  Level d_prev = 1;
  for (int n = 1; n <= state.depth() && n <= static_cast<int>(state.a_values().size()); ++n) {
    ScheduleRow row;
    row.n = n;
    row.p = primes.at(n);
    row.d = state.system().modulus(n);
    row.a = state.a(n);
    row.w = w_prev * row.a;
    row.v = v_prev + row.w;
    row.beta = Rational(1 + 2 * (BigInt(v_prev) + BigInt(row.p) * w_prev), BigInt(row.d));
    row.lambda_prev = 8 * BigInt(w_prev) * w_prev * d_prev + 1;
    rows.push_back(row);
    w_prev = row.w;
    v_prev = row.v;
    d_prev = row.d;
  }
  return rows;
}

Level theta(const std::vector<ScheduleRow>& rows, int n, int m) {
  if (n < 1 || m < n) throw std::invalid_argument("theta needs 1 <= n <= m");
  const Level w_prev = prev_of(rows, n).w;
  const Level d_prev = m == 1 ? 1 : row_of(rows, m - 1).d;
  return (1 + w_prev) * d_prev;
}

std::vector<Check> stage_inequalities(const std::vector<ScheduleRow>& rows, int n,
                                      const ScheduleMode& mode) {
  std::vector<Check> out;
  const auto& row = row_of(rows, n);
  const Prev prev = prev_of(rows, n);
  const bool enforce = mode.is_strict();
  const double d = static_cast<double>(row.d);
  const double w = static_cast<double>(row.w);

  // Per-term majorant for the summability of beta_n ln(9 w_n^2 d_n / beta_n).
  {
    const double beta = to_double(row.beta);
    const double lhs = beta * std::log(9.0 * w * w * d / beta);
    out.push_back(analytic("finitesum", n, lhs, std::ldexp(1.0, -n), false, mode, enforce));
  }
  // The diagonal term of the next stage depends only on w_n and d_n.
  {
    const double th = (1.0 + w) * d;
    const double lhs = std::log(w * th) / w;
    out.push_back(analytic("E-n", n + 1, lhs, std::ldexp(1.0, -(n + 3)), true, mode, enforce));
  }
  if (n >= 2) {
    const double x = (static_cast<double>(prev.v) + static_cast<double>(row.p) * static_cast<double>(prev.w)) / d;
    const double th = (1.0 + static_cast<double>(prev.w)) * d;
    out.push_back(analytic("E-n2", n, spread_term(x, th), std::ldexp(1.0, -(n + 2)), true, mode,
                           enforce));
  }
  // Terms of the tail sum with d_{m-1} = d_n, i.e. m = n + 1 >= 4.
  if (n + 1 >= 4) {
    const int m = n + 1;
    for (int p = 1; p <= m - 2; ++p) {
      const auto& rp = row_of(rows, p);
      const double y = static_cast<double>(rp.v) / d;
      const double th = static_cast<double>(theta(rows, p, m));
      auto c = analytic("E-msum", m, spread_term(y, th), std::ldexp(1.0, -(m + 1)), true, mode,
                        enforce);
      c.stage += ",p=" + std::to_string(p);
      out.push_back(std::move(c));
    }
  }
  if (n >= 2) {
    const double a1 = static_cast<double>(row_of(rows, 1).a);
    const double lhs = -(a1 / d) * std::log(a1 / (d * d));
    out.push_back(analytic("E-n1", n, lhs, std::ldexp(1.0, -n), false, mode, enforce));
  }
  {
    const bool pass = 2 * row.w >= row.d && row.w <= row.d;
    out.push_back(Check{"ratio", "n=" + std::to_string(n), to_string(Rational(row.w, row.d)),
                        "[1/2,1]", pass, CheckKind::analytic, mode.enforces_ratio(n)});
  }
  return out;
}

std::vector<Check> check_inequalities(const std::vector<ScheduleRow>& rows,
                                      const ScheduleMode& mode) {
  std::vector<Check> out;
  for (int n = 1; n <= static_cast<int>(rows.size()); ++n) {
    auto part = stage_inequalities(rows, n, mode);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selection of d_n

void extend_with(LadderState& state, Level d, const PrimeSequence& primes) {
  const int n = state.depth() + 1;
  extend_depth(state, d, [&](Level r) { return derive_a(n, r, primes.at(n)); });
}

Level propose_d(int n, FactorStream& stream, const LadderState& state,
                const ScheduleConfig& config) {
  if (state.depth() != n - 1) throw std::invalid_argument("propose_d: state is not at depth n-1");
  const Level d_prev = state.system().modulus(n - 1);
  Level d = d_prev;
  std::string last_reason = "no factor taken yet";
  for (;;) {
    const auto factor = stream.next();
    if (!factor) {
      throw InfeasibleError("factor stream exhausted while choosing d_" + std::to_string(n) +
                            " (" + last_reason + ")");
    }
    if (static_cast<Level>(*factor) > config.depth_cap / d) {
      throw CapExceededError("d_" + std::to_string(n) + " would exceed the depth cap " +
                             std::to_string(config.depth_cap) + " (" + last_reason + ")");
    }
    d *= static_cast<Level>(*factor);
    const Level quotient = d / d_prev;
    if (quotient <= 2) {
      last_reason = "quotient " + std::to_string(quotient) + " is not greater than 2";
      continue;
    }
    if (n == 1 && quotient < config.min_quotient) {
      last_reason = "below the minimum quotient " + std::to_string(config.min_quotient);
      continue;
    }
    LadderState trial = state;
    try {
      extend_with(trial, d, config.primes);
    } catch (const InfeasibleError& e) {
      last_reason = e.what();
      continue;
    }
    if (n >= 2 && trial.stage(n - 1, n).empty_stage()) {
      last_reason = "stage (" + std::to_string(n - 1) + "," + std::to_string(n) + ") is empty";
      continue;
    }
    const auto rows = schedule_rows(trial, config.primes);
    bool admissible = true;
    for (const auto& c : stage_inequalities(rows, n, config.mode)) {
      if (c.enforced && !c.pass) {
        admissible = false;
        last_reason = c.name + " fails at " + c.stage;
        break;
      }
    }
    if (admissible) return d;
  }
}

LadderState plan_schedule(FactorStream& stream, const ScheduleConfig& config) {
  LadderState state;
  for (int n = 1; n <= config.stages; ++n) {
    const Level d = propose_d(n, stream, state, config);
    extend_with(state, d, config.primes);
  }
  return state;
}

}  // namespace oel
