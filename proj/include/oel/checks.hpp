#pragma once

#include <string>
#include <vector>

namespace oel {

enum class CheckKind {
  structural,  // holds for every feasible schedule; failure means a bug or corrupt data
  analytic,    // a growth inequality that only large enough d_n satisfy
};

// One verified inequality or identity. lhs/rhs are display strings: exact
// rationals as "p/q", reals with 17 significant digits.
struct Check {
  std::string name;
  std::string stage;
  std::string lhs;
  std::string rhs;
  bool pass = false;
  CheckKind kind = CheckKind::structural;
  // An analytic check that the active schedule mode requires to hold.
  bool enforced = true;
};

std::string format_real(double x);

inline bool all_enforced_pass(const std::vector<Check>& checks, CheckKind kind) {
  for (const auto& c : checks) {
    if (c.kind == kind && c.enforced && !c.pass) return false;
  }
  return true;
}

}  // namespace oel
