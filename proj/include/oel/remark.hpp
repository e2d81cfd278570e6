#pragma once

// The base-4 odometer Z-action against the Z^2-action by two base-2 odometers,
// identified through Phi((a_n, b_n)_n) = (sigma(a_n, b_n))_n with
// sigma(a, b) = 2a + b. Digits are least significant first.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oel/checks.hpp"
#include "oel/measure.hpp"

namespace oel {

struct Z2 {
  std::int64_t m = 0;  // exponent of T_2 x id
  std::int64_t k = 0;  // exponent of id x T_2
  bool operator==(const Z2&) const = default;
  auto operator<=>(const Z2&) const = default;
};

int sigma(int a, int b);
std::pair<int, int> sigma_inverse(int digit);

std::vector<int> phi(const std::vector<int>& a, const std::vector<int>& b);
std::pair<std::vector<int>, std::vector<int>> phi_inverse(const std::vector<int>& digits);

// Cocycle of the base-4 generator on the atom whose first `carry` digits are 3
// and whose next digit is j < 3. Simulated on every cylinder of the atom at
// depth carry + 1 + extra_digits; throws InvariantError if the value varies.
Z2 cocycle_Z_generator(int carry, int j, int extra_digits = 3);

struct AtomRow {
  int carry = 0;
  int j = 0;
  Z2 value;
  Rational mass;       // 4^{-(carry+1)}
  double entropy = 0;  // -mass ln mass
};

struct QEntropyReport {
  std::vector<AtomRow> atoms;
  double partial = 0;      // atoms with carry < n_max
  double tail = 0;         // exact remainder of the series
  double limit = 0;        // (8/3) ln 2
  double coarse_partial = 0;  // the partition by cocycle value, same atoms
};

// Atoms of carry length 0..n_max-1 (series terms n = 1..n_max).
QEntropyReport entropy_Q(int n_max, int extra_digits = 3);

struct GeneratorRow {
  int carry = 0;            // carry length of the binary coordinate being advanced
  std::int64_t displacement = 0;
  Rational mass;            // 2^{-(carry+1)}
  double entropy = 0;
};

struct GeneratorReport {
  std::string name;  // "u" (T_2 x id) or "v" (id x T_2)
  std::vector<GeneratorRow> rows;
  double partial = 0;
  double tail = 0;
  double limit = 0;  // 2 ln 2
};

// Z-displacements of the two canonical Z^2 generators under Phi, carry
// lengths 0..depth-1, each checked for constancy on its atom.
std::pair<GeneratorReport, GeneratorReport> cocycle_Z2_generators(int depth, int extra_digits = 3);

// kappa(T_4^2, x) = kappa(T_4, T_4 x) + kappa(T_4, x) on every x in Z/4^depth
// whose carry stays inside the window.
Check cocycle_identity_check(int depth);

// Round trip of phi on every depth-`depth` cylinder and cylinder mass agreement.
Check phi_bijection_check(int depth);

}  // namespace oel
