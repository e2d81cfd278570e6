#pragma once

// Supernatural numbers, their factor enumerations, and the q-odometer as a
// tower of finite cyclic truncations Z/d_m.
//
// Orientation: level i of the B_m tower is T^{-i} B_m, so T sends level i to
// level i-1 (mod d_m). Because T^{d_m} B_m = B_m this is exact on level sets,
// not an approximation.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oel/measure.hpp"

namespace oel {

using Prime = std::uint64_t;

bool is_prime(std::uint64_t n);
// The k-th prime, 0-based (nth_prime(0) == 2).
Prime nth_prime(std::size_t k);
// Prime factors with multiplicity, ascending.
std::vector<Prime> factorize(std::uint64_t n);

class SupernaturalNumber {
 public:
  // nullopt encodes an infinite exponent.
  using Exponent = std::optional<std::uint64_t>;

  SupernaturalNumber() = default;

  // "2:inf,3:inf,5:4". A "*:inf" entry gives every unlisted prime an infinite
  // exponent (the universal odometer is "*:inf"); "*:0" is the implicit default.
  static SupernaturalNumber parse(std::string_view text);

  Exponent exponent(Prime p) const;
  bool default_infinite() const { return default_infinite_; }
  const std::map<Prime, Exponent>& explicit_exponents() const { return exponents_; }

  // Infinitely many prime factors counted with multiplicity.
  bool has_infinitely_many_factors() const;

  std::string to_string() const;

 private:
  std::map<Prime, Exponent> exponents_;
  bool default_infinite_ = false;
};

struct EnumerationPolicy {
  // Factors emitted first, in this order; each must be available in q.
  std::vector<Prime> prefix;
  // Reject q with finitely many factors (required by the construction).
  bool require_infinite = true;
};

// Deterministic enumeration of the prime-factor multiset of q.
//
// After the prefix: every finite exponent is emitted first, primes ascending,
// each repeated by its remaining multiplicity; then rounds over the primes of
// infinite exponent. With "*:inf" round k covers the first k primes, which
// gives the diagonal 2, 2,3, 2,3,5, ...
class FactorStream {
 public:
  FactorStream(SupernaturalNumber q, EnumerationPolicy policy = {});

  // nullopt once a finite q is exhausted.
  std::optional<Prime> next();

  const SupernaturalNumber& source() const { return q_; }
  const std::map<Prime, std::uint64_t>& consumed() const { return consumed_; }
  std::size_t consumed_count() const { return consumed_count_; }

 private:
  bool available(Prime p) const;
  std::optional<Prime> next_unprefixed();
  void refill_round();

  SupernaturalNumber q_;
  std::vector<Prime> prefix_;
  std::size_t prefix_pos_ = 0;
  std::vector<Prime> finite_queue_;
  std::size_t finite_pos_ = 0;
  std::vector<Prime> round_;
  std::size_t round_pos_ = 0;
  std::size_t round_index_ = 0;
  std::map<Prime, std::uint64_t> consumed_;
  std::size_t consumed_count_ = 0;
};

FactorStream make_stream(const SupernaturalNumber& q, const EnumerationPolicy& policy = {});

// Moduli 1 = d_0 < d_1 < ... < d_M with every quotient an integer > 2.
class OdometerSystem {
 public:
  OdometerSystem() : moduli_{1} {}
  explicit OdometerSystem(std::vector<Level> moduli);

  int depth() const { return static_cast<int>(moduli_.size()) - 1; }
  Level modulus(int m) const;
  Level quotient(int n) const;  // d_n / d_{n-1}, n >= 1
  const std::vector<Level>& moduli() const { return moduli_; }
  std::vector<Level> radices() const;

  void push(Level next_modulus);

  // Full level set {0, ..., d_m - 1}; level 0 is the base B_m.
  LevelSet tower_levels(int m) const;
  LevelSet lift(const LevelSet& s, int target_depth) const;

  // Mixed-radix digits of a depth-M index, least significant first.
  std::vector<Level> digits(Level index) const;
  Level from_digits(const std::vector<Level>& digits) const;

 private:
  std::vector<Level> moduli_;
};

// Level k at depth m becomes {k + j d_m : 0 <= j < target/d_m}.
LevelSet lift(const LevelSet& s, int target_depth, Level target_modulus);

// Restriction of a union of lifted levels back to a shallower depth. Throws
// std::invalid_argument if s is not a union of whole fibres.
LevelSet project(const LevelSet& s, int target_depth, Level target_modulus);

// T^k on level sets: level i goes to (i - k) mod d.
LevelSet apply_T(const LevelSet& s, std::int64_t power);

}  // namespace oel
