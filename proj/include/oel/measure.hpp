#pragma once

// Exact measure arithmetic on finite truncations of an odometer.
//
// A LevelSet at depth m is a set of levels of the B_m tower. Level i stands
// for T^{-i} B_m and carries mass 1/d_m, so every measure in this library is a
// rational whose denominator divides some d_m. Logarithms only enter when an
// entropy is evaluated; all entropies are in nats.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oel {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using MeasureValue = Rational;

using Level = std::int64_t;

// "p/q" in lowest terms; integers are written with denominator 1.
std::string to_string(const Rational& r);
Rational parse_rational(std::string_view text);
double to_double(const Rational& r);

// Neumaier-compensated accumulator for sums of entropy terms.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// -p ln p with the convention 0 ln 0 = 0.
double entropy_term(double p);
double entropy_term(const Rational& p);

// Shannon entropy of a finite collection of masses (zero masses skipped).
double entropy_of_masses(std::span<const Rational> masses);
// Same, for masses count_i / denominator.
double entropy_of_counts(std::span<const std::int64_t> counts, std::int64_t denominator);

class LevelSet {
 public:
  LevelSet() = default;
  // Members may arrive unsorted and with duplicates; out-of-range members throw.
  LevelSet(int depth, Level modulus, std::vector<Level> members);

  static LevelSet full(int depth, Level modulus);
  static LevelSet empty(int depth, Level modulus);
  static LevelSet interval(int depth, Level modulus, Level first, Level last_exclusive);

  int depth() const { return depth_; }
  Level modulus() const { return modulus_; }
  const std::vector<Level>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool is_empty() const { return members_.empty(); }
  bool contains(Level level) const;

  MeasureValue measure() const;

  LevelSet complement() const;

  friend LevelSet set_union(const LevelSet& a, const LevelSet& b);
  friend LevelSet set_intersection(const LevelSet& a, const LevelSet& b);
  friend LevelSet set_difference(const LevelSet& a, const LevelSet& b);
  friend bool is_subset(const LevelSet& a, const LevelSet& b);
  friend bool is_disjoint(const LevelSet& a, const LevelSet& b);

  bool operator==(const LevelSet&) const = default;

 private:
  static LevelSet unchecked(int depth, Level modulus, std::vector<Level> sorted_members);
  void require_compatible(const LevelSet& other) const;

  int depth_ = 0;
  Level modulus_ = 1;
  std::vector<Level> members_;
};

// A finite disjoint collection of labelled level sets at a common depth.
// The union need not be everything; zero-mass cells are dropped on insert.
class LabeledPartition {
 public:
  using Cell = std::pair<std::string, LevelSet>;

  LabeledPartition(int depth, Level modulus);

  // Throws std::invalid_argument if the cell overlaps an existing one.
  void add(std::string label, LevelSet cell);

  int depth() const { return depth_; }
  Level modulus() const { return modulus_; }
  const std::vector<Cell>& cells() const { return cells_; }
  LevelSet support() const;

 private:
  int depth_;
  Level modulus_;
  std::vector<Cell> cells_;
};

double shannon_entropy(const LabeledPartition& p);

// H(p|q). Throws std::invalid_argument if q does not cover the support of p.
double conditional_entropy(const LabeledPartition& p, const LabeledPartition& q);

// Nonempty pairwise intersections, labelled "a|b".
LabeledPartition join(const LabeledPartition& p, const LabeledPartition& q);

struct CoverBound {
  double entropy = 0.0;    // H(p)
  double cover_sum = 0.0;  // sum_i H(p restricted to B_i)
  bool holds = false;      // entropy <= cover_sum (1e-12 slack for rounding)
};

// Subadditivity of entropy over a cover. Throws std::invalid_argument if the
// cover does not contain the support of p.
CoverBound cover_entropy_bound(const LabeledPartition& p, const std::vector<LevelSet>& cover);

}  // namespace oel
