#pragma once

// Counting products b_1 ... b_n in a virtually abelian group where factors in
// Omega_0 are fixed and the rest range over the word ball B(r), against the
// polynomial bound |E|^{|Omega_0|} c_2 (rn)^k.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oel/measure.hpp"

namespace oel {

// Normal forms. Z^d: the exponent vector. Infinite dihedral: (a, eps) for t^a s^eps.
using GroupElement = std::vector<std::int64_t>;

class GrowthGroup {
 public:
  enum class Kind { free_abelian, infinite_dihedral };

  static GrowthGroup free_abelian(int rank);
  static GrowthGroup infinite_dihedral();
  // "z", "z^2", "z^3", "dihedral".
  static GrowthGroup parse(const std::string& text);

  Kind kind() const { return kind_; }
  std::string name() const;
  int rank() const { return rank_; }

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& x, const GroupElement& y) const;
  GroupElement inverse(const GroupElement& x) const;
  // Closed-form word length with respect to generators().
  std::int64_t word_length(const GroupElement& x) const;

  // Symmetric generating set S u F.
  const std::vector<GroupElement>& generators() const { return generators_; }
  // Coset representatives of the abelian normal subgroup A.
  const std::vector<GroupElement>& coset_representatives() const { return cosets_; }
  // Elements whose conjugation realises the automorphisms of A.
  const std::vector<GroupElement>& conjugators() const { return conjugators_; }

  // B(radius) by breadth-first search, sorted.
  std::vector<GroupElement> ball(int radius) const;
  // |B(m)| for m = 0..horizon.
  std::vector<std::size_t> ball_sizes(int horizon) const;

  struct Constants {
    std::size_t E_size = 0;
    double c1 = 0;      // ln |E|
    int d = 0;          // K in B(d)
    int k = 0;          // growth order
    Rational C;         // max over 1 <= m <= horizon of |B(m)| / m^k
    Rational c2;        // C (3d)^k
    int horizon = 0;
  };
  // Computed from the group data; C is verified up to `horizon`.
  Constants constants(int horizon = 24) const;

  // Horizon on word length for fixed factors.
  static constexpr std::int64_t kElementHorizon = 1 << 20;

 private:
  Kind kind_ = Kind::free_abelian;
  int rank_ = 1;
  int growth_order_ = 1;
  std::vector<GroupElement> generators_;
  std::vector<GroupElement> cosets_;
  std::vector<GroupElement> conjugators_;
};

struct GrowthInstance {
  int n = 0;
  int r = 0;
  std::map<int, GroupElement> fixed;  // index in 1..n -> b_i; keys form Omega_0
};

// Distinct products, exhaustive over B(r) for free indices. Throws
// std::invalid_argument on out-of-range indices, wrong element shapes, or a
// fixed factor beyond the element horizon.
std::size_t count_products(const GrowthInstance& instance, const GrowthGroup& group);

struct GrowthReport {
  std::size_t count = 0;
  GrowthGroup::Constants constants;
  std::size_t omega0 = 0;
  Rational stated_bound;  // |E|^{|Omega_0|} c_2 (rn)^k
  Rational proof_bound;   // |E|^{|Omega_0|} C (((r+1)d + 1) n)^k
  bool stated_applies = true;  // false when r = 0 (rn = 0)
  bool pass = false;
};

GrowthReport check_bound(const GrowthInstance& instance, const GrowthGroup& group);
// Same, reusing constants computed once for a sweep.
GrowthReport check_bound(const GrowthInstance& instance, const GrowthGroup& group,
                         const GrowthGroup::Constants& constants);

// Every Omega_0 pattern on {1..n}; fixed factors drawn uniformly from
// B(fixed_radius) with a generator seeded by `seed`.
std::vector<GrowthInstance> sweep_instances(const GrowthGroup& group, int n, int r, std::uint64_t seed,
                                            int fixed_radius = 5);

// Parses "2=5,4=-1" (Z) or "2=(1,0),3=(3,1)" style lists into fixed factors.
std::map<int, GroupElement> parse_omega0(const std::string& text, const GrowthGroup& group);

}  // namespace oel
