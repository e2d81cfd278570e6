#pragma once

// The transformation S assembled from the ladders, the regions D_{n,m},
// E_{n,m}, K_n, both cocycle partitions, and every bound the construction
// promises for them.
//
// Everything is evaluated at the deepest built level M, where each set the
// construction touches is an exact union of B_M levels. S is stored as a
// displacement table: S = T^k on level x, so the image level is x - k.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oel/checks.hpp"
#include "oel/ladder.hpp"
#include "oel/measure.hpp"
#include "oel/schedule.hpp"

namespace oel {

inline constexpr Level kUndefined = std::numeric_limits<Level>::min();

using StageKey = std::pair<int, int>;

// Depth-M view of the ladder families L_n = union over m of L_{n,m}.
class LadderMaps {
 public:
  LadderMaps() = default;
  explicit LadderMaps(const LadderState& state);

  int families() const { return static_cast<int>(families_.size()); }
  int depth() const { return depth_; }
  Level modulus() const { return modulus_; }
  Level a(int n) const { return a_.at(static_cast<std::size_t>(n - 1)); }

  // Rung index of x in L_n, or -1.
  int rung(int n, Level x) const;
  // m of the ladder L_{n,m} through x, or 0.
  int stage(int n, Level x) const;
  // S_n x; kUndefined on top rungs and off L_n.
  Level next(int n, Level x) const;
  // Rung 0 and rung a_n - 1 of the sub-ladder through x; kUndefined off L_n.
  Level bottom(int n, Level x) const;
  Level top(int n, Level x) const;

 private:
  struct Family {
    std::vector<std::int32_t> rung;
    std::vector<std::int16_t> stage;
    std::vector<std::int32_t> step;         // next rung minus this one
    std::vector<std::int32_t> above_bottom;  // this rung minus rung 0
    std::vector<std::int32_t> span;          // rung a-1 minus rung 0
  };
  const Family& family(int n) const { return families_.at(static_cast<std::size_t>(n - 1)); }

  int depth_ = 0;
  Level modulus_ = 1;
  std::vector<Level> a_;
  std::vector<Family> families_;
};

class PiecewiseShift {
 public:
  struct Run {
    Level start = 0;
    Level length = 0;
    Level k = 0;
    bool operator==(const Run&) const = default;
  };

  PiecewiseShift() = default;
  PiecewiseShift(int depth, Level modulus);

  int depth() const { return depth_; }
  Level modulus() const { return modulus_; }

  // Throws InvariantError if x already carries a displacement.
  void define(Level x, Level k, int piece);

  bool defined(Level x) const { return table_[static_cast<std::size_t>(x)] != kUndefined; }
  Level displacement(Level x) const { return table_[static_cast<std::size_t>(x)]; }
  Level image(Level x) const;  // kUndefined off the domain
  // Index into pieces(), -1 off the domain.
  int piece(Level x) const { return piece_[static_cast<std::size_t>(x)]; }
  int add_piece(StageKey key);
  const std::vector<StageKey>& pieces() const { return pieces_; }

  LevelSet domain() const;
  Level domain_size() const;
  std::vector<Run> runs() const;

 private:
  int depth_ = 0;
  Level modulus_ = 1;
  std::vector<Level> table_;
  std::vector<std::int32_t> piece_;
  std::vector<StageKey> pieces_;
};

// Exact displacement masses plus the mass left unresolved at depth M.
struct CocycleDistribution {
  std::map<Level, Rational> masses;
  Rational domain;  // measure of the intended domain
  Rational defect;  // domain minus resolved mass

  Rational resolved() const;
  double entropy() const;
  std::size_t support_size() const { return masses.size(); }
};

// Per-level counts at modulus d turned into an exact distribution.
CocycleDistribution distribution_from_counts(const std::map<Level, Level>& counts, Level modulus,
                                             const Rational& domain);

struct RegionLedger {
  // Sets of stage (n, m) are stored at depth m, K_n and K'_n = K_n \ K_{n-1} at depth n.
  std::map<StageKey, LevelSet> D, E, A, W;
  std::map<int, LevelSet> K, K_prime;
};

// Chains of S: pos[x] is the S-distance from the chain's first level.
struct ChainIndex {
  std::vector<std::int32_t> chain;
  std::vector<Level> pos;
  std::size_t cycles = 0;

  // k with S^k x = y, or kUndefined when x and y lie on different chains.
  Level distance(Level x, Level y) const;
};
ChainIndex index_chains(const PiecewiseShift& s);

struct PieceEntropy {
  StageKey key;
  CocycleDistribution dist;
  Level count_bound = 0;    // possible displacements on the piece
  double uniform_bound = 0; // mu ln(count_bound / mu)
  double stage_majorant = 0;
  bool majorant_is_actual = false;  // pieces (1,1), (1,2) enter the chain as they are
};

struct SOverT {
  CocycleDistribution total;  // over X; defect = mass off dom(S)
  std::vector<PieceEntropy> pieces;
  double uniform_total = 0;   // sum of uniform bounds
  double majorant_total = 0;  // closing-chain majorant after the region bounds
};

struct BlockEntropy {
  int n = 0;
  // Over K_n minus every earlier K_j; this block lies inside K'_n and the
  // blocks are pairwise disjoint.
  CocycleDistribution dist;
  BigInt lambda;             // lambda_{n-1}
  Level crude_bound = 0;     // 4 w_{n-1}^2 d_{n-1}
  Level max_abs_k = 0;
  double uniform_bound = 0;
  double beta_bound = 0;     // beta_{n-1} ln(9 w^2 d / beta); n = 1 uses -mu ln mu
};

struct TOverS {
  CocycleDistribution total;  // over X; defect = mass outside the resolved K-domain
  std::vector<BlockEntropy> blocks;
  double uniform_total = 0;
  double majorant_total = 0;
  std::vector<Level> kappa;   // per depth-M level, kUndefined where unresolved
};

struct OrbitAnalysis {
  LadderMaps maps;
  PiecewiseShift S;
  ChainIndex chains;
  RegionLedger ledger;
  SOverT s_over_t;
  TOverS t_over_s;
  std::vector<Check> checks;
};

// D_{n,m} at depth M with the S displacement of each level. Levels whose
// prefix walk leaves the ladders are dropped and counted in *escaped.
struct DPiece {
  StageKey key;
  std::vector<Level> levels;
  std::vector<Level> k;
  Level escaped = 0;
  Level undo_mismatch = 0;
};
DPiece build_D(int n, int m, const LadderState& state, const LadderMaps& maps);

// S on every D_{n,m}, with disjointness, injectivity and displacement-range checks.
PiecewiseShift assemble_S(const LadderState& state, const LadderMaps& maps,
                          std::vector<Check>& checks, RegionLedger& ledger);

// S advances the mixed-radix rung address (radices a_1, a_2, ...) by one.
std::vector<Check> verify_S_is_odometer(const LadderMaps& maps, const PiecewiseShift& s,
                                        const std::vector<ScheduleRow>& rows);

// A_{n,m}, E_{n,m} (ladder saturation cross-checked against the S-walk), K_n, K'_n.
std::vector<Check> build_E_K(const LadderState& state, const LadderMaps& maps,
                             const PiecewiseShift& s, RegionLedger& ledger);

std::vector<Check> verify_measure_bounds(const RegionLedger& ledger,
                                         const std::vector<ScheduleRow>& rows, int depth);

SOverT cocycle_S_over_T(const PiecewiseShift& s, const std::vector<ScheduleRow>& rows,
                        std::vector<Check>& checks);

TOverS cocycle_T_over_S(const PiecewiseShift& s, const ChainIndex& chains,
                        const RegionLedger& ledger, const std::vector<ScheduleRow>& rows,
                        std::vector<Check>& checks);

// Full pipeline on a built state.
OrbitAnalysis analyze_orbit(const LadderState& state, const std::vector<ScheduleRow>& rows);

struct RateRow {
  int n = 0;
  double entropy_lumped = 0;    // unresolved mass kept as one cell
  double entropy_resolved = 0;  // resolved cells only
  Rational defect;
  bool inconclusive = false;
};

struct RateReport {
  std::vector<RateRow> rows;
  std::vector<Check> checks;
};

// H(Q_{T^n}) for n = 1..max_n from kappa(T^n, x) = sum_j kappa(T, T^j x).
RateReport cocycle_entropy_rate(const OrbitAnalysis& analysis, int max_n,
                                double defect_threshold = 0.5);

struct FirstDigitRow {
  int n = 0;
  std::size_t atoms = 0;
  double entropy = 0;      // H of the join over the window [0, n)
  double rate = 0;         // entropy / n
  double bound = 0;        // ln(d_1 n) / n
};

struct FirstDigitReport {
  std::vector<FirstDigitRow> rows;
  double bernoulli_rate = 0;  // i.i.d. uniform digits: H(P^F)/|F| = ln d_1
  std::vector<Check> checks;
};

// Exact entropy of joins of the first-digit partition of T, windows 1..max_n.
FirstDigitReport first_digit_entropy(const LadderState& state, int max_n);

}  // namespace oel
