#include "oel/orbit_equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "oel/errors.hpp"

namespace oel {

namespace {

constexpr double kEntropyTolerance = 1e-9;

std::string stage_label(int n, int m) {
  return "n=" + std::to_string(n) + ",m=" + std::to_string(m);
}

Check structural(std::string name, std::string stage, std::string lhs, std::string rhs, bool pass,
                 bool enforced = true) {
  return Check{std::move(name), std::move(stage), std::move(lhs), std::move(rhs), pass,
               CheckKind::structural, enforced};
}

Check real_le(std::string name, std::string stage, double lhs, double rhs) {
  return structural(std::move(name), std::move(stage), format_real(lhs), format_real(rhs),
                    lhs <= rhs + kEntropyTolerance);
}

Check rational_le(std::string name, std::string stage, const Rational& lhs, const Rational& rhs) {
  return structural(std::move(name), std::move(stage), to_string(lhs), to_string(rhs), lhs <= rhs);
}

// mu ln(c / mu), the entropy of a uniform split of mass mu into c cells.
double uniform_entropy(double mu, double cells) {
  return mu > 0.0 ? mu * std::log(cells / mu) : 0.0;
}

double spread_term(double x, double bound) { return x > 0.0 ? -x * std::log(x / bound) : 0.0; }

Level w_before(const std::vector<ScheduleRow>& rows, int n) {
  return n <= 1 ? 1 : rows.at(static_cast<std::size_t>(n - 2)).w;
}
Level v_before(const std::vector<ScheduleRow>& rows, int n) {
  return n <= 1 ? 0 : rows.at(static_cast<std::size_t>(n - 2)).v;
}
Level d_at(const std::vector<ScheduleRow>& rows, int n) {
  return n == 0 ? 1 : rows.at(static_cast<std::size_t>(n - 1)).d;
}
const ScheduleRow& row_at(const std::vector<ScheduleRow>& rows, int n) {
  return rows.at(static_cast<std::size_t>(n - 1));
}

Level wrap(Level x, Level d) { return ((x % d) + d) % d; }

LevelSet lift_to(const LevelSet& s, int depth, Level modulus) { return lift(s, depth, modulus); }

}  // namespace

// ---------------------------------------------------------------------------
// LadderMaps

LadderMaps::LadderMaps(const LadderState& state)
    : depth_(state.depth()), modulus_(state.system().modulus(state.depth())), a_(state.a_values()) {
  if (modulus_ > std::numeric_limits<std::int32_t>::max()) {
    throw CapExceededError("d_M does not fit the 32-bit level tables");
  }
  const auto size = static_cast<std::size_t>(modulus_);
  for (int n = 1; n <= static_cast<int>(a_.size()); ++n) {
    Family f;
    f.rung.assign(size, -1);
    f.stage.assign(size, 0);
    f.step.assign(size, 0);
    f.above_bottom.assign(size, 0);
    f.span.assign(size, 0);
    for (int m = n; m <= depth_; ++m) {
      if (!state.has_stage(n, m)) continue;
      const auto& st = state.stage(n, m);
      const Level copies = modulus_ / st.modulus;
      for (Level j = 0; j < st.t; ++j) {
        const Level base = st.rung_level(j, 0);
        const Level span = st.rung_level(j, st.a - 1) - base;
        for (Level i = 0; i < st.a; ++i) {
          const Level b = st.rung_level(j, i);
          const Level step = i + 1 < st.a ? st.rung_level(j, i + 1) - b : 0;
          for (Level c = 0; c < copies; ++c) {
            const auto x = static_cast<std::size_t>(b + c * st.modulus);
            if (f.rung[x] != -1) {
              throw InvariantError("ladders of family " + std::to_string(n) + " overlap at level " +
                                   std::to_string(x));
            }
            f.rung[x] = static_cast<std::int32_t>(i);
            f.stage[x] = static_cast<std::int16_t>(m);
            f.step[x] = static_cast<std::int32_t>(step);
            f.above_bottom[x] = static_cast<std::int32_t>(b - base);
            f.span[x] = static_cast<std::int32_t>(span);
          }
        }
      }
    }
    families_.push_back(std::move(f));
  }
}

int LadderMaps::rung(int n, Level x) const { return family(n).rung[static_cast<std::size_t>(x)]; }

int LadderMaps::stage(int n, Level x) const { return family(n).stage[static_cast<std::size_t>(x)]; }

Level LadderMaps::next(int n, Level x) const {
  const auto& f = family(n);
  const auto i = static_cast<std::size_t>(x);
  if (f.rung[i] < 0 || f.rung[i] >= a(n) - 1) return kUndefined;
  return x + f.step[i];
}

Level LadderMaps::bottom(int n, Level x) const {
  const auto& f = family(n);
  const auto i = static_cast<std::size_t>(x);
  return f.rung[i] < 0 ? kUndefined : x - f.above_bottom[i];
}

Level LadderMaps::top(int n, Level x) const {
  const auto& f = family(n);
  const auto i = static_cast<std::size_t>(x);
  return f.rung[i] < 0 ? kUndefined : x - f.above_bottom[i] + f.span[i];
}

// ---------------------------------------------------------------------------
// PiecewiseShift

PiecewiseShift::PiecewiseShift(int depth, Level modulus)
    : depth_(depth),
      modulus_(modulus),
      table_(static_cast<std::size_t>(modulus), kUndefined),
      piece_(static_cast<std::size_t>(modulus), -1) {}

void PiecewiseShift::define(Level x, Level k, int piece) {
  auto& slot = table_.at(static_cast<std::size_t>(x));
  if (slot != kUndefined) {
    throw InvariantError("S defined twice at level " + std::to_string(x));
  }
  if (k == kUndefined) throw std::invalid_argument("reserved displacement value");
  slot = k;
  piece_[static_cast<std::size_t>(x)] = piece;
}

Level PiecewiseShift::image(Level x) const {
  const Level k = displacement(x);
  if (k == kUndefined) return kUndefined;
  const Level y = x - k;
  if (y < 0 || y >= modulus_) {
    throw InvariantError("S leaves the truncation at level " + std::to_string(x));
  }
  return y;
}

int PiecewiseShift::add_piece(StageKey key) {
  pieces_.push_back(key);
  return static_cast<int>(pieces_.size()) - 1;
}

LevelSet PiecewiseShift::domain() const {
  std::vector<Level> out;
  for (Level x = 0; x < modulus_; ++x) {
    if (defined(x)) out.push_back(x);
  }
  return LevelSet(depth_, modulus_, std::move(out));
}

Level PiecewiseShift::domain_size() const {
  return static_cast<Level>(std::count_if(table_.begin(), table_.end(),
                                          [](Level k) { return k != kUndefined; }));
}

std::vector<PiecewiseShift::Run> PiecewiseShift::runs() const {
  std::vector<Run> out;
  for (Level x = 0; x < modulus_; ++x) {
    const Level k = displacement(x);
    if (k == kUndefined) continue;
    if (!out.empty() && out.back().k == k && out.back().start + out.back().length == x) {
      ++out.back().length;
    } else {
      out.push_back(Run{x, 1, k});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distributions and chains

Rational CocycleDistribution::resolved() const {
  Rational sum = 0;
  for (const auto& [k, m] : masses) sum += m;
  return sum;
}

double CocycleDistribution::entropy() const {
  CompensatedSum sum;
  for (const auto& [k, m] : masses) sum.add(entropy_term(m));
  return sum.value();
}

CocycleDistribution distribution_from_counts(const std::map<Level, Level>& counts, Level modulus,
                                             const Rational& domain) {
  CocycleDistribution out;
  out.domain = domain;
  for (const auto& [k, c] : counts) {
    if (c > 0) out.masses.emplace(k, Rational(c, modulus));
  }
  out.defect = domain - out.resolved();
  return out;
}

Level ChainIndex::distance(Level x, Level y) const {
  const auto ix = static_cast<std::size_t>(x);
  const auto iy = static_cast<std::size_t>(y);
  if (chain[ix] != chain[iy]) return kUndefined;
  return pos[iy] - pos[ix];
}

ChainIndex index_chains(const PiecewiseShift& s) {
  const Level d = s.modulus();
  const auto size = static_cast<std::size_t>(d);
  ChainIndex out;
  out.chain.assign(size, -1);
  out.pos.assign(size, 0);
  std::vector<char> is_image(size, 0);
  for (Level x = 0; x < d; ++x) {
    const Level y = s.image(x);
    if (y != kUndefined) is_image[static_cast<std::size_t>(y)] = 1;
  }
  std::int32_t next_id = 0;
  auto walk = [&](Level start) {
    Level x = start;
    Level p = 0;
    while (x != kUndefined && out.chain[static_cast<std::size_t>(x)] == -1) {
      out.chain[static_cast<std::size_t>(x)] = next_id;
      out.pos[static_cast<std::size_t>(x)] = p++;
      x = s.image(x);
    }
    ++next_id;
  };
  for (Level x = 0; x < d; ++x) {
    if (!is_image[static_cast<std::size_t>(x)]) walk(x);
  }
  // Whatever is left lies on periodic S-orbits.
  for (Level x = 0; x < d; ++x) {
    if (out.chain[static_cast<std::size_t>(x)] == -1) {
      walk(x);
      ++out.cycles;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// D and S

DPiece build_D(int n, int m, const LadderState& state, const LadderMaps& maps) {
  DPiece out;
  out.key = {n, m};
  const auto& st = state.stage(n, m);
  const Level copies = maps.modulus() / st.modulus;
  std::vector<std::pair<Level, Level>> entries;
  for (Level j = 0; j < st.t; ++j) {
    for (Level i = 0; i + 1 < st.a; ++i) {
      const Level b = st.rung_level(j, i);
      for (Level c = 0; c < copies; ++c) {
        const Level y = b + c * st.modulus;
        // Climb to the top of the lower ladders: S_1^{a_1-1} ... S_{n-1}^{a_{n-1}-1} y.
        Level x = y;
        bool inside = true;
        for (int p = n - 1; p >= 1; --p) {
          if (maps.rung(p, x) != 0) {
            inside = false;
            break;
          }
          x = maps.top(p, x);
        }
        if (!inside) {
          ++out.escaped;
          continue;
        }
        // Undo the climb from the bottom ladder up; it must land on y again.
        Level u = x;
        for (int p = 1; p <= n - 1 && u != kUndefined; ++p) {
          u = maps.rung(p, u) == maps.a(p) - 1 ? maps.bottom(p, u) : kUndefined;
        }
        if (u != y) {
          ++out.undo_mismatch;
          continue;
        }
        entries.emplace_back(x, x - maps.next(n, y));
      }
    }
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& [x, k] : entries) {
    out.levels.push_back(x);
    out.k.push_back(k);
  }
  return out;
}

PiecewiseShift assemble_S(const LadderState& state, const LadderMaps& maps,
                          std::vector<Check>& checks, RegionLedger& ledger) {
  const int depth = state.depth();
  const Level d = maps.modulus();
  PiecewiseShift s(depth, d);
  Level overlaps = 0;
  Rational piece_mass = 0;
  Level w_prev = 1;
  for (int n = 1; n <= depth; ++n) {
    for (int m = n; m <= depth; ++m) {
      const auto label = stage_label(n, m);
      const auto piece = build_D(n, m, state, maps);
      const int index = s.add_piece({n, m});
      for (std::size_t q = 0; q < piece.levels.size(); ++q) {
        try {
          s.define(piece.levels[q], piece.k[q], index);
        } catch (const InvariantError&) {
          ++overlaps;
        }
      }
      checks.push_back(structural("D-prefix", label, std::to_string(piece.escaped + piece.undo_mismatch),
                                  "0 levels leaving the ladders",
                                  piece.escaped == 0 && piece.undo_mismatch == 0));

      const Level d_prev = state.system().modulus(m - 1);
      const Level lo = -d_prev;
      const Level hi = w_prev * d_prev;
      Level kmin = 0;
      Level kmax = 0;
      bool in_range = true;
      for (std::size_t q = 0; q < piece.k.size(); ++q) {
        const Level k = piece.k[q];
        kmin = q == 0 ? k : std::min(kmin, k);
        kmax = q == 0 ? k : std::max(kmax, k);
        in_range = in_range && k != 0 && k >= lo && k <= hi;
      }
      checks.push_back(structural(
          "S-displacement-range", label,
          piece.k.empty() ? "empty" : "[" + std::to_string(kmin) + "," + std::to_string(kmax) + "]",
          "[" + std::to_string(lo) + "," + std::to_string(hi) + "] without 0", in_range));

      const LevelSet at_top(depth, d, piece.levels);
      piece_mass += at_top.measure();
      try {
        ledger.D[{n, m}] = project(at_top, m, state.system().modulus(m));
        checks.push_back(structural("D-whole-levels", label, "whole", "whole", true));
      } catch (const std::invalid_argument&) {
        ledger.D[{n, m}] = LevelSet::empty(m, state.system().modulus(m));
        checks.push_back(structural("D-whole-levels", label, "split", "whole", false));
      }
    }
    w_prev *= state.a(n);
  }
  checks.push_back(structural("D-disjoint", "all", std::to_string(overlaps), "0", overlaps == 0));

  std::vector<char> hit(static_cast<std::size_t>(d), 0);
  Level collisions = 0;
  for (Level x = 0; x < d; ++x) {
    Level y = kUndefined;
    try {
      y = s.image(x);
    } catch (const InvariantError&) {
      ++collisions;
      continue;
    }
    if (y == kUndefined) continue;
    auto& h = hit[static_cast<std::size_t>(y)];
    if (h) ++collisions;
    h = 1;
  }
  checks.push_back(structural("S-injective", "all", std::to_string(collisions), "0", collisions == 0));

  const Rational defined = Rational(s.domain_size(), d);
  checks.push_back(structural("S-domain-mass", "all", to_string(defined),
                              "sum of mu(D_{n,m}) = " + to_string(piece_mass),
                              defined == piece_mass && defined <= 1));
  return s;
}

std::vector<Check> verify_S_is_odometer(const LadderMaps& maps, const PiecewiseShift& s,
                                        const std::vector<ScheduleRow>& rows) {
  std::vector<Check> out;
  const int families = maps.families();
  Level failures = 0;
  Level first_failure = -1;
  std::vector<Level> digits;
  std::vector<Level> chain;  // point at which digit p is read
  for (Level x = 0; x < maps.modulus(); ++x) {
    digits.clear();
    chain.clear();
    Level z = x;
    for (int p = 1; p <= families; ++p) {
      const int r = maps.rung(p, z);
      if (r < 0) break;
      digits.push_back(r);
      chain.push_back(z);
      z = maps.bottom(p, z);
    }
    int carry_at = 0;
    for (int p = 1; p <= static_cast<int>(digits.size()); ++p) {
      if (digits[static_cast<std::size_t>(p - 1)] < maps.a(p) - 1) {
        carry_at = p;
        break;
      }
    }
    bool ok = true;
    if (carry_at == 0) {
      ok = !s.defined(x);
    } else if (!s.defined(x)) {
      ok = false;
    } else {
      const Level y = s.image(x);
      for (int q = 1; q < carry_at && ok; ++q) ok = maps.rung(q, y) == 0;
      const auto i = static_cast<std::size_t>(carry_at - 1);
      ok = ok && maps.rung(carry_at, y) == digits[i] + 1 &&
           maps.bottom(carry_at, y) == maps.bottom(carry_at, chain[i]);
    }
    if (!ok) {
      if (failures == 0) first_failure = x;
      ++failures;
    }
  }
  out.push_back(structural("odometer-address",
                           failures == 0 ? "all" : "level=" + std::to_string(first_failure),
                           std::to_string(failures), "0", failures == 0));
  for (const auto& row : rows) {
    out.push_back(structural("p-divides-a", "n=" + std::to_string(row.n), std::to_string(row.a),
                             "multiple of " + std::to_string(row.p),
                             row.a % static_cast<Level>(row.p) == 0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// E and K

std::vector<Check> build_E_K(const LadderState& state, const LadderMaps& maps,
                             const PiecewiseShift& s, RegionLedger& ledger) {
  std::vector<Check> out;
  const int depth = state.depth();
  const Level d = maps.modulus();
  const auto& sys = state.system();
  for (int n = 1; n <= depth; ++n) {
    Level w = 1;
    for (int p = 1; p <= n; ++p) w *= maps.a(p);
    for (int m = n; m <= depth; ++m) {
      const auto label = stage_label(n, m);
      std::vector<Level> base;
      for (int l = n; l <= m; ++l) {
        const auto lifted = sys.lift(state.stage(n, l).rung(0), depth);
        base.insert(base.end(), lifted.members().begin(), lifted.members().end());
      }
      std::sort(base.begin(), base.end());

      // Saturate within L_n, then L_{n-1}, ..., then L_1.
      std::vector<Level> sat = base;
      Level sat_fail = 0;
      for (int p = n; p >= 1; --p) {
        std::vector<Level> next;
        next.reserve(sat.size() * static_cast<std::size_t>(maps.a(p)));
        for (Level y : sat) {
          if (maps.rung(p, y) != 0 || maps.stage(p, y) > m) {
            ++sat_fail;
            continue;
          }
          Level u = y;
          next.push_back(u);
          for (Level i = 1; i < maps.a(p); ++i) {
            u = maps.next(p, u);
            next.push_back(u);
          }
        }
        sat = std::move(next);
      }
      const LevelSet e_sat(depth, d, sat);

      // The same set as the first w_n points of each S-orbit from A.
      std::vector<Level> walk;
      walk.reserve(base.size() * static_cast<std::size_t>(w));
      Level walk_fail = 0;
      for (Level y : base) {
        Level u = y;
        walk.push_back(u);
        for (Level i = 1; i < w; ++i) {
          u = s.image(u);
          if (u == kUndefined) {
            ++walk_fail;
            break;
          }
          walk.push_back(u);
        }
      }
      const std::size_t walk_points = walk.size();
      const LevelSet e_walk(depth, d, std::move(walk));
      const bool agree = sat_fail == 0 && walk_fail == 0 && e_sat == e_walk &&
                         walk_points == e_walk.size() && sat.size() == e_sat.size();
      out.push_back(structural("E-saturation-walk", label, std::to_string(e_sat.size()),
                               std::to_string(e_walk.size()), agree));

      const Level dm = sys.modulus(m);
      ledger.A[{n, m}] = project(LevelSet(depth, d, base), m, dm);
      ledger.W[{n, m}] = compute_W(n, m, state);
      try {
        ledger.E[{n, m}] = project(e_sat, m, dm);
        out.push_back(structural("E-whole-levels", label, "whole", "whole", true));
      } catch (const std::invalid_argument&) {
        ledger.E[{n, m}] = LevelSet::empty(m, dm);
        out.push_back(structural("E-whole-levels", label, "split", "whole", false));
      }
    }

    // K_n = (E_{n,n} \ B_n) intersected with T^{-1} E_{n,n}, at depth n.
    const Level dn = sys.modulus(n);
    const auto& e = ledger.E.at({n, n});
    const auto k = set_intersection(set_difference(e, LevelSet(n, dn, {0})), apply_T(e, -1));
    ledger.K[n] = k;
    ledger.K_prime[n] = n == 1 ? k : set_difference(k, sys.lift(ledger.K.at(n - 1), n));
  }
  return out;
}

std::vector<Check> verify_measure_bounds(const RegionLedger& ledger,
                                         const std::vector<ScheduleRow>& rows, int depth) {
  std::vector<Check> out;
  for (int n = 1; n <= depth; ++n) {
    const auto& row = row_at(rows, n);
    const std::string label = "n=" + std::to_string(n);
    const Rational outside_e = 1 - ledger.E.at({n, n}).measure();
    const Rational kn_bound(BigInt(v_before(rows, n)) + BigInt(row.p) * w_before(rows, n), BigInt(row.d));
    out.push_back(rational_le("E-Kn", label, outside_e, kn_bound));
    out.push_back(rational_le("E-Knbeta", label, 1 - ledger.K.at(n).measure(), row.beta));
    if (n > 1) {
      out.push_back(rational_le("E-Fn", label, ledger.K_prime.at(n).measure(),
                                row_at(rows, n - 1).beta));
    }
    for (int m = n; m <= depth; ++m) {
      const auto& e = ledger.E.at({n, m});
      const Level dm = e.modulus();
      if (m > n) {
        const auto lifted_prev = lift_to(ledger.E.at({n, m - 1}), m, dm);
        out.push_back(structural("E-monotone-m", stage_label(n, m), "E_{n,m-1}", "E_{n,m}",
                                 is_subset(lifted_prev, e)));
        const auto& dset = ledger.D.at({n, m});
        out.push_back(structural("D-outside-E", stage_label(n, m), "D_{n,m}", "X \\ E_{n,m-1}",
                                 is_disjoint(dset, lifted_prev)));
        if (m - 1 > n) {
          out.push_back(rational_le("E-Dnm", stage_label(n, m), dset.measure(),
                                    Rational(row.v, d_at(rows, m - 1))));
        }
      }
      if (n > 1) {
        out.push_back(structural("E-monotone-n", stage_label(n, m), "E_{n,m}", "E_{n-1,m}",
                                 is_subset(e, ledger.E.at({n - 1, m}))));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cocycle partitions

SOverT cocycle_S_over_T(const PiecewiseShift& s, const std::vector<ScheduleRow>& rows,
                        std::vector<Check>& checks) {
  SOverT out;
  const Level d = s.modulus();
  std::vector<std::map<Level, Level>> per_piece(s.pieces().size());
  std::map<Level, Level> total;
  for (Level x = 0; x < d; ++x) {
    if (!s.defined(x)) continue;
    ++per_piece[static_cast<std::size_t>(s.piece(x))][s.displacement(x)];
    ++total[s.displacement(x)];
  }
  out.total = distribution_from_counts(total, d, Rational(1));

  CompensatedSum cover_sum;
  CompensatedSum uniform_sum;
  CompensatedSum majorant_sum;
  for (std::size_t q = 0; q < s.pieces().size(); ++q) {
    const auto [n, m] = s.pieces()[q];
    const auto label = stage_label(n, m);
    Level size = 0;
    for (const auto& [k, c] : per_piece[q]) size += c;
    PieceEntropy pe;
    pe.key = {n, m};
    pe.dist = distribution_from_counts(per_piece[q], d, Rational(size, d));
    const double mu = to_double(pe.dist.domain);
    const double h = pe.dist.entropy();
    pe.count_bound = n == 1 ? d_at(rows, m - 1) : theta(rows, n, m);
    pe.uniform_bound = uniform_entropy(mu, static_cast<double>(pe.count_bound));

    const double dm1 = static_cast<double>(d_at(rows, m - 1));
    if (n == 1 && m <= 2) {
      pe.stage_majorant = h;
      pe.majorant_is_actual = true;
    } else if (n == 1) {
      const double a1 = static_cast<double>(row_at(rows, 1).a);
      pe.stage_majorant = -(a1 / dm1) * std::log(a1 / (dm1 * dm1));
    } else if (m == n) {
      const double w = static_cast<double>(w_before(rows, n));
      pe.stage_majorant = std::log(w * static_cast<double>(theta(rows, n, n))) / w;
    } else if (m == n + 1) {
      const double x = (static_cast<double>(v_before(rows, n)) +
                        static_cast<double>(row_at(rows, n).p) * static_cast<double>(w_before(rows, n))) /
                       static_cast<double>(row_at(rows, n).d);
      pe.stage_majorant = spread_term(x, static_cast<double>(theta(rows, n, m)));
    } else {
      const double y = static_cast<double>(row_at(rows, n).v) / dm1;
      pe.stage_majorant = spread_term(y, static_cast<double>(theta(rows, n, m)));
    }

    checks.push_back(structural("S-T-count", label, std::to_string(pe.dist.support_size()),
                                std::to_string(pe.count_bound),
                                static_cast<Level>(pe.dist.support_size()) <= pe.count_bound));
    checks.push_back(real_le("S-T-uniform", label, h, pe.uniform_bound));
    if (!pe.majorant_is_actual) checks.push_back(real_le("S-T-majorant", label, h, pe.stage_majorant));

    cover_sum.add(h);
    uniform_sum.add(pe.uniform_bound);
    majorant_sum.add(pe.stage_majorant);
    out.pieces.push_back(std::move(pe));
  }
  out.uniform_total = uniform_sum.value();
  out.majorant_total = majorant_sum.value();
  const double h_total = out.total.entropy();
  checks.push_back(real_le("S-T-cover", "all", h_total, cover_sum.value()));
  checks.push_back(real_le("S-T-chain", "all", h_total, out.majorant_total));
  return out;
}

TOverS cocycle_T_over_S(const PiecewiseShift& s, const ChainIndex& chains,
                        const RegionLedger& ledger, const std::vector<ScheduleRow>& rows,
                        std::vector<Check>& checks) {
  TOverS out;
  const Level d = s.modulus();
  const int depth = s.depth();
  out.kappa.assign(static_cast<std::size_t>(d), kUndefined);
  std::vector<char> claimed(static_cast<std::size_t>(d), 0);
  std::map<Level, Level> total;
  CompensatedSum cover_sum;
  CompensatedSum uniform_sum;
  CompensatedSum majorant_sum;
  Level unresolved_total = 0;

  for (int n = 1; n <= depth; ++n) {
    const std::string label = "n=" + std::to_string(n);
    const auto k_set = lift(ledger.K.at(n), depth, d);
    BlockEntropy block;
    block.n = n;
    const Level w = w_before(rows, n);
    const Level dp = d_at(rows, n - 1);
    block.crude_bound = 4 * w * w * dp;
    block.lambda = row_at(rows, n).lambda_prev;

    std::map<Level, Level> counts;
    Level size = 0;
    Level unresolved = 0;
    Level violations = 0;
    for (Level x : k_set.members()) {
      auto& c = claimed[static_cast<std::size_t>(x)];
      if (c) continue;
      c = 1;
      ++size;
      const Level k = chains.distance(x, wrap(x - 1, d));
      if (k == kUndefined) {
        ++unresolved;
        continue;
      }
      if (k == 0 || std::llabs(k) > block.crude_bound) ++violations;
      block.max_abs_k = std::max<Level>(block.max_abs_k, std::llabs(k));
      out.kappa[static_cast<std::size_t>(x)] = k;
      ++counts[k];
      ++total[k];
    }
    unresolved_total += unresolved;
    block.dist = distribution_from_counts(counts, d, Rational(size, d));
    const double mu = to_double(block.dist.domain);
    const double h = block.dist.entropy();
    block.uniform_bound = uniform_entropy(mu, block.lambda.convert_to<double>());
    if (n == 1) {
      block.beta_bound = entropy_term(mu);
    } else {
      const auto& prev = row_at(rows, n - 1);
      const double beta = to_double(prev.beta);
      const double wd = static_cast<double>(prev.w);
      block.beta_bound = uniform_entropy(beta, 9.0 * wd * wd * static_cast<double>(prev.d));
    }

    checks.push_back(structural("E-crude", label, std::to_string(block.max_abs_k),
                                std::to_string(block.crude_bound), violations == 0));
    checks.push_back(structural("T-S-count", label, std::to_string(block.dist.support_size()),
                                block.lambda.str(),
                                BigInt(block.dist.support_size()) <= block.lambda));
    checks.push_back(real_le("T-S-uniform", label, h, block.uniform_bound));
    checks.push_back(real_le("T-S-beta", label, h, block.beta_bound));
    checks.push_back(structural("K-resolved", label, to_string(block.dist.defect), "0",
                                unresolved == 0, false));

    cover_sum.add(h);
    uniform_sum.add(block.uniform_bound);
    majorant_sum.add(block.beta_bound);
    out.blocks.push_back(std::move(block));
  }
  out.total = distribution_from_counts(total, d, Rational(1));
  out.uniform_total = uniform_sum.value();
  out.majorant_total = majorant_sum.value();
  const double h_total = out.total.entropy();
  checks.push_back(real_le("T-S-cover", "all", h_total, cover_sum.value()));
  checks.push_back(real_le("T-S-chain", "all", h_total, out.majorant_total));
  checks.push_back(structural("K-resolved", "all", std::to_string(unresolved_total), "0",
                              unresolved_total == 0, false));
  return out;
}

OrbitAnalysis analyze_orbit(const LadderState& state, const std::vector<ScheduleRow>& rows) {
  OrbitAnalysis out;
  if (state.depth() == 0) return out;
  out.maps = LadderMaps(state);
  out.S = assemble_S(state, out.maps, out.checks, out.ledger);
  out.chains = index_chains(out.S);
  out.checks.push_back(structural("S-aperiodic", "all", std::to_string(out.chains.cycles), "0",
                                  out.chains.cycles == 0));
  auto odo = verify_S_is_odometer(out.maps, out.S, rows);
  out.checks.insert(out.checks.end(), odo.begin(), odo.end());
  auto ek = build_E_K(state, out.maps, out.S, out.ledger);
  out.checks.insert(out.checks.end(), ek.begin(), ek.end());
  auto mb = verify_measure_bounds(out.ledger, rows, state.depth());
  out.checks.insert(out.checks.end(), mb.begin(), mb.end());
  out.s_over_t = cocycle_S_over_T(out.S, rows, out.checks);
  out.t_over_s = cocycle_T_over_S(out.S, out.chains, out.ledger, rows, out.checks);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

// Entropy of the partition given by per-level labels; kUndefined labels form
// one lumped cell when `lump` is set and are skipped otherwise.
double label_entropy(const std::vector<Level>& labels, Level d, bool lump) {
  std::unordered_map<Level, Level> counts;
  for (Level v : labels) {
    if (v == kUndefined && !lump) continue;
    ++counts[v];
  }
  std::vector<std::int64_t> c;
  c.reserve(counts.size());
  for (const auto& kv : counts) c.push_back(kv.second);
  std::sort(c.begin(), c.end());
  return entropy_of_counts(c, d);
}

// Dense ids 0..k-1 for arbitrary labels, preserving label order.
std::vector<Level> compress(const std::vector<Level>& labels) {
  std::vector<Level> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Level> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin();
  }
  return out;
}

// Ids of the common refinement of two dense labelings of the same levels.
std::vector<Level> refine(const std::vector<Level>& a, const std::vector<Level>& b) {
  const Level width = b.empty() ? 1 : *std::max_element(b.begin(), b.end()) + 1;
  std::vector<Level> combined(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) combined[i] = a[i] * width + b[i];
  return compress(combined);
}

double dense_entropy(const std::vector<Level>& ids, Level d) {
  std::vector<std::int64_t> counts;
  for (Level id : ids) {
    if (static_cast<std::size_t>(id) >= counts.size()) counts.resize(static_cast<std::size_t>(id) + 1, 0);
    ++counts[static_cast<std::size_t>(id)];
  }
  return entropy_of_counts(counts, d);
}

}  // namespace

RateReport cocycle_entropy_rate(const OrbitAnalysis& analysis, int max_n, double defect_threshold) {
  RateReport out;
  const auto& kappa = analysis.t_over_s.kappa;
  const Level d = static_cast<Level>(kappa.size());
  if (d == 0 || max_n < 1) return out;

  // values[n][x] = kappa(T^n, x).
  std::vector<std::vector<Level>> values(static_cast<std::size_t>(max_n) + 1);
  values[1] = kappa;
  Level identity_failures = 0;
  for (int n = 2; n <= max_n; ++n) {
    auto& cur = values[static_cast<std::size_t>(n)];
    const auto& prev = values[static_cast<std::size_t>(n - 1)];
    cur.assign(static_cast<std::size_t>(d), kUndefined);
    for (Level x = 0; x < d; ++x) {
      // kappa(T^n, x) = kappa(T^{n-1}, T x) + kappa(T, x).
      const Level a = kappa[static_cast<std::size_t>(x)];
      const Level b = prev[static_cast<std::size_t>(wrap(x - 1, d))];
      if (a == kUndefined || b == kUndefined) continue;
      cur[static_cast<std::size_t>(x)] = a + b;
      if (analysis.chains.distance(x, wrap(x - n, d)) != a + b) ++identity_failures;
    }
  }
  out.checks.push_back(structural("rate-cocycle-identity", "n<=" + std::to_string(max_n),
                                  std::to_string(identity_failures), "0", identity_failures == 0));

  std::vector<double> lumped(static_cast<std::size_t>(max_n) + 1, 0.0);
  for (int n = 1; n <= max_n; ++n) {
    const auto& v = values[static_cast<std::size_t>(n)];
    RateRow row;
    row.n = n;
    const Level undefined = static_cast<Level>(std::count(v.begin(), v.end(), kUndefined));
    row.defect = Rational(undefined, d);
    row.entropy_lumped = label_entropy(v, d, true);
    row.entropy_resolved = label_entropy(v, d, false);
    row.inconclusive = to_double(row.defect) > defect_threshold;
    lumped[static_cast<std::size_t>(n)] = row.entropy_lumped;
    out.rows.push_back(row);
  }
  out.checks.push_back(structural(
      "rate-matches-T-S", "n=1", format_real(out.rows.front().entropy_resolved),
      format_real(analysis.t_over_s.total.entropy()),
      std::abs(out.rows.front().entropy_resolved - analysis.t_over_s.total.entropy()) <= kEntropyTolerance));

  // H(Q_{T^{nm}}) <= H(join_{j<n} T^{-jm} Q_{T^m}) <= n H(Q_{T^m}).
  for (int m = 1; m <= max_n; ++m) {
    for (int n = 2; n * m <= max_n; ++n) {
      const auto qm = compress(values[static_cast<std::size_t>(m)]);
      std::vector<Level> ids = qm;
      std::vector<Level> shifted(static_cast<std::size_t>(d));
      for (int j = 1; j < n; ++j) {
        for (Level x = 0; x < d; ++x) {
          shifted[static_cast<std::size_t>(x)] = qm[static_cast<std::size_t>(wrap(x - static_cast<Level>(j) * m, d))];
        }
        ids = refine(ids, shifted);
      }
      const double h_join = dense_entropy(ids, d);
      const double h_nm = lumped[static_cast<std::size_t>(n * m)];
      const double h_m = lumped[static_cast<std::size_t>(m)];
      const std::string label = "n=" + std::to_string(n) + ",m=" + std::to_string(m);
      out.checks.push_back(real_le("rate-refines-join", label, h_nm, h_join));
      out.checks.push_back(real_le("rate-join-subadditive", label, h_join, n * h_m));
    }
  }
  return out;
}

FirstDigitReport first_digit_entropy(const LadderState& state, int max_n) {
  FirstDigitReport out;
  if (state.depth() < 1 || max_n < 1) return out;
  const Level d1 = state.system().modulus(1);
  const Level d = state.system().modulus(state.depth());
  out.bernoulli_rate = std::log(static_cast<double>(d1));

  // atom[x] identifies the cell of x in the join of T^{-j} P over j < n.
  std::vector<Level> atom(static_cast<std::size_t>(d));
  std::vector<Level> digit(static_cast<std::size_t>(d));
  for (Level x = 0; x < d; ++x) atom[static_cast<std::size_t>(x)] = x % d1;
  double previous_rate = 0.0;
  bool monotone = true;
  bool bounded = true;
  for (int n = 1; n <= max_n; ++n) {
    if (n > 1) {
      for (Level x = 0; x < d; ++x) digit[static_cast<std::size_t>(x)] = wrap(x - (n - 1), d) % d1;
      atom = refine(atom, digit);
    }
    FirstDigitRow row;
    row.n = n;
    row.atoms = static_cast<std::size_t>(*std::max_element(atom.begin(), atom.end()) + 1);
    row.entropy = dense_entropy(atom, d);
    row.rate = row.entropy / n;
    row.bound = std::log(static_cast<double>(d1) * n) / n;
    bounded = bounded && row.rate <= row.bound + 1e-12;
    if (n > 1) monotone = monotone && row.rate <= previous_rate + 1e-12;
    previous_rate = row.rate;
    out.rows.push_back(row);
  }
  const auto& last = out.rows.back();
  out.checks.push_back(structural("first-digit-bound", "n<=" + std::to_string(max_n),
                                  format_real(last.rate), format_real(last.bound), bounded));
  out.checks.push_back(structural("first-digit-monotone", "n<=" + std::to_string(max_n),
                                  monotone ? "nonincreasing" : "increase seen", "nonincreasing", monotone));
  return out;
}

}  // namespace oel
