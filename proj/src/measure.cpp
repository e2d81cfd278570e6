#include "oel/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace oel {

std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(BigInt(std::string(text)));
    BigInt num(std::string(text.substr(0, slash)));
    BigInt den(std::string(text.substr(slash + 1)));
    if (den <= 0) throw std::invalid_argument("non-positive denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

double entropy_term(const Rational& p) { return entropy_term(to_double(p)); }

double entropy_of_masses(std::span<const Rational> masses) {
  CompensatedSum sum;
  for (const auto& m : masses) sum.add(entropy_term(m));
  return sum.value();
}

double entropy_of_counts(std::span<const std::int64_t> counts, std::int64_t denominator) {
  CompensatedSum sum;
  const double den = static_cast<double>(denominator);
  for (auto c : counts) sum.add(entropy_term(static_cast<double>(c) / den));
  return sum.value();
}

// ---------------------------------------------------------------------------
// LevelSet

LevelSet::LevelSet(int depth, Level modulus, std::vector<Level> members)
    : depth_(depth), modulus_(modulus), members_(std::move(members)) {
  if (depth < 0) throw std::invalid_argument("LevelSet: negative depth");
  if (modulus < 1) throw std::invalid_argument("LevelSet: modulus must be positive");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && (members_.front() < 0 || members_.back() >= modulus_)) {
    throw std::invalid_argument("LevelSet: member outside [0, modulus)");
  }
}

LevelSet LevelSet::unchecked(int depth, Level modulus, std::vector<Level> sorted_members) {
  LevelSet s;
  s.depth_ = depth;
  s.modulus_ = modulus;
  s.members_ = std::move(sorted_members);
  return s;
}

LevelSet LevelSet::full(int depth, Level modulus) { return interval(depth, modulus, 0, modulus); }

LevelSet LevelSet::empty(int depth, Level modulus) { return unchecked(depth, modulus, {}); }

LevelSet LevelSet::interval(int depth, Level modulus, Level first, Level last_exclusive) {
  if (first < 0 || last_exclusive > modulus || first > last_exclusive) {
    throw std::invalid_argument("LevelSet::interval out of range");
  }
  std::vector<Level> m(static_cast<std::size_t>(last_exclusive - first));
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = first + static_cast<Level>(i);
  return unchecked(depth, modulus, std::move(m));
}

bool LevelSet::contains(Level level) const {
  return std::binary_search(members_.begin(), members_.end(), level);
}

MeasureValue LevelSet::measure() const {
  return MeasureValue(static_cast<long long>(members_.size()), static_cast<long long>(modulus_));
}

LevelSet LevelSet::complement() const {
  std::vector<Level> out;
  out.reserve(static_cast<std::size_t>(modulus_) - members_.size());
  auto it = members_.begin();
  for (Level i = 0; i < modulus_; ++i) {
    if (it != members_.end() && *it == i) {
      ++it;
    } else {
      out.push_back(i);
    }
  }
  return unchecked(depth_, modulus_, std::move(out));
}

void LevelSet::require_compatible(const LevelSet& other) const {
  if (depth_ != other.depth_ || modulus_ != other.modulus_) {
    throw std::invalid_argument("LevelSet operation across different depths (" +
                                std::to_string(depth_) + " vs " + std::to_string(other.depth_) +
                                ")");
  }
}

LevelSet set_union(const LevelSet& a, const LevelSet& b) {
  a.require_compatible(b);
  std::vector<Level> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.members_.begin(), a.members_.end(), b.members_.begin(), b.members_.end(),
                 std::back_inserter(out));
  return LevelSet::unchecked(a.depth_, a.modulus_, std::move(out));
}

LevelSet set_intersection(const LevelSet& a, const LevelSet& b) {
  a.require_compatible(b);
  std::vector<Level> out;
  std::set_intersection(a.members_.begin(), a.members_.end(), b.members_.begin(),
                        b.members_.end(), std::back_inserter(out));
  return LevelSet::unchecked(a.depth_, a.modulus_, std::move(out));
}

LevelSet set_difference(const LevelSet& a, const LevelSet& b) {
  a.require_compatible(b);
  std::vector<Level> out;
  std::set_difference(a.members_.begin(), a.members_.end(), b.members_.begin(), b.members_.end(),
                      std::back_inserter(out));
  return LevelSet::unchecked(a.depth_, a.modulus_, std::move(out));
}

bool is_subset(const LevelSet& a, const LevelSet& b) {
  a.require_compatible(b);
  return std::includes(b.members_.begin(), b.members_.end(), a.members_.begin(),
                       a.members_.end());
}

bool is_disjoint(const LevelSet& a, const LevelSet& b) {
  a.require_compatible(b);
  auto i = a.members_.begin();
  auto j = b.members_.begin();
  while (i != a.members_.end() && j != b.members_.end()) {
    if (*i == *j) return false;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Partitions

LabeledPartition::LabeledPartition(int depth, Level modulus) : depth_(depth), modulus_(modulus) {}

void LabeledPartition::add(std::string label, LevelSet cell) {
  if (cell.depth() != depth_ || cell.modulus() != modulus_) {
    throw std::invalid_argument("LabeledPartition: cell at wrong depth");
  }
  if (cell.is_empty()) return;
  for (const auto& [other_label, other] : cells_) {
    if (!is_disjoint(other, cell)) {
      throw std::invalid_argument("LabeledPartition: cell '" + label + "' overlaps '" +
                                  other_label + "'");
    }
  }
  cells_.emplace_back(std::move(label), std::move(cell));
}

LevelSet LabeledPartition::support() const {
  LevelSet s = LevelSet::empty(depth_, modulus_);
  for (const auto& [label, cell] : cells_) s = set_union(s, cell);
  return s;
}

double shannon_entropy(const LabeledPartition& p) {
  CompensatedSum sum;
  for (const auto& [label, cell] : p.cells()) sum.add(entropy_term(cell.measure()));
  return sum.value();
}

double conditional_entropy(const LabeledPartition& p, const LabeledPartition& q) {
  if (!is_subset(p.support(), q.support())) {
    throw std::invalid_argument("conditional_entropy: conditioning partition does not cover p");
  }
  CompensatedSum sum;
  for (const auto& [qlabel, b] : q.cells()) {
    const double mb = to_double(b.measure());
    for (const auto& [plabel, a] : p.cells()) {
      const auto ab = set_intersection(a, b);
      if (ab.is_empty()) continue;
      const double mab = to_double(ab.measure());
      sum.add(-mab * std::log(mab / mb));
    }
  }
  return sum.value();
}

LabeledPartition join(const LabeledPartition& p, const LabeledPartition& q) {
  if (p.depth() != q.depth() || p.modulus() != q.modulus()) {
    throw std::invalid_argument("join: partitions at different depths");
  }
  LabeledPartition out(p.depth(), p.modulus());
  for (const auto& [plabel, a] : p.cells()) {
    for (const auto& [qlabel, b] : q.cells()) {
      auto ab = set_intersection(a, b);
      if (!ab.is_empty()) out.add(plabel + "|" + qlabel, std::move(ab));
    }
  }
  return out;
}

CoverBound cover_entropy_bound(const LabeledPartition& p, const std::vector<LevelSet>& cover) {
  LevelSet covered = LevelSet::empty(p.depth(), p.modulus());
  for (const auto& b : cover) covered = set_union(covered, b);
  if (!is_subset(p.support(), covered)) {
    throw std::invalid_argument("cover_entropy_bound: cover misses part of the support");
  }
  CoverBound out;
  out.entropy = shannon_entropy(p);
  CompensatedSum sum;
  for (const auto& b : cover) {
    for (const auto& [label, cell] : p.cells()) {
      sum.add(entropy_term(set_intersection(cell, b).measure()));
    }
  }
  out.cover_sum = sum.value();
  out.holds = out.entropy <= out.cover_sum + 1e-12;
  return out;
}

}  // namespace oel
