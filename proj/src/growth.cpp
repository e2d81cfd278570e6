#include "oel/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <stdexcept>

namespace oel {

namespace {

void require_shape(const GrowthGroup& g, const GroupElement& x) {
  const std::size_t want = g.kind() == GrowthGroup::Kind::free_abelian ? static_cast<std::size_t>(g.rank()) : 2;
  if (x.size() != want) throw std::invalid_argument("group element has the wrong number of coordinates");
  if (g.kind() == GrowthGroup::Kind::infinite_dihedral && x[1] != 0 && x[1] != 1) {
    throw std::invalid_argument("dihedral element needs s-bit 0 or 1");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(trim(s), &used);
  if (used != trim(s).size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

// Sorted ball of the given radius; sizes receives |B(m)| for m = 0..radius.
std::vector<GroupElement> breadth_first(const GrowthGroup& g, int radius, std::vector<std::size_t>& sizes) {
  std::set<GroupElement> seen{g.identity()};
  std::vector<GroupElement> frontier{g.identity()};
  sizes.assign(1, 1);
  for (int step = 0; step < radius; ++step) {
    std::vector<GroupElement> next;
    for (const auto& x : frontier) {
      for (const auto& s : g.generators()) {
        auto y = g.multiply(x, s);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    }
    frontier = std::move(next);
    sizes.push_back(seen.size());
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

GrowthGroup GrowthGroup::free_abelian(int rank) {
  if (rank < 1 || rank > 3) throw std::invalid_argument("free abelian rank must be 1, 2 or 3");
  GrowthGroup g;
  g.kind_ = Kind::free_abelian;
  g.rank_ = rank;
  g.growth_order_ = rank;
  for (int i = 0; i < rank; ++i) {
    for (int sign : {1, -1}) {
      GroupElement e(static_cast<std::size_t>(rank), 0);
      e[static_cast<std::size_t>(i)] = sign;
      g.generators_.push_back(e);
    }
  }
  g.cosets_ = {g.identity()};
  g.conjugators_ = {g.identity()};
  return g;
}

GrowthGroup GrowthGroup::infinite_dihedral() {
  GrowthGroup g;
  g.kind_ = Kind::infinite_dihedral;
  g.rank_ = 1;
  g.growth_order_ = 1;
  g.generators_ = {{1, 0}, {-1, 0}, {0, 1}};
  g.cosets_ = {{0, 0}, {0, 1}};
  // Conjugation by s inverts t, so {e, s} realises every automorphism induced on A.
  g.conjugators_ = {{0, 0}, {0, 1}};
  return g;
}

GrowthGroup GrowthGroup::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "z" || t == "Z" || t == "z^1") return free_abelian(1);
  if (t == "z^2" || t == "Z^2") return free_abelian(2);
  if (t == "z^3" || t == "Z^3") return free_abelian(3);
  if (t == "dihedral" || t == "d_inf") return infinite_dihedral();
  throw std::invalid_argument("unknown group '" + text + "' (expected z, z^2, z^3 or dihedral)");
}

std::string GrowthGroup::name() const {
  if (kind_ == Kind::infinite_dihedral) return "dihedral";
  return rank_ == 1 ? "z" : "z^" + std::to_string(rank_);
}

GroupElement GrowthGroup::identity() const {
  return kind_ == Kind::free_abelian ? GroupElement(static_cast<std::size_t>(rank_), 0) : GroupElement{0, 0};
}

GroupElement GrowthGroup::multiply(const GroupElement& x, const GroupElement& y) const {
  if (kind_ == Kind::free_abelian) {
    GroupElement out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
  }
  // (a, e)(b, f) = (a + (-1)^e b, e xor f)
  return {x[0] + (x[1] ? -y[0] : y[0]), x[1] ^ y[1]};
}

GroupElement GrowthGroup::inverse(const GroupElement& x) const {
  if (kind_ == Kind::free_abelian) {
    GroupElement out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
    return out;
  }
  if (x[1]) return x;  // reflections are involutions
  return {-x[0], 0};
}

std::int64_t GrowthGroup::word_length(const GroupElement& x) const {
  if (kind_ == Kind::free_abelian) {
    std::int64_t len = 0;
    for (auto c : x) len += std::llabs(c);
    return len;
  }
  return std::llabs(x[0]) + x[1];
}

std::vector<GroupElement> GrowthGroup::ball(int radius) const {
  if (radius < 0) throw std::invalid_argument("ball radius must be non-negative");
  std::vector<std::size_t> unused;
  return breadth_first(*this, radius, unused);
}

std::vector<std::size_t> GrowthGroup::ball_sizes(int horizon) const {
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  std::vector<std::size_t> sizes;
  breadth_first(*this, horizon, sizes);
  return sizes;
}

GrowthGroup::Constants GrowthGroup::constants(int horizon) const {
  if (horizon < 1) throw std::invalid_argument("constants need horizon >= 1");
  Constants c;
  c.horizon = horizon;
  c.E_size = conjugators_.size();
  c.c1 = std::log(static_cast<double>(c.E_size));
  c.k = growth_order_;
  // K = {e} u union over g in E of g (S u F) g^{-1}
  std::int64_t d = 0;
  for (const auto& g : conjugators_) {
    for (const auto& s : generators_) d = std::max(d, word_length(multiply(multiply(g, s), inverse(g))));
  }
  c.d = static_cast<int>(d);
  const auto sizes = ball_sizes(horizon);
  for (int m = 1; m <= horizon; ++m) {
    const Rational ratio(BigInt(sizes[static_cast<std::size_t>(m)]), pow(BigInt(m), static_cast<unsigned>(c.k)));
    if (ratio > c.C) c.C = ratio;
  }
  c.c2 = c.C * Rational(pow(BigInt(3 * c.d), static_cast<unsigned>(c.k)));
  return c;
}

std::size_t count_products(const GrowthInstance& instance, const GrowthGroup& group) {
  if (instance.n < 0 || instance.r < 0) throw std::invalid_argument("n and r must be non-negative");
  for (const auto& [i, b] : instance.fixed) {
    if (i < 1 || i > instance.n) throw std::invalid_argument("fixed index " + std::to_string(i) + " outside 1..n");
    require_shape(group, b);
    if (group.word_length(b) > GrowthGroup::kElementHorizon) {
      throw std::invalid_argument("fixed factor b_" + std::to_string(i) + " lies beyond the enumeration horizon");
    }
  }
  const auto free_ball = group.ball(instance.r);
  std::vector<GroupElement> products{group.identity()};
  for (int i = 1; i <= instance.n; ++i) {
    const auto it = instance.fixed.find(i);
    std::vector<GroupElement> next;
    if (it != instance.fixed.end()) {
      next.reserve(products.size());
      for (const auto& x : products) next.push_back(group.multiply(x, it->second));
    } else {
      next.reserve(products.size() * free_ball.size());
      for (const auto& x : products) {
        for (const auto& b : free_ball) next.push_back(group.multiply(x, b));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    products = std::move(next);
  }
  return products.size();
}

GrowthReport check_bound(const GrowthInstance& instance, const GrowthGroup& group) {
  return check_bound(instance, group, group.constants());
}

GrowthReport check_bound(const GrowthInstance& instance, const GrowthGroup& group,
                         const GrowthGroup::Constants& constants) {
  GrowthReport rep;
  rep.count = count_products(instance, group);
  rep.constants = constants;
  rep.omega0 = instance.fixed.size();
  const auto& c = rep.constants;
  const Rational e_power(pow(BigInt(c.E_size), static_cast<unsigned>(rep.omega0)));
  const auto k = static_cast<unsigned>(c.k);
  rep.stated_bound = e_power * c.c2 * Rational(pow(BigInt(instance.r) * instance.n, k));
  rep.proof_bound = e_power * c.C * Rational(pow(BigInt((instance.r + 1) * c.d + 1) * instance.n, k));
  // The stated form needs r >= 1; at r = 0 it degenerates to 0 and the proof's form applies.
  rep.stated_applies = instance.r >= 1;
  const Rational count(BigInt(rep.count));
  rep.pass = count <= rep.proof_bound && (!rep.stated_applies || count <= rep.stated_bound);
  return rep;
}

std::vector<GrowthInstance> sweep_instances(const GrowthGroup& group, int n, int r, std::uint64_t seed,
                                            int fixed_radius) {
  if (n < 0 || n > 20) throw std::invalid_argument("sweep needs 0 <= n <= 20");
  const auto pool = group.ball(fixed_radius);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<GrowthInstance> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    GrowthInstance inst{n, r, {}};
    for (int i = 1; i <= n; ++i) {
      if (mask & (1u << (i - 1))) inst.fixed[i] = pool[pick(rng)];
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::map<int, GroupElement> parse_omega0(const std::string& text, const GrowthGroup& group) {
  std::map<int, GroupElement> out;
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty()) items.push_back(cur);
  for (const auto& raw : items) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("omega0 entry needs i=value: " + item);
    const int index = static_cast<int>(parse_int(item.substr(0, eq)));
    std::string value = trim(item.substr(eq + 1));
    GroupElement b;
    if (!value.empty() && value.front() == '(') {
      if (value.back() != ')') throw std::invalid_argument("unbalanced parentheses in " + item);
      value = value.substr(1, value.size() - 2);
      std::size_t start = 0;
      while (true) {
        const auto comma = value.find(',', start);
        b.push_back(parse_int(value.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    } else {
      b.push_back(parse_int(value));
      if (group.kind() == GrowthGroup::Kind::infinite_dihedral) b.push_back(0);
    }
    require_shape(group, b);
    if (!out.emplace(index, b).second) throw std::invalid_argument("duplicate omega0 index " + std::to_string(index));
  }
  return out;
}

}  // namespace oel
