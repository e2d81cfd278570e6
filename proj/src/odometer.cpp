#include "oel/odometer.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oel {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

Prime nth_prime(std::size_t k) {
  static std::vector<Prime> cache{2};
  while (cache.size() <= k) {
    Prime c = cache.back() + 1;
    while (!is_prime(c)) ++c;
    cache.push_back(c);
  }
  return cache[k];
}

std::vector<Prime> factorize(std::uint64_t n) {
  std::vector<Prime> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      out.push_back(d);
      n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// SupernaturalNumber

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(std::string("bad ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

SupernaturalNumber SupernaturalNumber::parse(std::string_view text) {
  SupernaturalNumber q;
  bool saw_default = false;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("supernatural entry needs prime:exponent, got '" +
                                  std::string(item) + "'");
    }
    const auto key = trim(item.substr(0, colon));
    const auto value = trim(item.substr(colon + 1));
    const bool inf = value == "inf";
    if (key == "*") {
      if (saw_default) throw std::invalid_argument("duplicate '*' entry");
      saw_default = true;
      if (inf) {
        q.default_infinite_ = true;
      } else if (parse_u64(value, "exponent") != 0) {
        throw std::invalid_argument("default exponent must be 0 or inf");
      }
      continue;
    }
    const Prime p = parse_u64(key, "prime");
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
    if (q.exponents_.count(p)) throw std::invalid_argument("duplicate prime " + std::to_string(p));
    q.exponents_[p] = inf ? Exponent{} : Exponent{parse_u64(value, "exponent")};
  }
  return q;
}

SupernaturalNumber::Exponent SupernaturalNumber::exponent(Prime p) const {
  if (auto it = exponents_.find(p); it != exponents_.end()) return it->second;
  if (default_infinite_) return Exponent{};
  return Exponent{0};
}

bool SupernaturalNumber::has_infinitely_many_factors() const {
  if (default_infinite_) return true;
  return std::any_of(exponents_.begin(), exponents_.end(),
                     [](const auto& kv) { return !kv.second.has_value(); });
}

std::string SupernaturalNumber::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, e] : exponents_) {
    if (!first) os << ',';
    first = false;
    os << p << ':';
    if (e) {
      os << *e;
    } else {
      os << "inf";
    }
  }
  if (default_infinite_) os << (first ? "" : ",") << "*:inf";
  return os.str();
}

// ---------------------------------------------------------------------------
// FactorStream

FactorStream::FactorStream(SupernaturalNumber q, EnumerationPolicy policy)
    : q_(std::move(q)), prefix_(std::move(policy.prefix)) {
  if (policy.require_infinite && !q_.has_infinitely_many_factors()) {
    throw std::invalid_argument("supernatural number " + q_.to_string() +
                                " has finitely many prime factors");
  }
  std::map<Prime, std::uint64_t> prefix_use;
  for (Prime p : prefix_) {
    const auto e = q_.exponent(p);
    ++prefix_use[p];
    if (e && prefix_use[p] > *e) {
      throw std::invalid_argument("factor prefix uses " + std::to_string(p) +
                                  " more often than q allows");
    }
  }
  for (const auto& [p, e] : q_.explicit_exponents()) {
    if (!e) continue;
    const std::uint64_t used = prefix_use.count(p) ? prefix_use[p] : 0;
    for (std::uint64_t i = used; i < *e; ++i) finite_queue_.push_back(p);
  }
}

bool FactorStream::available(Prime p) const {
  const auto e = q_.exponent(p);
  if (!e) return true;
  const auto it = consumed_.find(p);
  return (it == consumed_.end() ? 0 : it->second) < *e;
}

void FactorStream::refill_round() {
  ++round_index_;
  std::set<Prime> primes;
  for (const auto& [p, e] : q_.explicit_exponents()) {
    if (!e) primes.insert(p);
  }
  if (q_.default_infinite()) {
    for (std::size_t k = 0; k < round_index_; ++k) {
      const Prime p = nth_prime(k);
      if (!q_.exponent(p)) primes.insert(p);
    }
  }
  round_.assign(primes.begin(), primes.end());
  round_pos_ = 0;
}

std::optional<Prime> FactorStream::next_unprefixed() {
  if (finite_pos_ < finite_queue_.size()) return finite_queue_[finite_pos_++];
  if (!q_.has_infinitely_many_factors()) return std::nullopt;
  while (round_pos_ >= round_.size()) refill_round();
  return round_[round_pos_++];
}

std::optional<Prime> FactorStream::next() {
  std::optional<Prime> p;
  if (prefix_pos_ < prefix_.size()) {
    p = prefix_[prefix_pos_++];
  } else {
    p = next_unprefixed();
  }
  if (!p) return p;
  if (!available(*p)) {
    throw std::logic_error("FactorStream would over-consume prime " + std::to_string(*p));
  }
  ++consumed_[*p];
  ++consumed_count_;
  return p;
}

FactorStream make_stream(const SupernaturalNumber& q, const EnumerationPolicy& policy) {
  return FactorStream(q, policy);
}

// ---------------------------------------------------------------------------
// OdometerSystem

OdometerSystem::OdometerSystem(std::vector<Level> moduli) : moduli_{1} {
  if (moduli.empty() || moduli.front() != 1) {
    throw std::invalid_argument("OdometerSystem: moduli must start with d_0 = 1");
  }
  for (std::size_t i = 1; i < moduli.size(); ++i) push(moduli[i]);
}

Level OdometerSystem::modulus(int m) const {
  if (m < 0 || m > depth()) {
    throw std::out_of_range("depth " + std::to_string(m) + " exceeds system depth " +
                            std::to_string(depth()));
  }
  return moduli_[static_cast<std::size_t>(m)];
}

Level OdometerSystem::quotient(int n) const { return modulus(n) / modulus(n - 1); }

std::vector<Level> OdometerSystem::radices() const {
  std::vector<Level> r;
  for (int n = 1; n <= depth(); ++n) r.push_back(quotient(n));
  return r;
}

void OdometerSystem::push(Level next_modulus) {
  const Level prev = moduli_.back();
  if (next_modulus % prev != 0 || next_modulus / prev <= 2) {
    throw std::invalid_argument("OdometerSystem: quotient " + std::to_string(next_modulus) + "/" +
                                std::to_string(prev) + " is not an integer greater than 2");
  }
  moduli_.push_back(next_modulus);
}

LevelSet OdometerSystem::tower_levels(int m) const { return LevelSet::full(m, modulus(m)); }

LevelSet OdometerSystem::lift(const LevelSet& s, int target_depth) const {
  if (s.modulus() != modulus(s.depth())) {
    throw std::invalid_argument("lift: level set modulus does not match the system");
  }
  return oel::lift(s, target_depth, modulus(target_depth));
}

std::vector<Level> OdometerSystem::digits(Level index) const {
  const Level top = moduli_.back();
  if (index < 0 || index >= top) {
    throw std::out_of_range("digits: index " + std::to_string(index) + " outside [0, " +
                            std::to_string(top) + ")");
  }
  std::vector<Level> out;
  out.reserve(moduli_.size() - 1);
  for (int n = 1; n <= depth(); ++n) {
    const Level q = quotient(n);
    out.push_back(index % q);
    index /= q;
  }
  return out;
}

Level OdometerSystem::from_digits(const std::vector<Level>& digits) const {
  if (static_cast<int>(digits.size()) != depth()) {
    throw std::invalid_argument("from_digits: wrong number of digits");
  }
  Level value = 0;
  for (int n = depth(); n >= 1; --n) {
    const Level d = digits[static_cast<std::size_t>(n - 1)];
    if (d < 0 || d >= quotient(n)) throw std::out_of_range("from_digits: digit out of range");
    value = value * quotient(n) + d;
  }
  return value;
}

// ---------------------------------------------------------------------------

LevelSet lift(const LevelSet& s, int target_depth, Level target_modulus) {
  if (target_depth < s.depth() || target_modulus % s.modulus() != 0) {
    throw std::invalid_argument("lift: target depth " + std::to_string(target_depth) +
                                " is not a refinement of depth " + std::to_string(s.depth()));
  }
  const Level step = s.modulus();
  const Level copies = target_modulus / step;
  std::vector<Level> out;
  out.reserve(s.size() * static_cast<std::size_t>(copies));
  for (Level j = 0; j < copies; ++j) {
    for (Level k : s.members()) out.push_back(k + j * step);
  }
  return LevelSet(target_depth, target_modulus, std::move(out));
}

LevelSet project(const LevelSet& s, int target_depth, Level target_modulus) {
  if (target_depth > s.depth() || s.modulus() % target_modulus != 0) {
    throw std::invalid_argument("project: target depth is not coarser");
  }
  const Level copies = s.modulus() / target_modulus;
  std::vector<Level> count(static_cast<std::size_t>(target_modulus), 0);
  for (Level x : s.members()) ++count[static_cast<std::size_t>(x % target_modulus)];
  std::vector<Level> out;
  for (Level k = 0; k < target_modulus; ++k) {
    const Level c = count[static_cast<std::size_t>(k)];
    if (c == copies) {
      out.push_back(k);
    } else if (c != 0) {
      throw std::invalid_argument("project: level " + std::to_string(k) +
                                  " is only partially covered");
    }
  }
  return LevelSet(target_depth, target_modulus, std::move(out));
}

LevelSet apply_T(const LevelSet& s, std::int64_t power) {
  const Level d = s.modulus();
  std::vector<Level> out;
  out.reserve(s.size());
  for (Level i : s.members()) out.push_back((((i - power) % d) + d) % d);
  return LevelSet(s.depth(), d, std::move(out));
}

}  // namespace oel
