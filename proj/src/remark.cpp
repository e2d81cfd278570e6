#include "oel/remark.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "oel/errors.hpp"

namespace oel {

namespace {

constexpr int kMaxWorkingDigits = 30;

std::int64_t pow_int(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Signed representative of x mod 2^bits in [-2^{bits-1}, 2^{bits-1}).
std::int64_t signed_mod(std::int64_t x, int bits) {
  const std::int64_t mod = std::int64_t{1} << bits;
  std::int64_t r = ((x % mod) + mod) % mod;
  if (r >= mod / 2) r -= mod;
  return r;
}

// Binary coordinates of a base-4 integer: digit c = 2a + b.
std::pair<std::int64_t, std::int64_t> split_coordinates(std::int64_t x, int digits) {
  std::int64_t a = 0;
  std::int64_t b = 0;
  for (int i = 0; i < digits; ++i) {
    const int c = static_cast<int>(x & 3);
    x >>= 2;
    a |= static_cast<std::int64_t>(c >> 1) << i;
    b |= static_cast<std::int64_t>(c & 1) << i;
  }
  return {a, b};
}

std::int64_t join_coordinates(std::int64_t a, std::int64_t b, int digits) {
  std::int64_t x = 0;
  for (int i = 0; i < digits; ++i) {
    const std::int64_t c = 2 * ((a >> i) & 1) + ((b >> i) & 1);
    x |= c << (2 * i);
  }
  return x;
}

// Cocycle of T_4^power at x, read off modulo 2^digits.
Z2 simulate(std::int64_t x, int power, int digits) {
  const std::int64_t mod = std::int64_t{1} << (2 * digits);
  const auto [a0, b0] = split_coordinates(x, digits);
  const auto [a1, b1] = split_coordinates((x + power) % mod, digits);
  return {signed_mod(a1 - a0, digits), signed_mod(b1 - b0, digits)};
}

double series_tail(double x, int n) {
  // sum_{i > n} i x^i = x^{n+1} (n + 1 - n x) / (1 - x)^2
  return std::pow(x, n + 1) * (n + 1 - n * x) / ((1 - x) * (1 - x));
}

void require_depth(int digits) {
  if (digits < 1 || digits > kMaxWorkingDigits) {
    throw std::invalid_argument("working depth must lie in [1, " + std::to_string(kMaxWorkingDigits) +
                                "], got " + std::to_string(digits));
  }
}

}  // namespace

int sigma(int a, int b) {
  if ((a != 0 && a != 1) || (b != 0 && b != 1)) throw std::invalid_argument("sigma: bits expected");
  return 2 * a + b;
}

std::pair<int, int> sigma_inverse(int digit) {
  if (digit < 0 || digit > 3) throw std::invalid_argument("sigma_inverse: digit outside 0..3");
  return {digit >> 1, digit & 1};
}

std::vector<int> phi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("phi: coordinate lengths differ");
  std::vector<int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = sigma(a[i], b[i]);
  return out;
}

std::pair<std::vector<int>, std::vector<int>> phi_inverse(const std::vector<int>& digits) {
  std::vector<int> a(digits.size());
  std::vector<int> b(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) std::tie(a[i], b[i]) = sigma_inverse(digits[i]);
  return {a, b};
}

Z2 cocycle_Z_generator(int carry, int j, int extra_digits) {
  if (carry < 0 || j < 0 || j > 2 || extra_digits < 2) {
    throw std::invalid_argument("cocycle_Z_generator: need carry >= 0, j in 0..2, extra >= 2");
  }
  const int digits = carry + 1 + extra_digits;
  require_depth(digits);
  // Prefix: `carry` threes, then j; the remaining digits range freely.
  const std::int64_t prefix = (pow_int(4, carry) - 1) + static_cast<std::int64_t>(j) * pow_int(4, carry);
  const std::int64_t step = pow_int(4, carry + 1);
  const std::int64_t free_count = pow_int(4, extra_digits);
  Z2 value{};
  for (std::int64_t f = 0; f < free_count; ++f) {
    const Z2 v = simulate(prefix + f * step, 1, digits);
    if (f == 0) {
      value = v;
    } else if (!(v == value)) {
      throw InvariantError("cocycle not constant on atom (carry=" + std::to_string(carry) +
                           ", j=" + std::to_string(j) + ")");
    }
  }
  return value;
}

QEntropyReport entropy_Q(int n_max, int extra_digits) {
  if (n_max < 1) throw std::invalid_argument("entropy_Q needs n_max >= 1");
  QEntropyReport out;
  std::map<Z2, Rational> coarse;
  CompensatedSum partial;
  for (int carry = 0; carry < n_max; ++carry) {
    const Rational mass(BigInt(1), pow(BigInt(4), static_cast<unsigned>(carry + 1)));
    for (int j = 0; j < 3; ++j) {
      AtomRow row{carry, j, cocycle_Z_generator(carry, j, extra_digits), mass, entropy_term(mass)};
      partial.add(row.entropy);
      coarse[row.value] += mass;
      out.atoms.push_back(row);
    }
  }
  out.partial = partial.value();
  out.tail = 3.0 * std::log(4.0) * series_tail(0.25, n_max);
  out.limit = 8.0 / 3.0 * std::log(2.0);
  CompensatedSum coarse_sum;
  for (const auto& [v, mass] : coarse) coarse_sum.add(entropy_term(mass));
  out.coarse_partial = coarse_sum.value();
  return out;
}

std::pair<GeneratorReport, GeneratorReport> cocycle_Z2_generators(int depth, int extra_digits) {
  if (depth < 1) throw std::invalid_argument("cocycle_Z2_generators needs depth >= 1");
  GeneratorReport u{"u", {}, 0, 0, 2 * std::log(2.0)};
  GeneratorReport v{"v", {}, 0, 0, 2 * std::log(2.0)};
  std::mt19937_64 rng(0x5eed);
  constexpr std::int64_t kExhaustiveLimit = 4096;
  for (int carry = 0; carry < depth; ++carry) {
    const int digits = carry + 1 + extra_digits;
    require_depth(digits);
    const std::int64_t binary_mod = std::int64_t{1} << digits;
    const std::int64_t quad_mod = std::int64_t{1} << (2 * digits);
    // Advanced coordinate: `carry` ones then a zero, then free bits.
    const std::int64_t prefix = (std::int64_t{1} << carry) - 1;
    const std::int64_t free_high = std::int64_t{1} << extra_digits;
    const bool exhaustive = binary_mod <= kExhaustiveLimit;
    const std::int64_t other_count = exhaustive ? binary_mod : kExhaustiveLimit;
    std::int64_t du = 0;
    std::int64_t dv = 0;
    bool first = true;
    for (std::int64_t h = 0; h < free_high; ++h) {
      const std::int64_t advanced = prefix + (h << (carry + 1));
      for (std::int64_t o = 0; o < other_count; ++o) {
        const std::int64_t other = exhaustive ? o : static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(binary_mod));
        const std::int64_t next = (advanced + 1) % binary_mod;
        const std::int64_t x_u = join_coordinates(advanced, other, digits);
        const std::int64_t y_u = join_coordinates(next, other, digits);
        const std::int64_t x_v = join_coordinates(other, advanced, digits);
        const std::int64_t y_v = join_coordinates(other, next, digits);
        const std::int64_t su = signed_mod(((y_u - x_u) % quad_mod + quad_mod) % quad_mod, 2 * digits);
        const std::int64_t sv = signed_mod(((y_v - x_v) % quad_mod + quad_mod) % quad_mod, 2 * digits);
        if (first) {
          du = su;
          dv = sv;
          first = false;
        } else if (su != du || sv != dv) {
          throw InvariantError("generator cocycle not constant on carry length " + std::to_string(carry));
        }
      }
    }
    const Rational mass(BigInt(1), pow(BigInt(2), static_cast<unsigned>(carry + 1)));
    u.rows.push_back({carry, du, mass, entropy_term(mass)});
    v.rows.push_back({carry, dv, mass, entropy_term(mass)});
  }
  for (auto* report : {&u, &v}) {
    CompensatedSum s;
    for (const auto& row : report->rows) s.add(row.entropy);
    report->partial = s.value();
    report->tail = std::log(2.0) * series_tail(0.5, depth);
  }
  return {u, v};
}

Check cocycle_identity_check(int depth) {
  require_depth(depth);
  const std::int64_t mod = pow_int(4, depth);
  std::int64_t checked = 0;
  std::int64_t failures = 0;
  auto carry_of = [&](std::int64_t x) {
    int c = 0;
    while (c < depth && ((x >> (2 * c)) & 3) == 3) ++c;
    return c;
  };
  for (std::int64_t x = 0; x < mod; ++x) {
    const std::int64_t y = (x + 1) % mod;
    // Both steps need their carry to end inside the window.
    if (carry_of(x) >= depth || carry_of(y) >= depth) continue;
    ++checked;
    const int cx = carry_of(x);
    const int cy = carry_of(y);
    const Z2 kx = cocycle_Z_generator(cx, static_cast<int>((x >> (2 * cx)) & 3), 2);
    const Z2 ky = cocycle_Z_generator(cy, static_cast<int>((y >> (2 * cy)) & 3), 2);
    const Z2 direct = simulate(x, 2, depth);
    const Z2 composed{signed_mod(kx.m + ky.m, depth), signed_mod(kx.k + ky.k, depth)};
    if (!(direct == composed)) ++failures;
  }
  return Check{"cocycle-identity", "depth=" + std::to_string(depth), std::to_string(failures),
               "0 of " + std::to_string(checked), failures == 0, CheckKind::structural, true};
}

Check phi_bijection_check(int depth) {
  if (depth < 1 || depth > 10) throw std::invalid_argument("phi_bijection_check: depth in 1..10");
  const std::int64_t count = pow_int(4, depth);
  std::int64_t failures = 0;
  std::vector<int> digits(static_cast<std::size_t>(depth));
  for (std::int64_t x = 0; x < count; ++x) {
    std::int64_t y = x;
    for (auto& d : digits) {
      d = static_cast<int>(y & 3);
      y >>= 2;
    }
    const auto [a, b] = phi_inverse(digits);
    if (phi(a, b) != digits) ++failures;
  }
  // 2^depth * 2^depth pair cylinders against 4^depth digit cylinders, each of equal mass.
  const bool masses_agree = Rational(1, count) == Rational(1, pow_int(2, depth)) * Rational(1, pow_int(2, depth));
  return Check{"phi-bijection", "depth=" + std::to_string(depth), std::to_string(failures), "0",
               failures == 0 && masses_agree, CheckKind::structural, true};
}

}  // namespace oel
