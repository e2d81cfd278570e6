#include <cmath>

#include "doctest.h"
#include "oel/errors.hpp"
#include "oel/remark.hpp"

using namespace oel;

namespace {

// Closed form: carrying N threes flips the low N bits of both coordinates
// from 1 to 0, then the digit j -> j + 1 changes (a, b) at bit N.
Z2 closed_form(int N, int j) {
  const std::int64_t low = (std::int64_t{1} << N) - 1;
  const std::int64_t top = std::int64_t{1} << N;
  static const int da[3] = {0, 1, 0};
  static const int db[3] = {1, -1, 1};
  return {-low + da[j] * top, -low + db[j] * top};
}

// sum_{n=1}^{N} n x^n by direct summation.
double direct_series(double x, int N) {
  double s = 0;
  for (int n = 1; n <= N; ++n) s += n * std::pow(x, n);
  return s;
}

}  // namespace

TEST_CASE("sigma pairs bits with base-4 digits") {
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) CHECK(sigma_inverse(sigma(a, b)) == std::make_pair(a, b));
  }
  CHECK(sigma(1, 0) == 2);
  CHECK_THROWS(sigma(2, 0));
  CHECK_THROWS(sigma_inverse(4));
  CHECK(phi({1, 0, 1}, {1, 1, 0}) == std::vector<int>{3, 1, 2});
  CHECK(phi_inverse({3, 1, 2}) == std::make_pair(std::vector<int>{1, 0, 1}, std::vector<int>{1, 1, 0}));
  CHECK(phi_bijection_check(5).pass);
}

TEST_CASE("atom cocycles at N = 0 are (0,1), (1,-1), (0,1)") {
  CHECK(cocycle_Z_generator(0, 0) == Z2{0, 1});
  CHECK(cocycle_Z_generator(0, 1) == Z2{1, -1});
  CHECK(cocycle_Z_generator(0, 2) == Z2{0, 1});
}

TEST_CASE("atom cocycles follow the carry closed form") {
  for (int N = 0; N <= 12; ++N) {
    for (int j = 0; j < 3; ++j) {
      INFO("N=" << N << " j=" << j);
      CHECK(cocycle_Z_generator(N, j) == closed_form(N, j));
    }
  }
  CHECK_THROWS(cocycle_Z_generator(0, 3));
}

TEST_CASE("H(Q) converges to (8/3) ln 2") {
  const auto q = entropy_Q(20);
  CHECK(q.atoms.size() == 60);
  CHECK(q.limit == doctest::Approx(1.848392481493187).epsilon(1e-14));
  CHECK(std::abs(q.partial - q.limit) < 1e-6);
  // Tail from the closed form of sum n x^n against direct summation far out.
  const double x = 0.25;
  const double direct_tail = 3 * std::log(4.0) * (direct_series(x, 200) - direct_series(x, 20));
  CHECK(q.tail == doctest::Approx(direct_tail).epsilon(1e-9));
  CHECK(q.partial + q.tail == doctest::Approx(q.limit).epsilon(1e-12));
  // Each atom of carry N has mass 4^{-(N+1)}.
  for (const auto& a : q.atoms) CHECK(a.mass == Rational(BigInt(1), pow(BigInt(4), static_cast<unsigned>(a.carry + 1))));
}

TEST_CASE("merging equal cocycle values lowers the entropy to 2 ln 2 in the limit") {
  const auto q = entropy_Q(20);
  CHECK(q.coarse_partial <= q.partial);
  CHECK(q.coarse_partial == doctest::Approx(2 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("Z^2 generators move by 2(2*4^N+1)/3 and (2*4^N+1)/3") {
  const auto [u, v] = cocycle_Z2_generators(10);
  for (int N = 0; N < 10; ++N) {
    const std::int64_t base = (2 * (std::int64_t{1} << (2 * N)) + 1) / 3;
    CHECK(u.rows[static_cast<std::size_t>(N)].displacement == 2 * base);
    CHECK(v.rows[static_cast<std::size_t>(N)].displacement == base);
  }
  const double direct_tail = std::log(2.0) * (direct_series(0.5, 200) - direct_series(0.5, 10));
  CHECK(u.tail == doctest::Approx(direct_tail).epsilon(1e-9));
  CHECK(std::isfinite(u.partial));
  CHECK(u.partial + u.tail == doctest::Approx(u.limit).epsilon(1e-12));
  CHECK(v.partial + v.tail == doctest::Approx(v.limit).epsilon(1e-12));
}

TEST_CASE("cocycle identity for T_4^2") {
  for (int depth = 1; depth <= 6; ++depth) CHECK(cocycle_identity_check(depth).pass);
}
