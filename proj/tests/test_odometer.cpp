#include <set>

#include "doctest.h"
#include "oel/odometer.hpp"

using namespace oel;

namespace {

std::vector<Prime> take(FactorStream& s, int n) {
  std::vector<Prime> out;
  for (int i = 0; i < n; ++i) {
    auto p = s.next();
    if (!p) break;
    out.push_back(*p);
  }
  return out;
}

// Trial division, independent of the library's sieve.
bool slow_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t k = 2; k < n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("primes and factorisation") {
  for (std::uint64_t n = 0; n < 300; ++n) CHECK(is_prime(n) == slow_prime(n));
  CHECK(nth_prime(0) == 2);
  CHECK(nth_prime(4) == 11);
  CHECK(factorize(132) == std::vector<Prime>{2, 2, 3, 11});
  CHECK(factorize(1).empty());
}

TEST_CASE("supernatural numbers parse and print") {
  const auto q = SupernaturalNumber::parse("2:inf,3:inf,5:4");
  CHECK_FALSE(q.exponent(2).has_value());
  CHECK(q.exponent(5) == 4u);
  CHECK(q.exponent(7) == 0u);
  CHECK(q.has_infinitely_many_factors());
  CHECK_FALSE(SupernaturalNumber::parse("2:3,5:1").has_infinitely_many_factors());
  const auto universal = SupernaturalNumber::parse("*:inf");
  CHECK(universal.default_infinite());
  CHECK_FALSE(universal.exponent(101).has_value());
  CHECK(SupernaturalNumber::parse(q.to_string()).to_string() == q.to_string());
  CHECK_THROWS(SupernaturalNumber::parse("4:inf"));
  CHECK_THROWS(SupernaturalNumber::parse("2"));
}

TEST_CASE("factor stream: finite exponents first, then rounds over infinite primes") {
  FactorStream s(SupernaturalNumber::parse("2:2,3:inf"));
  CHECK(take(s, 5) == std::vector<Prime>{2, 2, 3, 3, 3});

  FactorStream diag(SupernaturalNumber::parse("*:inf"));
  CHECK(take(diag, 6) == std::vector<Prime>{2, 2, 3, 2, 3, 5});

  EnumerationPolicy pol;
  pol.prefix = {2, 2, 3, 11};
  FactorStream worked(SupernaturalNumber::parse("2:inf,3:inf,5:inf,7:inf,11:inf"), pol);
  CHECK(take(worked, 6) == std::vector<Prime>{2, 2, 3, 11, 2, 3});
}

TEST_CASE("factor stream rejects unusable inputs and runs dry on finite q") {
  CHECK_THROWS(FactorStream(SupernaturalNumber::parse("2:3")));
  EnumerationPolicy lenient;
  lenient.require_infinite = false;
  FactorStream s(SupernaturalNumber::parse("2:2,3:1"), lenient);
  CHECK(take(s, 10) == std::vector<Prime>{2, 2, 3});
  CHECK_FALSE(s.next().has_value());

  EnumerationPolicy bad;
  bad.prefix = {5};
  CHECK_THROWS(FactorStream(SupernaturalNumber::parse("2:inf"), bad));
}

TEST_CASE("mixed-radix digits round trip") {
  const OdometerSystem sys({1, 12, 132});
  CHECK(sys.digits(25) == std::vector<Level>{1, 2});
  CHECK(sys.radices() == std::vector<Level>{12, 11});
  for (Level x = 0; x < 132; ++x) CHECK(sys.from_digits(sys.digits(x)) == x);
  CHECK_THROWS(sys.digits(132));
  CHECK_THROWS(OdometerSystem({1, 12, 18}));
  CHECK_THROWS(OdometerSystem({1, 2}));
}

TEST_CASE("lift and project are inverse on whole fibres") {
  const OdometerSystem sys({1, 12, 132});
  const LevelSet s(1, 12, {3, 10});
  const auto up = sys.lift(s, 2);
  CHECK(up.size() == 22);
  CHECK(up.measure() == s.measure());
  for (Level x : up.members()) CHECK(s.contains(x % 12));
  CHECK(project(up, 1, 12) == s);
  CHECK_THROWS(project(LevelSet(2, 132, {3}), 1, 12));
}

TEST_CASE("T commutes with lifting") {
  const OdometerSystem sys({1, 12, 132});
  const LevelSet s(1, 12, {0, 5, 11});
  for (std::int64_t k : {-13, -1, 1, 7, 12}) {
    CHECK(sys.lift(apply_T(s, k), 2) == apply_T(sys.lift(s, 2), k));
  }
  // T sends level i to i - 1.
  CHECK(apply_T(LevelSet(1, 12, {0}), 1).members() == std::vector<Level>{11});
}
