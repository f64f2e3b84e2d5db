#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "kfsum/arith.hpp"
#include "kfsum/errors.hpp"

using namespace kfsum;

namespace {

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t trial_lpf(std::uint64_t n) {
  std::uint64_t best = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      best = d;
      n /= d;
    }
  }
  return n > 1 ? n : best;
}

int trial_mobius(std::uint64_t n) {
  int mu = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    n /= d;
    if (n % d == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

}  // namespace

TEST_CASE("sieve small cases") {
  const PrimeTable t(10);
  const auto p = t.primes();
  CHECK(std::vector<std::uint32_t>(p.begin(), p.end()) == std::vector<std::uint32_t>{2, 3, 5, 7});
  const PrimeTable two(2);
  CHECK(two.primes().size() == 1);
  CHECK(two.primes()[0] == 2);
}

TEST_CASE("pi(10^6) against trial division") {
  const PrimeTable t(1'000'000);
  std::uint64_t oracle = 0;
  for (std::uint64_t n = 2; n <= 1'000'000; ++n) oracle += trial_prime(n);
  CHECK(oracle == 78498);
  CHECK(t.pi(1'000'000) == oracle);
  CHECK(t.primes().size() == oracle);
}

TEST_CASE("sieve agrees with Miller-Rabin and trial division") {
  const PrimeTable t(20'000);
  for (std::uint64_t n = 0; n <= 20'000; ++n) {
    CHECK(t.is_prime(n) == trial_prime(n));
    CHECK(is_prime_u64(n) == trial_prime(n));
  }
  CHECK(is_prime_u64(18446744073709551557ULL));
  CHECK_FALSE(is_prime_u64(3215031751ULL));  // strong pseudoprime to 2,3,5,7
  CHECK_FALSE(is_prime_u64(4294967297ULL));
}

TEST_CASE("sieve capacity") {
  CHECK_THROWS_AS(PrimeTable(1), CapacityError);
  CHECK_THROWS_AS(PrimeTable(kMaxSieveLimit + 1), CapacityError);
  const PrimeTable t(100);
  CHECK_NOTHROW(t.require_covers(101));
  CHECK_THROWS_AS(t.require_covers(102), CapacityError);
}

TEST_CASE("memory budget from the environment") {
  setenv("KFSUM_MAX_MEMORY_BYTES", "1000", 1);
  CHECK(memory_budget_bytes() == 1000);
  CHECK_THROWS_AS(PrimeTable(100'000), CapacityError);
  setenv("KFSUM_MAX_MEMORY_BYTES", "lots", 1);
  CHECK_THROWS_AS(memory_budget_bytes(), ParameterError);
  unsetenv("KFSUM_MAX_MEMORY_BYTES");
  CHECK(memory_budget_bytes() == (std::uint64_t{4} << 30));
}

TEST_CASE("mobius and von Mangoldt tables") {
  const NumberTables t(5000);
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    CHECK(t.mult.mobius(n) == trial_mobius(n));
    double lambda = 0.0;
    const std::uint64_t p = trial_lpf(n);
    std::uint64_t m = n;
    while (p > 1 && m % p == 0) m /= p;
    if (n > 1 && m == 1) lambda = std::log(static_cast<double>(p));
    CHECK(t.mult.von_mangoldt(n) == doctest::Approx(lambda).epsilon(1e-15));
  }
  CHECK(t.mult.prime_power(8).p == 2);
  CHECK(t.mult.prime_power(8).alpha == 3);
  CHECK(t.mult.prime_power(12).p == 0);
}

TEST_CASE("divisor_count") {
  const PrimeTable t(1000);
  for (std::uint64_t n = 1; n <= 300; ++n) {
    std::uint64_t d2 = 0, d3 = 0;
    for (std::uint64_t a = 1; a <= n; ++a) {
      if (n % a != 0) continue;
      ++d2;
      for (std::uint64_t b = 1; b <= n / a; ++b) d3 += (n / a) % b == 0;
    }
    CHECK(divisor_count(n, 2, t) == d2);
    CHECK(divisor_count(n, 3, t) == d3);
    CHECK(divisor_count(n, 1, t) == 1);
  }
}

TEST_CASE("mod_inverse") {
  CHECK(mod_inverse(2, 5) == 3);
  for (std::uint64_t q = 2; q < 40; ++q) CHECK(mod_inverse(1, q) == 1);
  try {
    mod_inverse(3, 6);
    FAIL("expected NotInvertible");
  } catch (const NotInvertible& e) {
    CHECK(e.gcd() == 3);
  }
  CHECK(mod_inverse(-2, 5) == 2);
  CHECK_THROWS_AS(mod_inverse(1, 1), ParameterError);
  for (std::uint64_t q = 2; q < 60; ++q) {
    for (std::int64_t n = 0; n < static_cast<std::int64_t>(q); ++n) {
      if (std::gcd(static_cast<std::uint64_t>(n), q) != 1) {
        CHECK_THROWS_AS(mod_inverse(n, q), NotInvertible);
        continue;
      }
      std::uint64_t found = 0;
      for (std::uint64_t c = 1; c < q; ++c) {
        if (static_cast<std::uint64_t>(n) * c % q == 1) found = c;
      }
      CHECK(mod_inverse(n, q) == found);
    }
  }
  const std::uint64_t big = 18446744073709551557ULL;
  CHECK(mulmod(mod_inverse(123456789, big), 123456789, big) == 1);
}

TEST_CASE("batch_inverses") {
  const std::vector<std::int64_t> v{1, 2, 3, 4};
  const auto r = batch_inverses(v, 5);
  REQUIRE(r.size() == 4);
  CHECK(*r[0] == 1);
  CHECK(*r[1] == 3);
  CHECK(*r[2] == 2);
  CHECK(*r[3] == 4);
  CHECK(batch_inverses(std::vector<std::int64_t>{}, 7).empty());
  const auto flags = batch_inverses(std::vector<std::int64_t>{5, 10}, 5);
  CHECK_FALSE(flags[0].has_value());
  CHECK_FALSE(flags[1].has_value());
  std::vector<std::int64_t> many;
  for (std::int64_t n = -50; n < 400; ++n) many.push_back(n);
  for (const std::uint64_t q : {12ULL, 97ULL, 360ULL, 1009ULL}) {
    const auto inv = batch_inverses(many, q);
    for (std::size_t i = 0; i < many.size(); ++i) {
      if (std::gcd(reduce_mod(many[i], q), q) == 1) {
        CHECK(inv[i] == mod_inverse(many[i], q));
      } else {
        CHECK_FALSE(inv[i].has_value());
      }
    }
  }
}

TEST_CASE("squarefull and squarefree") {
  CHECK(is_squarefull(72));
  CHECK_FALSE(is_squarefull(50));
  CHECK(is_squarefull(1));
  CHECK(is_squarefree(30));
  CHECK_FALSE(is_squarefree(18));
}

TEST_CASE("largest prime factor") {
  const auto table = largest_prime_factor_table(10'000);
  const PrimeTable t(200);
  CHECK(table[12] == 3);
  for (std::uint64_t n = 2; n <= 10'000; ++n) {
    CHECK(table[n] == trial_lpf(n));
    CHECK(largest_prime_factor(n, t.primes()) == trial_lpf(n));
  }
  for (std::uint64_t p : {2ULL, 97ULL, 9973ULL}) CHECK(table[p] == p);
  CHECK(largest_prime_factor(1'000'003ULL * 999'983ULL, PrimeTable(1'000'003).primes()) ==
        1'000'003);
  CHECK_THROWS_AS(largest_prime_factor(1'000'003ULL * 999'983ULL, t.primes()), CapacityError);
}

TEST_CASE("ranges and integer roots") {
  CHECK(dyadic_range(3.0).lo == 3);
  CHECK(dyadic_range(3.0).hi == 6);
  CHECK(dyadic_range(2.5).lo == 3);
  CHECK(dyadic_range(2.5).hi == 5);
  for (std::uint64_t n = 0; n < 5000; ++n) {
    const auto r = isqrt(n);
    CHECK(r * r <= n);
    CHECK((r + 1) * (r + 1) > n);
    const auto c = icbrt(n);
    CHECK(c * c * c <= n);
    CHECK((c + 1) * (c + 1) * (c + 1) > n);
  }
  CHECK(isqrt(UINT64_MAX) == 4294967295ULL);
  CHECK(icbrt(1'000'000'000'000'000'000ULL) == 1'000'000);
}
