#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <vector>

#include "kfsum/counting.hpp"
#include "kfsum/errors.hpp"

using namespace kfsum;

namespace {

std::uint64_t slow_inverse(std::uint64_t n, std::uint64_t q) {
  for (std::uint64_t c = 1; c < q; ++c) {
    if (n * c % q == 1) return c;
  }
  return 0;
}

bool slow_squarefull(std::uint64_t n) {
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    if (n % (d * d) != 0) return false;
    while (n % d == 0) n /= d;
  }
  return n == 1;
}

// Direct count of 1/a + 1/b = 1/c + 1/d over [1, N]^4.
std::uint64_t slow_unitfrac2(std::uint64_t N) {
  std::uint64_t c = 0;
  for (std::uint64_t a = 1; a <= N; ++a)
    for (std::uint64_t b = 1; b <= N; ++b)
      for (std::uint64_t x = 1; x <= N; ++x)
        for (std::uint64_t y = 1; y <= N; ++y) c += (a + b) * x * y == (x + y) * a * b;
  return c;
}

}  // namespace

TEST_CASE("unit fraction equation") {
  for (std::uint64_t N = 0; N <= 12; ++N) {
    CHECK(count_unit_fraction_solutions(1, N, CountMethod::convolution).count == N);
    CHECK(count_unit_fraction_solutions(1, N, CountMethod::naive).count == N);
  }
  CHECK(count_unit_fraction_solutions(2, 2, CountMethod::convolution).count == 6);
  CHECK(count_unit_fraction_solutions(2, 2, CountMethod::naive).count == 6);
  for (std::uint64_t N = 1; N <= 14; ++N) {
    const auto oracle = slow_unitfrac2(N);
    CHECK(count_unit_fraction_solutions(2, N, CountMethod::convolution).count == oracle);
    CHECK(count_unit_fraction_solutions(2, N, CountMethod::naive).count == oracle);
  }
  CHECK(count_unit_fraction_solutions(2, 30, CountMethod::naive).count ==
        count_unit_fraction_solutions(2, 30, CountMethod::convolution).count);
  CHECK(count_unit_fraction_solutions(3, 8, CountMethod::naive).count ==
        count_unit_fraction_solutions(3, 8, CountMethod::convolution).count);
  CHECK_THROWS_AS(count_unit_fraction_solutions(4, 2, CountMethod::naive), ParameterError);
  CHECK_THROWS_AS(count_unit_fraction_solutions(3, 1000, CountMethod::convolution),
                  CapacityError);
}

TEST_CASE("square-full counts") {
  CHECK(count_squarefull(0) == 0);
  CHECK(count_squarefull(1) == 1);
  CHECK(count_squarefull(100) == 14);
  std::uint64_t running = 0;
  for (std::uint64_t n = 1; n <= 20'000; ++n) {
    running += slow_squarefull(n);
    if (n % 97 == 0 || n == 20'000) CHECK(count_squarefull(n) == running);
  }
  const auto big = count_squarefull(1'000'000);
  CHECK(big <= 3000);
  std::uint64_t sieve = 0;
  for (std::uint64_t n = 1; n <= 1'000'000; ++n) sieve += slow_squarefull(n);
  CHECK(big == sieve);
}

TEST_CASE("congruence counts") {
  CHECK(count_congruence_solutions({1, 2, 3}).count == 2);
  CHECK(count_congruence_solutions({1, 2, 2}).count == 1);
  CHECK_THROWS_AS(count_congruence_solutions({5, 2, 3}), ParameterError);
  CHECK_THROWS_AS(count_congruence_solutions({1, 2, 1}), ParameterError);
  for (std::uint64_t q = 2; q <= 30; ++q) {
    for (std::uint64_t M = 1; M <= 12; ++M) {
      std::vector<std::uint64_t> inv;
      for (std::uint64_t m = 1; m <= M; ++m) {
        if (std::gcd(m, q) == 1) inv.push_back(slow_inverse(m, q));
      }
      std::uint64_t j1 = 0, j2 = 0;
      for (const auto a : inv)
        for (const auto b : inv) j1 += a == b;
      for (const auto a : inv)
        for (const auto b : inv)
          for (const auto c : inv)
            for (const auto d : inv) j2 += (a + b) % q == (c + d) % q;
      CHECK(count_congruence_solutions({1, M, q}).count == j1);
      CHECK(count_congruence_solutions({2, M, q}).count == j2);
      CHECK(count_congruence_solutions({2, M, q}, CountMethod::naive).count == j2);
      const auto m_prime = static_cast<std::uint64_t>(inv.size());
      CHECK(count_congruence_solutions({2, M, q}).count >= m_prime * m_prime);
    }
  }
  // sparse path
  const std::uint64_t q = 20'000'003;
  CHECK(count_congruence_solutions({2, 40, q}).count ==
        count_congruence_solutions({2, 40, q}, CountMethod::naive).count);
  CHECK(count_congruence_solutions({3, 12, 101}).count ==
        count_congruence_solutions({3, 12, 101}, CountMethod::naive).count);
}

TEST_CASE("averaged congruence counts") {
  const auto r1 = sum_congruence_counts(2, 1, 32);
  CHECK(*r1.exact_lhs == 32);
  const auto r = sum_congruence_counts(2, 8, 32);
  u128 oracle = 0;
  for (std::uint64_t q = 32; q < 64; ++q) {
    oracle += count_congruence_solutions({2, 8, q}, CountMethod::naive).count;
  }
  CHECK(*r.exact_lhs == oracle);
  CHECK(r.lhs == static_cast<double>(oracle));
  CHECK(r.rhs_total() == doctest::Approx(32.0 * 64 + 4096));
  CHECK(r.ratio <= 20.0);
  CHECK(sum_congruence_counts(2, 8, 32, {4}).lhs == r.lhs);
}

TEST_CASE("tuple classification") {
  const std::vector<std::uint64_t> same{1, 1};
  CHECK(classify_tuple(same).kind == TupleClass::Kind::rational_identity);
  const std::vector<std::uint64_t> one_two{1, 2};
  const auto c = classify_tuple(one_two);
  CHECK(c.kind == TupleClass::Kind::nonzero_F);
  CHECK(c.F == 1);
  const std::vector<std::uint64_t> swap{2, 3, 3, 2};
  CHECK(classify_tuple(swap).kind == TupleClass::Kind::rational_identity);
  const std::vector<std::uint64_t> bad{1, 2, 3};
  CHECK_THROWS_AS(classify_tuple(bad), ParameterError);

  // Every congruence solution at q = 7 either is a rational identity or has 7 | F.
  const std::uint64_t q = 7;
  bool witness = false;
  for (std::uint64_t a = 1; a <= 6; ++a) {
    for (std::uint64_t b = 1; b <= 6; ++b) {
      if (slow_inverse(a, q) != slow_inverse(b, q)) continue;
      const std::vector<std::uint64_t> m{a, b};
      const auto t = classify_tuple(m);
      if (t.kind == TupleClass::Kind::nonzero_F) {
        witness = true;
        CHECK(t.F % 7 == 0);
      }
    }
  }
  // k = 2 has genuine witnesses with q | F.
  for (std::uint64_t a = 1; a <= 6; ++a)
    for (std::uint64_t b = 1; b <= 6; ++b)
      for (std::uint64_t c2 = 1; c2 <= 6; ++c2)
        for (std::uint64_t d = 1; d <= 6; ++d) {
          if ((slow_inverse(a, q) + slow_inverse(b, q)) % q !=
              (slow_inverse(c2, q) + slow_inverse(d, q)) % q)
            continue;
          const std::vector<std::uint64_t> m{a, b, c2, d};
          const auto t = classify_tuple(m);
          if (t.kind == TupleClass::Kind::nonzero_F) {
            witness = true;
            CHECK(t.F % 7 == 0);
          }
        }
  CHECK(witness);
}
