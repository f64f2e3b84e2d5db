#pragma once

// Integer and multiplicative-function infrastructure: sieves, modular
// inverses, Mobius and von Mangoldt tables, square-full tests.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kfsum/int128.hpp"

namespace kfsum {

/// Largest sieve limit accepted by sieve_primes.
inline constexpr std::uint64_t kMaxSieveLimit = 1'000'000'000;

/// Memory budget in bytes for tables. Read from the environment variable
/// KFSUM_MAX_MEMORY_BYTES when set, otherwise 4 GiB.
std::uint64_t memory_budget_bytes();

/// Half-open integer interval [lo, hi).
struct IntRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  std::uint64_t size() const { return hi > lo ? hi - lo : 0; }
  bool empty() const { return hi <= lo; }
  bool contains(std::uint64_t n) const { return lo <= n && n < hi; }
};

/// Integers n with x <= n < 2x.
IntRange dyadic_range(double x);

/// Integers n with lo <= n < hi for real endpoints (clamped at 0).
IntRange real_range(double lo, double hi);

struct PrimePower {
  std::uint32_t p = 0;  // 0 when n is not a prime power
  std::uint32_t alpha = 0;
};

class PrimeTable {
 public:
  explicit PrimeTable(std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint32_t> primes() const { return primes_; }

  /// Least prime dividing n, for 2 <= n <= limit.
  std::uint32_t smallest_factor(std::uint64_t n) const;
  bool is_prime(std::uint64_t n) const;
  /// Number of primes <= n (n may exceed the limit only if n < 2).
  std::uint64_t pi(std::uint64_t n) const;
  /// Primes in the half-open range, which must lie within the table.
  std::span<const std::uint32_t> primes_in(IntRange r) const;
  /// Prime factorization of 1 <= n <= limit, ascending primes.
  std::vector<PrimePower> factorize(std::uint64_t n) const;

  /// Throws CapacityError unless every n < hi is covered.
  void require_covers(std::uint64_t hi) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> spf_;
};

PrimeTable sieve_primes(std::uint64_t limit);

/// Mobius function and von Mangoldt function (stored as the prime-power
/// structure of n, with log p evaluated on request).
class MultiplicativeTables {
 public:
  explicit MultiplicativeTables(const PrimeTable& primes);

  std::uint64_t limit() const { return limit_; }
  int mobius(std::uint64_t n) const { return mobius_[n]; }
  PrimePower prime_power(std::uint64_t n) const { return prime_power_[n]; }
  double von_mangoldt(std::uint64_t n) const {
    const auto pp = prime_power_[n];
    return pp.p == 0 ? 0.0 : std::log(static_cast<double>(pp.p));
  }

 private:
  std::uint64_t limit_;
  std::vector<std::int8_t> mobius_;
  std::vector<PrimePower> prime_power_;
};

/// Sieved primes together with the multiplicative tables built from them.
struct NumberTables {
  explicit NumberTables(std::uint64_t limit) : primes(limit), mult(primes) {}

  PrimeTable primes;
  MultiplicativeTables mult;
};

/// Generalized divisor function tau_k(n) from the factorization of n.
u128 divisor_count(std::uint64_t n, unsigned k, const PrimeTable& primes);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t q);
/// n reduced to [0, q).
std::uint64_t reduce_mod(std::int64_t n, std::uint64_t q);

/// Inverse of n modulo q in [1, q-1] (0 when q == 1 is rejected).
/// Throws NotInvertible carrying gcd(n, q), ParameterError when q < 2.
std::uint64_t mod_inverse(std::int64_t n, std::uint64_t q);

/// Elementwise mod_inverse using one extended gcd for all coprime entries
/// (prefix-product trick). Entries sharing a factor with q are nullopt.
std::vector<std::optional<std::uint64_t>> batch_inverses(
    std::span<const std::int64_t> values, std::uint64_t q);

/// Deterministic Miller-Rabin, valid for all 64-bit n.
bool is_prime_u64(std::uint64_t n);

/// True iff p^2 | n for every prime p | n. is_squarefull(1) is true.
bool is_squarefull(std::uint64_t n);

bool is_squarefree(std::uint64_t n);

/// P+(n) for 0 <= n <= limit (entries 0 and 1 hold 1).
std::vector<std::uint32_t> largest_prime_factor_table(std::uint64_t limit);

/// P+(n) by trial division with the given ascending primes, which must reach
/// sqrt(n).
std::uint64_t largest_prime_factor(std::uint64_t n, std::span<const std::uint32_t> primes);

std::uint64_t isqrt(std::uint64_t n);
std::uint64_t icbrt(std::uint64_t n);

}  // namespace kfsum
