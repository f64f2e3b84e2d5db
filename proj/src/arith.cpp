#include "kfsum/arith.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "kfsum/errors.hpp"

namespace kfsum {

std::uint64_t memory_budget_bytes() {
  if (const char* env = std::getenv("KFSUM_MAX_MEMORY_BYTES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw ParameterError("KFSUM_MAX_MEMORY_BYTES must be a positive integer");
  }
  return 4ULL << 30;
}

IntRange dyadic_range(double x) { return real_range(x, 2.0 * x); }

IntRange real_range(double lo, double hi) {
  const double l = std::max(0.0, std::ceil(lo));
  const double h = std::max(l, std::ceil(hi));
  return {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(h)};
}

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
  if (limit < 2 || limit > kMaxSieveLimit) {
    throw CapacityError("sieve limit " + std::to_string(limit) + " outside [2, " +
                        std::to_string(kMaxSieveLimit) + "]");
  }
  // spf array plus the prime list (about n / ln n entries).
  const std::uint64_t bytes = (limit + 1) * 4 + (limit / 10 + 16) * 4;
  if (bytes > memory_budget_bytes()) {
    throw CapacityError("sieve limit " + std::to_string(limit) +
                        " exceeds the memory budget of " +
                        std::to_string(memory_budget_bytes()) + " bytes");
  }
  // Linear sieve: every composite is struck exactly once by its least prime.
  spf_.assign(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t s = spf_[i];
    for (const std::uint32_t p : primes_) {
      if (p > s || i * p > limit) break;
      spf_[i * p] = p;
    }
  }
}

std::uint32_t PrimeTable::smallest_factor(std::uint64_t n) const {
  if (n < 2 || n > limit_) throw CapacityError("smallest_factor: n outside table");
  return spf_[n];
}

bool PrimeTable::is_prime(std::uint64_t n) const {
  if (n > limit_) throw CapacityError("is_prime: n outside table");
  return n >= 2 && spf_[n] == n;
}

std::uint64_t PrimeTable::pi(std::uint64_t n) const {
  if (n > limit_) throw CapacityError("pi: n outside table");
  return static_cast<std::uint64_t>(
      std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

std::span<const std::uint32_t> PrimeTable::primes_in(IntRange r) const {
  if (r.empty()) return {};
  require_covers(r.hi);
  const auto first = std::lower_bound(primes_.begin(), primes_.end(), r.lo);
  const auto last = std::lower_bound(first, primes_.end(), r.hi);
  return {primes_.data() + (first - primes_.begin()), static_cast<std::size_t>(last - first)};
}

std::vector<PrimePower> PrimeTable::factorize(std::uint64_t n) const {
  if (n == 0 || n > limit_) throw CapacityError("factorize: n outside table");
  std::vector<PrimePower> out;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    std::uint32_t alpha = 0;
    while (n % p == 0) {
      n /= p;
      ++alpha;
    }
    out.push_back({p, alpha});
  }
  return out;
}

void PrimeTable::require_covers(std::uint64_t hi) const {
  if (hi > 0 && hi - 1 > limit_) {
    throw CapacityError("table limit " + std::to_string(limit_) + " does not cover " +
                        std::to_string(hi - 1));
  }
}

PrimeTable sieve_primes(std::uint64_t limit) { return PrimeTable(limit); }

MultiplicativeTables::MultiplicativeTables(const PrimeTable& primes)
    : limit_(primes.limit()), mobius_(limit_ + 1, 0), prime_power_(limit_ + 1) {
  mobius_[1] = 1;
  for (std::uint64_t n = 2; n <= limit_; ++n) {
    const std::uint32_t p = primes.smallest_factor(n);
    const std::uint64_t m = n / p;
    // n = p * m: mu(n) = -mu(m) unless p | m; n is a prime power iff m is 1
    // or m is a power of p.
    mobius_[n] = (m % p == 0) ? 0 : static_cast<std::int8_t>(-mobius_[m]);
    if (m == 1) {
      prime_power_[n] = {p, 1};
    } else if (prime_power_[m].p == p) {
      prime_power_[n] = {p, prime_power_[m].alpha + 1};
    }
  }
}

u128 divisor_count(std::uint64_t n, unsigned k, const PrimeTable& primes) {
  if (k == 0) throw ParameterError("divisor_count: k must be >= 1");
  u128 total = 1;
  for (const auto& [p, alpha] : primes.factorize(n)) {
    // binomial(alpha + k - 1, k - 1)
    u128 c = 1;
    for (unsigned i = 1; i < k; ++i) c = c * (alpha + i) / i;
    total *= c;
  }
  return total;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % q);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
  std::uint64_t result = 1 % q;
  base %= q;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, q);
    base = mulmod(base, base, q);
    exp >>= 1;
  }
  return result;
}

std::uint64_t reduce_mod(std::int64_t n, std::uint64_t q) {
  if (n >= 0) return static_cast<std::uint64_t>(n) % q;
  // -(n + 1) avoids overflow at INT64_MIN.
  const std::uint64_t r = (static_cast<std::uint64_t>(-(n + 1)) + 1) % q;
  return r == 0 ? 0 : q - r;
}

namespace {

// Inverse of a reduced residue r (0 <= r < q); nullopt when gcd(r, q) > 1.
std::optional<std::uint64_t> inverse_of_residue(std::uint64_t r, std::uint64_t q) {
  i128 old_r = r, cur_r = q;
  i128 old_s = 1, cur_s = 0;
  while (cur_r != 0) {
    const i128 quot = old_r / cur_r;
    i128 t = old_r - quot * cur_r;
    old_r = cur_r;
    cur_r = t;
    t = old_s - quot * cur_s;
    old_s = cur_s;
    cur_s = t;
  }
  if (old_r != 1) return std::nullopt;
  i128 s = old_s % static_cast<i128>(q);
  if (s < 0) s += q;
  return static_cast<std::uint64_t>(s);
}

}  // namespace

std::uint64_t mod_inverse(std::int64_t n, std::uint64_t q) {
  if (q < 2) throw ParameterError("mod_inverse: modulus must be >= 2");
  const std::uint64_t r = reduce_mod(n, q);
  if (auto inv = inverse_of_residue(r, q)) return *inv;
  throw NotInvertible(n, q, std::gcd(r, q));
}

std::vector<std::optional<std::uint64_t>> batch_inverses(
    std::span<const std::int64_t> values, std::uint64_t q) {
  if (q < 2) throw ParameterError("batch_inverses: modulus must be >= 2");
  std::vector<std::optional<std::uint64_t>> out(values.size());
  std::vector<std::uint64_t> residue(values.size());
  std::vector<std::uint64_t> prefix(values.size());
  std::uint64_t running = 1 % q;
  for (std::size_t i = 0; i < values.size(); ++i) {
    residue[i] = reduce_mod(values[i], q);
    prefix[i] = running;  // product of coprime entries before i
    if (std::gcd(residue[i], q) == 1) running = mulmod(running, residue[i], q);
  }
  auto inv = inverse_of_residue(running, q);
  if (!inv) throw InternalError("batch_inverses: product of units is not a unit");
  std::uint64_t suffix_inv = *inv;  // inverse of the product of entries [0, i]
  for (std::size_t i = values.size(); i-- > 0;) {
    if (std::gcd(residue[i], q) != 1) continue;
    out[i] = mulmod(suffix_inv, prefix[i], q);
    suffix_inv = mulmod(suffix_inv, residue[i], q);
  }
  return out;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (const std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (const std::uint64_t a : kBases) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_squarefull(std::uint64_t n) {
  if (n == 0) throw ParameterError("is_squarefull: n must be >= 1");
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p != 0) return false;
    while (n % p == 0) n /= p;
  }
  // Whatever remains is 1 or a prime dividing the original n exactly once.
  return n == 1;
}

bool is_squarefree(std::uint64_t n) {
  if (n == 0) throw ParameterError("is_squarefree: n must be >= 1");
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

std::vector<std::uint32_t> largest_prime_factor_table(std::uint64_t limit) {
  if (limit > kMaxSieveLimit || (limit + 1) * 4 > memory_budget_bytes()) {
    throw CapacityError("largest_prime_factor_table: limit " + std::to_string(limit) +
                        " exceeds capacity");
  }
  std::vector<std::uint32_t> lpf(limit + 1, 1);
  // Ascending p overwrites, so the last writer is the largest prime factor.
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (lpf[p] != 1) continue;
    for (std::uint64_t m = p; m <= limit; m += p) lpf[m] = static_cast<std::uint32_t>(p);
  }
  return lpf;
}

std::uint64_t largest_prime_factor(std::uint64_t n, std::span<const std::uint32_t> primes) {
  if (n < 2) return 1;
  std::uint64_t largest = 1;
  for (const std::uint64_t p : primes) {
    if (p * p > n) break;
    if (n % p != 0) continue;
    largest = p;
    while (n % p == 0) n /= p;
  }
  if (n > 1) {
    if (!primes.empty() && static_cast<u128>(primes.back()) * primes.back() < n &&
        !is_prime_u64(n)) {
      throw CapacityError("largest_prime_factor: trial primes do not reach sqrt(n)");
    }
    largest = std::max(largest, n);
  }
  return largest;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t icbrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  auto cube = [](std::uint64_t v) { return static_cast<u128>(v) * v * v; };
  while (r > 0 && cube(r) > n) --r;
  while (cube(r + 1) <= n) ++r;
  return r;
}

}  // namespace kfsum
