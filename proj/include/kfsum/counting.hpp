#pragma once

// Exact solution counts for the unit-fraction equation
//   1/n_1 + ... + 1/n_k = 1/n_{k+1} + ... + 1/n_{2k},   0 < n_i <= N,
// and for the inverse congruence
//   m_1^-1 + ... + m_k^-1 = m_{k+1}^-1 + ... + m_{2k}^-1 (mod q),
// 1 <= m_i <= M, (m_i, q) = 1, whose count is J^(k)_M(q).

#include <cstdint>
#include <span>
#include <string>

#include "kfsum/int128.hpp"
#include "kfsum/parallel.hpp"
#include "kfsum/report.hpp"

namespace kfsum {

enum class CountMethod { naive, convolution };

std::string to_string(CountMethod method);

struct CongruenceQuery {
  unsigned k = 1;
  std::uint64_t M = 1;
  std::uint64_t q = 2;

  void validate() const;
};

struct CountResult {
  u128 count = 0;
  CountMethod method = CountMethod::convolution;
  unsigned k = 0;
  std::uint64_t size = 0;     // N or M
  std::uint64_t modulus = 0;  // q, or 0 for the unit-fraction equation
};

/// Largest number of k-tuples the convolution method tabulates.
inline constexpr std::uint64_t kMaxTupleStates = 50'000'000;
/// Largest number of 2k-tuple comparisons the naive methods perform.
inline constexpr std::uint64_t kMaxNaivePairs = 2'000'000'000;

/// Counts 2k-tuples with equal unit-fraction sums, k in {1, 2, 3}.
CountResult count_unit_fraction_solutions(unsigned k, std::uint64_t N, CountMethod method);

/// #{1 <= n <= x : n square-full}, for x <= 10^18.
std::uint64_t count_squarefull(std::uint64_t x);

/// J^(k)_M(q), k in {1, ..., 4}.
CountResult count_congruence_solutions(const CongruenceQuery& query,
                                       CountMethod method = CountMethod::convolution);

/// sum over q ~ Q of J^(k)_M(q) against Q M^k + M^{2k}.
BoundReport sum_congruence_counts(unsigned k, std::uint64_t M, double Q,
                                  const ExecPolicy& policy = {});

/// Classification of a 2k-tuple (m_1, ..., m_2k) by
///   F = prod m_i * (sum_{i<=k} 1/m_i - sum_{i>k} 1/m_i).
/// F is an integer; it vanishes exactly when the unit-fraction sums agree,
/// and q | F whenever the congruence holds with every m_i coprime to q.
struct TupleClass {
  enum class Kind { rational_identity, nonzero_F };
  Kind kind = Kind::rational_identity;
  i128 F = 0;
};

TupleClass classify_tuple(std::span<const std::uint64_t> m);

}  // namespace kfsum
