#pragma once

// Exact evaluation of exponential sums with Kloosterman fractions:
// S_q(a;x) over primes, complete Kloosterman sums, short sums of e(a n^-1/q)
// and bilinear forms W_{a,q}, with comparators against the Weil-type bound
// and the averaged bilinear bounds.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "kfsum/arith.hpp"
#include "kfsum/parallel.hpp"
#include "kfsum/report.hpp"

namespace kfsum {

/// e(r/q) = exp(2 pi i r / q) for a residue 0 <= r < q.
///
/// Residues above q/2 are evaluated as the conjugate of e((q-r)/q), so
/// e((q-r)/q) is bit-for-bit the conjugate of e(r/q). The points 0, 1/4, 1/2
/// and 3/4 are exact.
std::complex<double> unit_root(std::uint64_t r, std::uint64_t q);

/// unit_root(r, q) for every r in [0, q), for repeated lookups at fixed q.
class UnitRootTable {
 public:
  explicit UnitRootTable(std::uint64_t q);

  std::uint64_t modulus() const { return q_; }
  const std::complex<double>& operator[](std::uint64_t r) const { return roots_[r]; }

 private:
  std::uint64_t q_;
  std::vector<std::complex<double>> roots_;
};

struct ExpSumQuery {
  std::int64_t a = 0;  // kept unreduced; reduced mod q only for evaluation
  std::uint64_t q = 2;
  double x = 2.0;  // summation over x <= n < 2x

  void validate() const;
};

struct ExpSumValue {
  std::complex<double> value;
  std::uint64_t term_count = 0;
  /// Upper bound on the floating error of value: term_count * (2^-50 + 2^-51),
  /// covering the phase rounding of each term and the compensated sum.
  double accumulation_error_bound = 0.0;
};

/// Error bound attached to a sum of `terms` unit-modulus terms.
double accumulation_bound(std::uint64_t terms);

enum class Weight {
  unit,          // primes p ~ x, weight 1
  von_mangoldt,  // all n ~ x, weight Lambda(n)
  log_prime,     // primes p ~ x, weight log p
};

enum class InverseMethod { direct, batched };

/// S_q(a;x) = sum over primes x <= p < 2x, (p,q)=1 of e(a p^-1 / q), or its
/// Lambda / log p weighted variants. The tables must cover 2x.
ExpSumValue prime_sum(const ExpSumQuery& query, Weight weight, const NumberTables& tables,
                      InverseMethod method = InverseMethod::direct);

struct MaxPrimeSum {
  std::uint64_t a_star = 0;
  double magnitude = 0.0;
};

inline constexpr std::uint64_t kDefaultScanLimit = 1ULL << 20;

/// max over 1 <= a < q, (a,q)=1 of |S_q(a;x)|, scanning a <= q/2 only.
/// Ties go to the smallest a. Throws BudgetError when q > scan_limit.
MaxPrimeSum max_prime_sum(std::uint64_t q, double x, const PrimeTable& primes,
                          std::uint64_t scan_limit = kDefaultScanLimit);

/// Per-modulus evaluator of a -> S_q(a;x) that shares the inverse list and
/// root table between values of a.
class PrimeSumScanner {
 public:
  PrimeSumScanner(std::uint64_t q, double x, const PrimeTable& primes);

  std::uint64_t modulus() const { return roots_.modulus(); }
  std::uint64_t term_count() const { return inverses_.size(); }
  std::complex<double> at(std::uint64_t a) const;

 private:
  UnitRootTable roots_;
  std::vector<std::uint64_t> inverses_;
};

/// K(a,b;q) = sum over n mod q, (n,q)=1 of e((a n + b n^-1)/q). Throws
/// InternalError if the imaginary part exceeds 1e-9.
double kloosterman(std::int64_t a, std::int64_t b, std::uint64_t q);

/// Sum over Y < n <= Z, (n,q)=1 of e(a n^-1 / q).
ExpSumValue short_inverse_sum(std::int64_t a, std::uint64_t q, double Y, double Z);

/// |short_inverse_sum| against gcd(a,q)((Z-Y)/q + 1) + sqrt(q).
BoundReport weil_ratio(std::int64_t a, std::uint64_t q, double Y, double Z);

/// Coefficients and ranges of a bilinear form
///   W_{a,q} = sum_{l, m, (lm,q)=1} alpha_l beta_m e(a (lm)^-1 / q).
/// alpha[i] belongs to l = l_range.lo + i, beta[j] to m = m_range.lo + j.
/// An empty beta means beta_m = 1 (a Type I form).
struct BilinearForm {
  double L = 1.0;  // nominal sizes used by the bound formulas
  double M = 1.0;
  IntRange l_range;
  IntRange m_range;
  std::vector<std::complex<double>> alpha;
  std::vector<std::complex<double>> beta;
  /// When set, only pairs with x <= lm < 2x are summed.
  std::optional<double> restrict_x;

  /// Form on l ~ L, m ~ M. Pass an empty beta for Type I.
  static BilinearForm dyadic(double L, double M, std::vector<std::complex<double>> alpha,
                             std::vector<std::complex<double>> beta = {});

  bool type_one() const { return beta.empty(); }
  bool real_coefficients() const;
  std::complex<double> beta_at(std::uint64_t m) const {
    return beta.empty() ? std::complex<double>(1.0) : beta[m - m_range.lo];
  }

  /// Throws ParameterError on size mismatches or a coefficient above 1 in
  /// modulus (with 1e-12 slack for rounded unit complex numbers).
  void validate() const;
};

struct BilinearSpec {
  BilinearForm form;
  std::int64_t a = 0;
  std::uint64_t q = 2;
};

inline constexpr std::uint64_t kMaxBilinearTerms = 4'000'000'000ULL;

ExpSumValue bilinear_sum(const BilinearSpec& spec);

/// sum over q ~ Q of max_{(a,q)=1} |W_{a,q}| against
/// Q (Q^{1/2k} L^{(2k-1)/2k} M^{1/2} + L^{(2k-1)/2k} M). Requires
/// 1 <= L, M <= Q and k in {1, 2, 3}.
BoundReport lemma4_report(const BilinearForm& form, double Q, int k,
                          const ExecPolicy& policy = {});

/// sum over q ~ Q of |W_{a,q}| for fixed a > 0 against
/// (1 + a/(LMQ))^{1/2} (Q L M^{1/2} + Q^{1/2} L^{5/4} M^{3/2}).
BoundReport lemma5_report(const BilinearForm& form, std::int64_t a, double Q,
                          const ExecPolicy& policy = {});

/// Type I forms (beta = 1): sum over q ~ Q of max_a |W_{a,q}| (or of |W_{a,q}|
/// when a is given) against LM + Q^{3/2} L.
BoundReport lemma6_report(const BilinearForm& form, double Q, std::optional<std::int64_t> a,
                          const ExecPolicy& policy = {});

}  // namespace kfsum
