#pragma once

// Theorem-level measurements: averaged bounds for S_q(a;x), the root
// equations for the ternary-form exponent, the ternary largest-prime-factor
// count, the prime congruence count p1 (p2 + p3) = lambda (mod q), the bound
// comparison table and log-log exponent fits.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kfsum/arith.hpp"
#include "kfsum/expsums.hpp"
#include "kfsum/parallel.hpp"
#include "kfsum/report.hpp"

namespace kfsum {

/// sum over q ~ Q of max_{(a,q)=1} |S_q(a;x)| against
/// Q^{5/4} x^{5/8} + Q x^{9/10} + Q^{7/6} x^{13/18}. The trivial bound is
/// #{q ~ Q} * #{p ~ x}. Outside Q^{2/3} <= x <= Q^{3/2} a warning is attached.
BoundReport theorem1_report(double Q, double x, const NumberTables& tables,
                            const ExecPolicy& policy = {},
                            std::uint64_t scan_limit = kDefaultScanLimit);

/// sum over q ~ Q of |S_q(a;x)| for fixed a > 0 against
/// (1 + a/(xQ))^{1/2} (Q^{1/2} x^{11/8} + Q^{7/6} x^{2/3}).
BoundReport theorem3_report(std::int64_t a, double Q, double x, const NumberTables& tables,
                            const ExecPolicy& policy = {});

/// 2 theta - alpha - 2 + 2 (2 - alpha) log((theta + alpha - 2) / (2 alpha - 2)).
double baker_function(double theta, double alpha);
/// 42 theta - 65 + 38 log((21 theta - 19) / 4).
double theorem2_function(double theta);

struct RootQuery {
  double alpha = 23.0 / 21.0;
  /// Defaults to [max(19/21, 2 - alpha) + 1e-6, 2].
  std::optional<std::pair<double, double>> bracket;
  double tolerance = 1e-12;

  std::pair<double, double> effective_bracket() const;
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Bisection root of baker_function(., alpha). Throws ParameterError when
/// alpha is outside (1, 2), the bracket leaves the log domain, or the
/// endpoints do not change sign.
RootResult baker_root(const RootQuery& query);

/// Root of theorem2_function, obtained as baker_root at alpha = 23/21 after
/// checking that 21 * baker_function(., 23/21) reproduces theorem2_function.
/// The residual is theorem2_function at the root.
RootResult theorem2_root();

struct TernaryCount {
  double theta = 0.0;
  std::uint64_t count = 0;  // ordered triples with P+(form) > x^theta
  std::uint64_t total = 0;
  double fraction = 0.0;
  double normalized = 0.0;  // count (log x)^3 / x^3
};

/// Largest 12x^2 for which ternary_count sieves a P+ table.
inline constexpr std::uint64_t kTernaryTableLimit = 16'000'000;

/// For each theta, ordered prime triples p_i ~ x with
/// P+(p1 p2 + p1 p3 + p2 p3) > x^theta.
std::vector<TernaryCount> ternary_count(double x, std::span<const double> thetas,
                                        const ExecPolicy& policy = {});

/// Ordered prime triples p_i <= x with p1 (p2 + p3) = lambda (mod q), for
/// every lambda in [0, q), from residue-class histograms.
std::vector<std::uint64_t> garaev_counts(std::uint64_t x, std::uint64_t q,
                                         const PrimeTable& primes);

std::uint64_t garaev_congruence_count(std::uint64_t x, std::uint64_t q, std::uint64_t lambda,
                                      const PrimeTable& primes);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  std::vector<double> residuals;
};

/// Least-squares fit of log(value) against log(scale).
FitResult exponent_fit(std::span<const std::pair<double, double>> series);

struct ComparisonRow {
  std::string name;
  std::string exponent_label;
  double exponent = 0.0;
  double value = 0.0;
};

/// The four averaged-bound cores at x = Q together with the trivial Q^2 and
/// conjectured Q^{3/2}.
std::vector<ComparisonRow> comparison_table(double Q);

enum class Theorem { one, three };

/// U = min(x^{1/3}, Q^{-1/4} x^{5/8}) for theorem one and
/// U = min(x^{1/3}, Q^{-1/3} x^{2/3}) for theorem three, with admissibility
/// checks (1 <= U <= x^{1/3}, and x/U <= Q for theorem one).
double choose_U(Theorem theorem, double Q, double x);

}  // namespace kfsum
