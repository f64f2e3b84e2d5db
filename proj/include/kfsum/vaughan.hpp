#pragma once

// Vaughan's identity with U = V:
//   Lambda(n) = a1(n) + a2(n) + a3(n) + a4(n),
//   a1(n) =  Lambda(n) [n <= U]
//   a2(n) = -sum_{m d r = n, m <= U, d <= U} Lambda(m) mu(d)
//   a3(n) =  sum_{h d = n, d <= U} mu(d) log h
//   a4(n) = -sum_{m k = n, m > U, k > U} Lambda(m) sum_{d | k, d <= U} mu(d)
// and the resulting split of sum_{n ~ x} Lambda(n) e(a n^-1 / q) into
// Type I / Type II bilinear forms.

#include <cstdint>
#include <vector>

#include "kfsum/arith.hpp"
#include "kfsum/expsums.hpp"

namespace kfsum {

struct VaughanParams {
  double x = 2.0;  // n ~ x
  double U = 1.0;  // U = V

  /// Requires x >= 2 and 1 <= U <= x^{1/3}.
  void validate() const;
};

struct LambdaParts {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double total() const;
};

LambdaParts vaughan_parts(std::uint64_t n, double U, const NumberTables& tables);

/// a1 + a2 + a3 + a4 at n; equals Lambda(n) for every U >= 1.
double reconstruct_lambda(std::uint64_t n, double U, const NumberTables& tables);

enum class ComponentKind { type_one, type_two, remainder };

const char* to_string(ComponentKind kind);

/// One evaluable piece: sign * scale * W_{a,q}(form), where the form's
/// coefficients are normalized to modulus <= 1 and carry the lm ~ x
/// restriction.
struct VaughanComponent {
  ComponentKind kind = ComponentKind::type_one;
  int source = 0;  // which of a1..a4 produced it
  int sign = 1;
  double scale = 1.0;
  BilinearForm form;
};

struct VaughanDecomposition {
  VaughanParams params;
  std::vector<VaughanComponent> components;

  /// Throws InternalError unless every Type I component has L <= U and every
  /// Type II component has U <= L < 2x/U.
  void check_ranges() const;
};

/// Splits l-ranges into blocks [U 2^j, U 2^{j+1}) so each has a nominal L.
VaughanDecomposition decompose(const VaughanParams& params, const NumberTables& tables);

/// sum over components of sign * scale * bilinear_sum.
ExpSumValue evaluate(const VaughanDecomposition& decomposition, std::int64_t a, std::uint64_t q);

struct PrimePowerGap {
  double gap = 0.0;           // |Lambda-weighted sum - log p weighted prime sum|
  double envelope = 0.0;      // sum of log p over p^alpha ~ x with alpha >= 2
  double sqrt_envelope = 0.0; // 2 sqrt(2x) log(2x)
  std::uint64_t terms = 0;
};

PrimePowerGap prime_power_gap(std::uint64_t q, std::int64_t a, double x,
                              const NumberTables& tables);

}  // namespace kfsum
