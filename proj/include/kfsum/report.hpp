#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kfsum/int128.hpp"

namespace kfsum {

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// Measured left-hand side of an averaged bound against the monomials of its
/// right-hand side. The monomials carry no epsilon factor and no implied
/// constant, so only the ratio is meaningful; no verdict is attached.
struct BoundReport {
  std::string name;
  std::vector<NamedValue> params;
  double lhs = 0.0;
  /// Exact integer value of lhs when it is a count.
  std::optional<u128> exact_lhs;
  std::vector<NamedValue> rhs_terms;
  double ratio = 0.0;
  std::optional<double> trivial_bound;
  std::uint64_t term_count = 0;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;

  double rhs_total() const {
    double total = 0.0;
    for (const auto& t : rhs_terms) total += t.value;
    return total;
  }

  /// Sets ratio = lhs / sum of rhs_terms.
  void finish() { ratio = lhs / rhs_total(); }
};

}  // namespace kfsum
