#include "kfsum/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "kfsum/errors.hpp"

namespace kfsum {

namespace {

constexpr double kRangeSlack = 1e-12;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

IntRange moduli_for(double Q) {
  if (!(Q >= 2.0) || !std::isfinite(Q)) throw ParameterError("Q must be a finite real >= 2");
  return dyadic_range(Q);
}

std::uint64_t coprime_prime_count(std::span<const std::uint32_t> primes, std::uint64_t q) {
  std::uint64_t c = 0;
  for (const auto p : primes) c += (q % p != 0);
  return c;
}

}  // namespace

BoundReport theorem1_report(double Q, double x, const NumberTables& tables,
                            const ExecPolicy& policy, std::uint64_t scan_limit) {
  const auto start = std::chrono::steady_clock::now();
  const IntRange moduli = moduli_for(Q);
  if (moduli.hi - 1 > scan_limit) {
    throw BudgetError("theorem1: moduli up to " + std::to_string(moduli.hi - 1) +
                      " exceed the scan limit " + std::to_string(scan_limit));
  }
  const auto primes = tables.primes.primes_in(dyadic_range(x));

  std::vector<double> maxima(moduli.size());
  parallel_for(moduli.size(), policy, [&](std::size_t i) {
    maxima[i] = max_prime_sum(moduli.lo + i, x, tables.primes, scan_limit).magnitude;
  });

  BoundReport report;
  report.name = "theorem1";
  report.params = {{"Q", Q}, {"x", x}};
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    report.lhs += maxima[i];
    report.term_count += coprime_prime_count(primes, moduli.lo + i);
  }
  report.rhs_terms = {{"Q^(5/4) x^(5/8)", std::pow(Q, 1.25) * std::pow(x, 0.625)},
                      {"Q x^(9/10)", Q * std::pow(x, 0.9)},
                      {"Q^(7/6) x^(13/18)", std::pow(Q, 7.0 / 6.0) * std::pow(x, 13.0 / 18.0)}};
  report.trivial_bound = static_cast<double>(moduli.size()) * static_cast<double>(primes.size());
  if (x < std::pow(Q, 2.0 / 3.0) * (1.0 - kRangeSlack) ||
      x > std::pow(Q, 1.5) * (1.0 + kRangeSlack)) {
    report.warnings.push_back("x outside Q^(2/3) <= x <= Q^(3/2)");
  }
  report.finish();
  report.runtime_seconds = seconds_since(start);
  return report;
}

BoundReport theorem3_report(std::int64_t a, double Q, double x, const NumberTables& tables,
                            const ExecPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  if (a <= 0) throw ParameterError("theorem3: a must be a positive integer");
  const IntRange moduli = moduli_for(Q);
  const auto primes = tables.primes.primes_in(dyadic_range(x));

  std::vector<double> magnitudes(moduli.size());
  parallel_for(moduli.size(), policy, [&](std::size_t i) {
    const ExpSumQuery query{a, moduli.lo + i, x};
    magnitudes[i] = std::abs(prime_sum(query, Weight::unit, tables).value);
  });

  const double factor = std::sqrt(1.0 + static_cast<double>(a) / (x * Q));
  BoundReport report;
  report.name = "theorem3";
  report.params = {{"a", static_cast<double>(a)}, {"Q", Q}, {"x", x}};
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    report.lhs += magnitudes[i];
    report.term_count += coprime_prime_count(primes, moduli.lo + i);
  }
  report.rhs_terms = {
      {"(1+a/(xQ))^(1/2) Q^(1/2) x^(11/8)", factor * std::sqrt(Q) * std::pow(x, 11.0 / 8.0)},
      {"(1+a/(xQ))^(1/2) Q^(7/6) x^(2/3)",
       factor * std::pow(Q, 7.0 / 6.0) * std::pow(x, 2.0 / 3.0)}};
  report.trivial_bound = static_cast<double>(moduli.size()) * static_cast<double>(primes.size());
  if (x < std::sqrt(Q) * (1.0 - kRangeSlack) ||
      x > std::pow(Q, 4.0 / 3.0) * (1.0 + kRangeSlack)) {
    report.warnings.push_back("x outside Q^(1/2) <= x <= Q^(4/3)");
  }
  report.finish();
  report.runtime_seconds = seconds_since(start);
  return report;
}

double baker_function(double theta, double alpha) {
  const double arg = (theta + alpha - 2.0) / (2.0 * alpha - 2.0);
  if (!(arg > 0.0)) throw ParameterError("baker_function: log argument must be positive");
  return 2.0 * theta - alpha - 2.0 + 2.0 * (2.0 - alpha) * std::log(arg);
}

double theorem2_function(double theta) {
  const double arg = (21.0 * theta - 19.0) / 4.0;
  if (!(arg > 0.0)) throw ParameterError("theorem2_function: log argument must be positive");
  return 42.0 * theta - 65.0 + 38.0 * std::log(arg);
}

std::pair<double, double> RootQuery::effective_bracket() const {
  if (bracket) return *bracket;
  return {std::max(19.0 / 21.0, 2.0 - alpha) + 1e-6, 2.0};
}

RootResult baker_root(const RootQuery& query) {
  const double alpha = query.alpha;
  if (!(alpha > 1.0 && alpha < 2.0)) throw ParameterError("baker_root: alpha must lie in (1, 2)");
  if (!(query.tolerance > 0.0)) throw ParameterError("baker_root: tolerance must be positive");
  auto [lo, hi] = query.effective_bracket();
  if (!(lo < hi)) throw ParameterError("baker_root: bracket must satisfy lo < hi");
  if (!(lo + alpha - 2.0 > 0.0)) {
    throw ParameterError("baker_root: bracket leaves the log domain theta > 2 - alpha");
  }
  const double f_lo = baker_function(lo, alpha);
  const double f_hi = baker_function(hi, alpha);
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if ((f_lo < 0.0) == (f_hi < 0.0)) throw ParameterError("baker_root: no sign change on bracket");

  const bool rising = f_lo < 0.0;
  RootResult result;
  while (hi - lo > query.tolerance) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    const double f = baker_function(mid, alpha);
    ++result.iterations;
    if (f == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.root = lo + (hi - lo) / 2.0;
  result.residual = baker_function(result.root, alpha);
  return result;
}

RootResult theorem2_root() {
  constexpr double alpha = 23.0 / 21.0;
  const RootQuery query{alpha, std::nullopt, 1e-12};
  const auto [lo, hi] = query.effective_bracket();
  constexpr int kSamples = 1000;
  for (int i = 0; i <= kSamples; ++i) {
    const double theta = lo + (hi - lo) * i / kSamples;
    const double special = theorem2_function(theta);
    const double general = 21.0 * baker_function(theta, alpha);
    // Term sizes plus the conditioning of the log near 19/21.
    const double scale = 42.0 * theta + 65.0 +
                         38.0 * std::abs(std::log((21.0 * theta - 19.0) / 4.0)) +
                         38.0 * 21.0 * theta / std::abs(21.0 * theta - 19.0);
    if (std::abs(special - general) > 1e-12 * scale) {
      throw InternalError("theorem2_root: alpha = 23/21 specialization mismatch at theta = " +
                          std::to_string(theta));
    }
  }
  RootResult result = baker_root(query);
  result.residual = theorem2_function(result.root);
  return result;
}

std::vector<TernaryCount> ternary_count(double x, std::span<const double> thetas,
                                        const ExecPolicy& policy) {
  if (!(x >= 2.0) || !std::isfinite(x)) throw ParameterError("ternary: x must be >= 2");
  const IntRange range = dyadic_range(x);
  const PrimeTable sieve(std::max<std::uint64_t>(2, range.hi));
  const auto span = sieve.primes_in(range);
  const std::vector<std::uint64_t> primes(span.begin(), span.end());
  const std::size_t P = primes.size();

  std::vector<double> thresholds;
  for (const double theta : thetas) thresholds.push_back(std::pow(x, theta));

  // The form is below 12 x^2; its largest value bounds the factor tables.
  std::uint64_t v_max = 0;
  if (P > 0) v_max = 3 * primes.back() * primes.back();
  std::vector<std::uint32_t> lpf;
  std::optional<PrimeTable> trial;
  if (v_max <= kTernaryTableLimit) {
    lpf = largest_prime_factor_table(std::max<std::uint64_t>(v_max, 2));
  } else {
    trial.emplace(std::max<std::uint64_t>(isqrt(v_max) + 1, 2));
  }
  auto largest = [&](std::uint64_t v) -> std::uint64_t {
    return trial ? largest_prime_factor(v, trial->primes()) : lpf[v];
  };

  std::vector<std::vector<std::uint64_t>> per_p1(P, std::vector<std::uint64_t>(thetas.size(), 0));
  parallel_for(P, policy, [&](std::size_t i) {
    const std::uint64_t p1 = primes[i];
    for (const std::uint64_t p2 : primes) {
      for (const std::uint64_t p3 : primes) {
        const auto big = static_cast<double>(largest(p1 * p2 + p1 * p3 + p2 * p3));
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
          if (big > thresholds[t]) ++per_p1[i][t];
        }
      }
    }
  });

  const std::uint64_t total = static_cast<std::uint64_t>(P) * P * P;
  const double log_x = std::log(x);
  std::vector<TernaryCount> out;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    TernaryCount c;
    c.theta = thetas[t];
    for (std::size_t i = 0; i < P; ++i) c.count += per_p1[i][t];
    c.total = total;
    c.fraction = total == 0 ? 0.0 : static_cast<double>(c.count) / static_cast<double>(total);
    c.normalized = static_cast<double>(c.count) * log_x * log_x * log_x / (x * x * x);
    out.push_back(c);
  }
  return out;
}

namespace {

struct ResidueCensus {
  std::vector<std::uint64_t> primes_by_residue;  // h[r]
  std::vector<std::uint64_t> pair_sums;          // s[t] = #{(p2, p3) : p2 + p3 = t}
};

ResidueCensus census(std::uint64_t x, std::uint64_t q, const PrimeTable& primes) {
  if (q < 2) throw ParameterError("garaev: q must be >= 2");
  if (q > 1'000'000) throw BudgetError("garaev: q above 10^6");
  primes.require_covers(x + 1);
  ResidueCensus c;
  c.primes_by_residue.assign(q, 0);
  for (const auto p : primes.primes_in({2, x + 1})) ++c.primes_by_residue[p % q];
  c.pair_sums.assign(q, 0);
  for (std::uint64_t r = 0; r < q; ++r) {
    if (c.primes_by_residue[r] == 0) continue;
    for (std::uint64_t s = 0; s < q; ++s) {
      std::uint64_t t = r + s;
      if (t >= q) t -= q;
      c.pair_sums[t] += c.primes_by_residue[r] * c.primes_by_residue[s];
    }
  }
  return c;
}

}  // namespace

std::vector<std::uint64_t> garaev_counts(std::uint64_t x, std::uint64_t q,
                                         const PrimeTable& primes) {
  const ResidueCensus c = census(x, q, primes);
  std::vector<std::uint64_t> counts(q, 0);
  for (std::uint64_t r1 = 0; r1 < q; ++r1) {
    const std::uint64_t h = c.primes_by_residue[r1];
    if (h == 0) continue;
    for (std::uint64_t t = 0; t < q; ++t) counts[mulmod(r1, t, q)] += h * c.pair_sums[t];
  }
  return counts;
}

std::uint64_t garaev_congruence_count(std::uint64_t x, std::uint64_t q, std::uint64_t lambda,
                                      const PrimeTable& primes) {
  const ResidueCensus c = census(x, q, primes);
  lambda %= q;
  std::uint64_t count = 0;
  for (std::uint64_t r1 = 0; r1 < q; ++r1) {
    const std::uint64_t h = c.primes_by_residue[r1];
    if (h == 0) continue;
    const std::uint64_t g = std::gcd(r1, q);
    if (g == 1) {
      // p2 + p3 = lambda * p1^-1
      count += h * c.pair_sums[mulmod(lambda, mod_inverse(static_cast<std::int64_t>(r1), q), q)];
      continue;
    }
    // r1 t = lambda (mod q) is solvable iff g | lambda; then t is fixed
    // modulo q/g and takes g values modulo q.
    if (lambda % g != 0) continue;
    const std::uint64_t q_red = q / g;
    const std::uint64_t t0 =
        q_red == 1 ? 0
                   : mulmod(lambda / g % q_red,
                            mod_inverse(static_cast<std::int64_t>(r1 / g % q_red), q_red), q_red);
    for (std::uint64_t t = t0; t < q; t += q_red) count += h * c.pair_sums[t];
  }
  return count;
}

FitResult exponent_fit(std::span<const std::pair<double, double>> series) {
  if (series.size() < 3) throw ParameterError("exponent_fit: need at least 3 points");
  for (const auto& [scale, value] : series) {
    if (!(scale > 0.0) || !(value > 0.0) || !std::isfinite(scale) || !std::isfinite(value)) {
      throw ParameterError("exponent_fit: scales and values must be positive and finite");
    }
  }
  const auto n = static_cast<double>(series.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [s, v] : series) {
    mean_x += std::log(s);
    mean_y += std::log(v);
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [s, v] : series) {
    const double dx = std::log(s) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - mean_y);
  }
  if (!(sxx > 0.0)) throw ParameterError("exponent_fit: scales must not all coincide");

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double sq = 0.0;
  for (const auto& [s, v] : series) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(s));
    fit.residuals.push_back(r);
    sq += r * r;
  }
  fit.residual_norm = std::sqrt(sq);
  return fit;
}

std::vector<ComparisonRow> comparison_table(double Q) {
  if (!(Q >= 1.0) || !std::isfinite(Q)) throw ParameterError("comparison_table: need Q >= 1");
  struct Entry {
    const char* name;
    const char* label;
    double exponent;
  };
  static constexpr Entry kEntries[] = {
      {"fouvry-shparlinski-baker", "23/12", 23.0 / 12.0},
      {"theorem1", "19/10", 19.0 / 10.0},
      {"duke-friedlander-iwaniec", "95/48", 95.0 / 48.0},
      {"theorem3", "15/8", 15.0 / 8.0},
      {"trivial", "2", 2.0},
      {"conjecture", "3/2", 1.5},
  };
  std::vector<ComparisonRow> rows;
  for (const auto& e : kEntries) rows.push_back({e.name, e.label, e.exponent, std::pow(Q, e.exponent)});
  return rows;
}

double choose_U(Theorem theorem, double Q, double x) {
  if (!(Q >= 1.0) || !(x >= 1.0) || !std::isfinite(Q) || !std::isfinite(x)) {
    throw ParameterError("choose_U: need finite Q, x >= 1");
  }
  const double cube_root = std::cbrt(x);
  double U = 0.0;
  if (theorem == Theorem::one) {
    if (x < std::pow(Q, 2.0 / 3.0) * (1.0 - kRangeSlack) ||
        x > std::pow(Q, 1.5) * (1.0 + kRangeSlack)) {
      throw ParameterError("choose_U: theorem one needs Q^(2/3) <= x <= Q^(3/2)");
    }
    U = std::min(cube_root, std::pow(Q, -0.25) * std::pow(x, 0.625));
  } else {
    if (x < std::sqrt(Q) * (1.0 - kRangeSlack)) {
      throw ParameterError("choose_U: theorem three needs x >= Q^(1/2)");
    }
    U = std::min(cube_root, std::pow(Q, -1.0 / 3.0) * std::pow(x, 2.0 / 3.0));
  }
  const bool admissible = U >= 1.0 - kRangeSlack && U <= cube_root * (1.0 + kRangeSlack) &&
                          (theorem != Theorem::one || x / U <= Q * (1.0 + kRangeSlack));
  if (!admissible) throw InternalError("choose_U: computed U is not admissible");
  return U;
}

}  // namespace kfsum
