#include "kfsum/expsums.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kfsum/accumulate.hpp"
#include "kfsum/errors.hpp"

namespace kfsum {

namespace {

constexpr double kPerTermError = 0x1p-50 + 0x1p-51;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Inverses of the values modulo q, in chunks to bound scratch memory.
std::vector<std::optional<std::uint64_t>> inverses_of_range(IntRange r, std::uint64_t q) {
  std::vector<std::optional<std::uint64_t>> out;
  out.reserve(r.size());
  constexpr std::uint64_t kChunk = 1 << 16;
  std::vector<std::int64_t> chunk;
  for (std::uint64_t start = r.lo; start < r.hi; start += kChunk) {
    const std::uint64_t stop = std::min(r.hi, start + kChunk);
    chunk.clear();
    for (std::uint64_t n = start; n < stop; ++n) chunk.push_back(static_cast<std::int64_t>(n));
    auto part = batch_inverses(chunk, q);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

std::complex<double> unit_root(std::uint64_t r, std::uint64_t q) {
  if (r == 0) return {1.0, 0.0};
  const u128 r2 = static_cast<u128>(r) * 2;
  const u128 r4 = r2 * 2;
  if (r2 == q) return {-1.0, 0.0};
  if (r4 == q) return {0.0, 1.0};
  if (r4 == static_cast<u128>(q) * 3) return {0.0, -1.0};
  if (r2 > q) return std::conj(unit_root(q - r, q));
  const double angle = 2.0 * std::numbers::pi * (static_cast<double>(r) / static_cast<double>(q));
  return {std::cos(angle), std::sin(angle)};
}

UnitRootTable::UnitRootTable(std::uint64_t q) : q_(q) {
  if (q < 1) throw ParameterError("UnitRootTable: modulus must be >= 1");
  if (q > (1ULL << 28)) throw CapacityError("UnitRootTable: modulus too large for a table");
  roots_.resize(q);
  for (std::uint64_t r = 0; r < q; ++r) roots_[r] = unit_root(r, q);
}

void ExpSumQuery::validate() const {
  if (q < 2) throw ParameterError("modulus q must be >= 2");
  if (!(x >= 2.0) || !std::isfinite(x)) throw ParameterError("x must be a finite real >= 2");
}

double accumulation_bound(std::uint64_t terms) {
  return static_cast<double>(terms) * kPerTermError;
}

ExpSumValue prime_sum(const ExpSumQuery& query, Weight weight, const NumberTables& tables,
                      InverseMethod method) {
  query.validate();
  const IntRange range = dyadic_range(query.x);
  tables.primes.require_covers(range.hi);
  const std::uint64_t q = query.q;
  const std::uint64_t a = reduce_mod(query.a, q);

  // Support of the weight, with the weights themselves.
  std::vector<std::int64_t> support;
  std::vector<double> weights;
  if (weight == Weight::von_mangoldt) {
    for (std::uint64_t n = range.lo; n < range.hi; ++n) {
      const auto pp = tables.mult.prime_power(n);
      if (pp.p == 0 || q % pp.p == 0) continue;
      support.push_back(static_cast<std::int64_t>(n));
      weights.push_back(std::log(static_cast<double>(pp.p)));
    }
  } else {
    for (const std::uint32_t p : tables.primes.primes_in(range)) {
      if (q % p == 0) continue;
      support.push_back(p);
      weights.push_back(weight == Weight::unit ? 1.0 : std::log(static_cast<double>(p)));
    }
  }

  std::vector<std::uint64_t> inverses(support.size());
  if (method == InverseMethod::batched) {
    const auto batch = batch_inverses(support, q);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!batch[i]) throw InternalError("prime_sum: support element not invertible");
      inverses[i] = *batch[i];
    }
  } else {
    for (std::size_t i = 0; i < support.size(); ++i) inverses[i] = mod_inverse(support[i], q);
  }

  ComplexAccumulator acc;
  double weight_total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto root = unit_root(mulmod(a, inverses[i], q), q);
    acc.add(weight == Weight::unit ? root : weights[i] * root);
    weight_total += weights[i];
  }
  return {acc.value(), acc.terms(), weight_total * kPerTermError};
}

PrimeSumScanner::PrimeSumScanner(std::uint64_t q, double x, const PrimeTable& primes)
    : roots_(q) {
  ExpSumQuery{1, q, x}.validate();
  for (const std::uint32_t p : primes.primes_in(dyadic_range(x))) {
    if (q % p == 0) continue;
    inverses_.push_back(mod_inverse(p, q));
  }
}

std::complex<double> PrimeSumScanner::at(std::uint64_t a) const {
  const std::uint64_t q = roots_.modulus();
  a %= q;
  ComplexAccumulator acc;
  for (const std::uint64_t inv : inverses_) acc.add(roots_[mulmod(a, inv, q)]);
  return acc.value();
}

MaxPrimeSum max_prime_sum(std::uint64_t q, double x, const PrimeTable& primes,
                          std::uint64_t scan_limit) {
  if (q > scan_limit) {
    throw BudgetError("max_prime_sum: q = " + std::to_string(q) + " exceeds scan limit " +
                      std::to_string(scan_limit));
  }
  ExpSumQuery{1, q, x}.validate();
  // |S_q(q-a;x)| = |S_q(a;x)|, so a <= q/2 suffices. Residues a * p^-1 are
  // advanced incrementally as a increases.
  std::vector<std::uint64_t> inverses;
  for (const std::uint32_t p : primes.primes_in(dyadic_range(x))) {
    if (q % p != 0) inverses.push_back(mod_inverse(p, q));
  }
  const UnitRootTable roots(q);
  std::vector<std::uint64_t> residue(inverses.size(), 0);
  MaxPrimeSum best{0, -1.0};
  for (std::uint64_t a = 1; a <= q / 2; ++a) {
    for (std::size_t i = 0; i < residue.size(); ++i) {
      residue[i] += inverses[i];
      if (residue[i] >= q) residue[i] -= q;
    }
    if (std::gcd(a, q) != 1) continue;
    ComplexAccumulator acc;
    for (const std::uint64_t r : residue) acc.add(roots[r]);
    const double magnitude = std::abs(acc.value());
    if (magnitude > best.magnitude) best = {a, magnitude};
  }
  return best;
}

double kloosterman(std::int64_t a, std::int64_t b, std::uint64_t q) {
  if (q < 2) throw ParameterError("kloosterman: modulus must be >= 2");
  const std::uint64_t ar = reduce_mod(a, q);
  const std::uint64_t br = reduce_mod(b, q);
  const auto inverses = inverses_of_range({1, q}, q);
  ComplexAccumulator acc;
  for (std::uint64_t n = 1; n < q; ++n) {
    const auto& inv = inverses[n - 1];
    if (!inv) continue;
    std::uint64_t r = mulmod(ar, n, q) + mulmod(br, *inv, q);
    if (r >= q) r -= q;
    acc.add(unit_root(r, q));
  }
  const auto value = acc.value();
  if (std::abs(value.imag()) >= 1e-9) {
    throw InternalError("kloosterman: imaginary part " + std::to_string(value.imag()) +
                        " exceeds tolerance");
  }
  return value.real();
}

ExpSumValue short_inverse_sum(std::int64_t a, std::uint64_t q, double Y, double Z) {
  if (q < 2) throw ParameterError("short_inverse_sum: modulus must be > 1");
  if (!(Y < Z) || !std::isfinite(Y) || !std::isfinite(Z)) {
    throw ParameterError("short_inverse_sum: need finite Y < Z");
  }
  if (Z - Y > static_cast<double>(kMaxBilinearTerms)) {
    throw BudgetError("short_inverse_sum: range too long");
  }
  const auto first = static_cast<std::int64_t>(std::floor(Y)) + 1;
  const auto last = static_cast<std::int64_t>(std::floor(Z));
  const std::uint64_t ar = reduce_mod(a, q);
  ComplexAccumulator acc;
  constexpr std::int64_t kChunk = 1 << 16;
  std::vector<std::int64_t> chunk;
  for (std::int64_t start = first; start <= last; start += kChunk) {
    const std::int64_t stop = std::min(last + 1, start + kChunk);
    chunk.clear();
    for (std::int64_t n = start; n < stop; ++n) chunk.push_back(n);
    for (const auto& inv : batch_inverses(chunk, q)) {
      if (inv) acc.add(unit_root(mulmod(ar, *inv, q), q));
    }
  }
  return {acc.value(), acc.terms(), accumulation_bound(acc.terms())};
}

BoundReport weil_ratio(std::int64_t a, std::uint64_t q, double Y, double Z) {
  const auto start = std::chrono::steady_clock::now();
  const ExpSumValue s = short_inverse_sum(a, q, Y, Z);
  const auto g = static_cast<double>(std::gcd(reduce_mod(a, q), q));
  BoundReport report;
  report.name = "weil";
  report.params = {{"a", static_cast<double>(a)},
                   {"q", static_cast<double>(q)},
                   {"Y", Y},
                   {"Z", Z}};
  report.lhs = std::abs(s.value);
  report.rhs_terms = {{"gcd(a,q)((Z-Y)/q+1)", g * ((Z - Y) / static_cast<double>(q) + 1.0)},
                      {"q^(1/2)", std::sqrt(static_cast<double>(q))}};
  report.trivial_bound = std::floor(Z) - std::floor(Y);
  report.term_count = s.term_count;
  report.finish();
  report.runtime_seconds = seconds_since(start);
  return report;
}

BilinearForm BilinearForm::dyadic(double L, double M, std::vector<std::complex<double>> alpha,
                                  std::vector<std::complex<double>> beta) {
  BilinearForm form;
  form.L = L;
  form.M = M;
  form.l_range = dyadic_range(L);
  form.m_range = dyadic_range(M);
  form.alpha = std::move(alpha);
  form.beta = std::move(beta);
  form.validate();
  return form;
}

bool BilinearForm::real_coefficients() const {
  for (const auto& c : alpha) {
    if (c.imag() != 0.0) return false;
  }
  for (const auto& c : beta) {
    if (c.imag() != 0.0) return false;
  }
  return true;
}

void BilinearForm::validate() const {
  if (!(L >= 1.0) || !(M >= 1.0)) throw ParameterError("bilinear form: need L, M >= 1");
  if (l_range.lo == 0 || m_range.lo == 0) {
    throw ParameterError("bilinear form: ranges must consist of positive integers");
  }
  if (alpha.size() != l_range.size()) {
    throw ParameterError("bilinear form: alpha has " + std::to_string(alpha.size()) +
                         " entries for " + std::to_string(l_range.size()) + " values of l");
  }
  if (!beta.empty() && beta.size() != m_range.size()) {
    throw ParameterError("bilinear form: beta has " + std::to_string(beta.size()) +
                         " entries for " + std::to_string(m_range.size()) + " values of m");
  }
  auto bounded = [](const std::vector<std::complex<double>>& cs) {
    for (const auto& c : cs) {
      if (!(std::abs(c) <= 1.0 + 1e-12)) return false;
    }
    return true;
  };
  if (!bounded(alpha) || !bounded(beta)) {
    throw ParameterError("bilinear form: coefficients must be bounded by 1 in modulus");
  }
  if (restrict_x && !(*restrict_x >= 1.0)) {
    throw ParameterError("bilinear form: restriction x must be >= 1");
  }
}

namespace {

// m-values paired with l under the optional lm ~ x restriction.
IntRange m_values_for(const BilinearForm& form, std::uint64_t l) {
  if (!form.restrict_x) return form.m_range;
  const IntRange n = dyadic_range(*form.restrict_x);
  const std::uint64_t lo = (n.lo + l - 1) / l;
  const std::uint64_t hi = (n.hi + l - 1) / l;
  return {std::max(lo, form.m_range.lo), std::min(hi, form.m_range.hi)};
}

// (a * (lm)^-1 mod q) for each admissible pair, with the pair's coefficient.
template <typename Visit>
void visit_terms(const BilinearForm& form, std::uint64_t a, std::uint64_t q, Visit&& visit) {
  const auto l_inv = inverses_of_range(form.l_range, q);
  const auto m_inv = inverses_of_range(form.m_range, q);
  for (std::uint64_t l = form.l_range.lo; l < form.l_range.hi; ++l) {
    const auto& il = l_inv[l - form.l_range.lo];
    if (!il) continue;
    const auto alpha = form.alpha[l - form.l_range.lo];
    const std::uint64_t al = mulmod(a, *il, q);
    const IntRange ms = m_values_for(form, l);
    for (std::uint64_t m = ms.lo; m < ms.hi; ++m) {
      const auto& im = m_inv[m - form.m_range.lo];
      if (!im) continue;
      visit(mulmod(al, *im, q), alpha * form.beta_at(m));
    }
  }
}

void check_term_budget(const BilinearForm& form, std::uint64_t moduli = 1) {
  const u128 terms = static_cast<u128>(form.l_range.size()) * form.m_range.size() * moduli;
  if (terms > kMaxBilinearTerms) throw BudgetError("bilinear form: too many terms");
}

// Weights w_r = sum of alpha_l beta_m over pairs with (lm)^-1 = r (mod q),
// as a sparse list in ascending r, so that W_{a,q} = sum_r w_r e(a r / q).
struct ResidueWeights {
  std::vector<std::uint64_t> residues;
  std::vector<std::complex<double>> weights;
  std::uint64_t pairs = 0;
};

ResidueWeights residue_weights(const BilinearForm& form, std::uint64_t q) {
  std::vector<std::complex<double>> dense(q);
  std::vector<bool> hit(q, false);
  ResidueWeights out;
  visit_terms(form, 1, q, [&](std::uint64_t r, std::complex<double> c) {
    dense[r] += c;
    hit[r] = true;
    ++out.pairs;
  });
  for (std::uint64_t r = 0; r < q; ++r) {
    if (!hit[r]) continue;
    out.residues.push_back(r);
    out.weights.push_back(dense[r]);
  }
  return out;
}

std::complex<double> evaluate_weights(const ResidueWeights& w, std::uint64_t a,
                                      const UnitRootTable& roots) {
  const std::uint64_t q = roots.modulus();
  ComplexAccumulator acc;
  for (std::size_t i = 0; i < w.residues.size(); ++i) {
    acc.add(w.weights[i] * roots[mulmod(a, w.residues[i], q)]);
  }
  return acc.value();
}

double max_over_a(const ResidueWeights& w, const UnitRootTable& roots, bool half_scan) {
  const std::uint64_t q = roots.modulus();
  const std::uint64_t last = half_scan ? std::max<std::uint64_t>(1, q / 2) : q - 1;
  double best = 0.0;
  for (std::uint64_t a = 1; a <= last; ++a) {
    if (std::gcd(a, q) != 1) continue;
    best = std::max(best, std::abs(evaluate_weights(w, a, roots)));
  }
  return best;
}

struct PerModulus {
  double value = 0.0;
  std::uint64_t pairs = 0;
};

template <typename Eval>
std::pair<double, std::uint64_t> sum_over_moduli(IntRange moduli, const ExecPolicy& policy,
                                                 Eval&& eval) {
  std::vector<PerModulus> slots(moduli.size());
  parallel_for(moduli.size(), policy, [&](std::size_t i) { slots[i] = eval(moduli.lo + i); });
  double total = 0.0;
  std::uint64_t pairs = 0;
  for (const auto& s : slots) {
    total += s.value;
    pairs += s.pairs;
  }
  return {total, pairs};
}

IntRange moduli_for(double Q) {
  if (!(Q >= 2.0) || !std::isfinite(Q)) throw ParameterError("Q must be a finite real >= 2");
  const IntRange r = dyadic_range(Q);
  if (r.hi > kDefaultScanLimit) throw BudgetError("moduli exceed the scan limit");
  return r;
}

std::vector<NamedValue> form_params(const BilinearForm& form, double Q) {
  return {{"L", form.L}, {"M", form.M}, {"Q", Q}};
}

double trivial_total(const BilinearForm& form, IntRange moduli) {
  return static_cast<double>(form.l_range.size()) * static_cast<double>(form.m_range.size()) *
         static_cast<double>(moduli.size());
}

}  // namespace

ExpSumValue bilinear_sum(const BilinearSpec& spec) {
  spec.form.validate();
  if (spec.q < 2) throw ParameterError("bilinear_sum: modulus must be >= 2");
  check_term_budget(spec.form);
  const std::uint64_t a = reduce_mod(spec.a, spec.q);
  ComplexAccumulator acc;
  visit_terms(spec.form, a, spec.q, [&](std::uint64_t r, std::complex<double> c) {
    acc.add(c * unit_root(r, spec.q));
  });
  return {acc.value(), acc.terms(), accumulation_bound(acc.terms())};
}

BoundReport lemma4_report(const BilinearForm& form, double Q, int k, const ExecPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  form.validate();
  if (k < 1 || k > 3) throw ParameterError("lemma4: k must be 1, 2 or 3");
  if (form.L > Q || form.M > Q) throw ParameterError("lemma4: hypothesis 1 <= L, M <= Q violated");
  const IntRange moduli = moduli_for(Q);
  check_term_budget(form, moduli.size());
  const bool half = form.real_coefficients();
  const auto [lhs, pairs] = sum_over_moduli(moduli, policy, [&](std::uint64_t q) {
    const auto w = residue_weights(form, q);
    return PerModulus{max_over_a(w, UnitRootTable(q), half), w.pairs};
  });

  const double L = form.L, M = form.M;
  const double e = (2.0 * k - 1.0) / (2.0 * k);
  BoundReport report;
  report.name = "lemma4";
  report.params = form_params(form, Q);
  report.params.push_back({"k", static_cast<double>(k)});
  report.lhs = lhs;
  report.rhs_terms = {
      {"Q^(1+1/(2k)) L^((2k-1)/(2k)) M^(1/2)",
       Q * std::pow(Q, 1.0 / (2.0 * k)) * std::pow(L, e) * std::sqrt(M)},
      {"Q L^((2k-1)/(2k)) M", Q * std::pow(L, e) * M}};
  report.trivial_bound = trivial_total(form, moduli);
  report.term_count = pairs;
  report.finish();
  report.runtime_seconds = seconds_since(start);
  return report;
}

BoundReport lemma5_report(const BilinearForm& form, std::int64_t a, double Q,
                          const ExecPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  form.validate();
  if (a <= 0) throw ParameterError("lemma5: a must be a positive integer");
  const IntRange moduli = moduli_for(Q);
  check_term_budget(form, moduli.size());
  const auto [lhs, pairs] = sum_over_moduli(moduli, policy, [&](std::uint64_t q) {
    const auto s = bilinear_sum({form, a, q});
    return PerModulus{std::abs(s.value), s.term_count};
  });

  const double L = form.L, M = form.M;
  const double factor = std::sqrt(1.0 + static_cast<double>(a) / (L * M * Q));
  BoundReport report;
  report.name = "lemma5";
  report.params = form_params(form, Q);
  report.params.push_back({"a", static_cast<double>(a)});
  report.lhs = lhs;
  report.rhs_terms = {{"(1+a/(LMQ))^(1/2) Q L M^(1/2)", factor * Q * L * std::sqrt(M)},
                      {"(1+a/(LMQ))^(1/2) Q^(1/2) L^(5/4) M^(3/2)",
                       factor * std::sqrt(Q) * std::pow(L, 1.25) * std::pow(M, 1.5)}};
  report.trivial_bound = trivial_total(form, moduli);
  report.term_count = pairs;
  report.finish();
  report.runtime_seconds = seconds_since(start);
  return report;
}

BoundReport lemma6_report(const BilinearForm& form, double Q, std::optional<std::int64_t> a,
                          const ExecPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  form.validate();
  if (!form.type_one()) throw ParameterError("lemma6: requires a Type I form (beta = 1)");
  if (a && *a <= 0) throw ParameterError("lemma6: a must be a positive integer");
  const IntRange moduli = moduli_for(Q);
  check_term_budget(form, moduli.size());
  const bool half = form.real_coefficients();
  const auto [lhs, pairs] = sum_over_moduli(moduli, policy, [&](std::uint64_t q) {
    if (a) {
      const auto s = bilinear_sum({form, *a, q});
      return PerModulus{std::abs(s.value), s.term_count};
    }
    const auto w = residue_weights(form, q);
    return PerModulus{max_over_a(w, UnitRootTable(q), half), w.pairs};
  });

  const double L = form.L, M = form.M;
  BoundReport report;
  report.name = a ? "lemma6-fixed-a" : "lemma6-max-a";
  report.params = form_params(form, Q);
  if (a) report.params.push_back({"a", static_cast<double>(*a)});
  report.lhs = lhs;
  report.rhs_terms = {{"LM", L * M}, {"Q^(3/2) L", std::pow(Q, 1.5) * L}};
  report.trivial_bound = trivial_total(form, moduli);
  report.term_count = pairs;
  report.finish();
  report.runtime_seconds = seconds_since(start);
  return report;
}

}  // namespace kfsum
