#include "kfsum/vaughan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kfsum/accumulate.hpp"
#include "kfsum/errors.hpp"

namespace kfsum {

void VaughanParams::validate() const {
  if (!(x >= 2.0) || !std::isfinite(x)) throw ParameterError("vaughan: x must be >= 2");
  if (!(U >= 1.0) || U > std::cbrt(x) * (1.0 + 1e-12)) {
    throw ParameterError("vaughan: need 1 <= U <= x^(1/3)");
  }
}

double LambdaParts::total() const {
  CompensatedSum s;
  s.add(a1);
  s.add(a2);
  s.add(a3);
  s.add(a4);
  return s.value();
}

namespace {

std::vector<std::uint64_t> divisors_of(std::uint64_t n, const PrimeTable& primes) {
  std::vector<std::uint64_t> divs{1};
  for (const auto& [p, alpha] : primes.factorize(n)) {
    const std::size_t base = divs.size();
    std::uint64_t pk = 1;
    for (std::uint32_t e = 1; e <= alpha; ++e) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

// sum_{d | k, d <= U} mu(d) over the given divisor list of some multiple of k.
double truncated_mobius_sum(std::uint64_t k, std::uint64_t cutoff,
                            const std::vector<std::uint64_t>& divs,
                            const MultiplicativeTables& mult) {
  int s = 0;
  for (const auto d : divs) {
    if (d > cutoff) break;
    if (k % d == 0) s += mult.mobius(d);
  }
  return s;
}

std::uint64_t cutoff_of(double U) { return static_cast<std::uint64_t>(std::floor(U)); }

struct Block {
  double anchor;  // U 2^j
  IntRange range;
};

// Partitions the integers of r into blocks [U 2^j, U 2^{j+1}).
std::vector<Block> dyadic_blocks(IntRange r, double U) {
  std::vector<Block> blocks;
  if (r.empty()) return blocks;
  int j = static_cast<int>(std::floor(std::log2(static_cast<double>(r.lo) / U)));
  while (std::ldexp(U, j) > static_cast<double>(r.lo)) --j;
  while (std::ldexp(U, j + 1) <= static_cast<double>(r.lo)) ++j;
  for (;; ++j) {
    const IntRange block = real_range(std::ldexp(U, j), std::ldexp(U, j + 1));
    const IntRange part{std::max(block.lo, r.lo), std::min(block.hi, r.hi)};
    if (!part.empty()) blocks.push_back({std::ldexp(U, j), part});
    if (block.hi >= r.hi) break;
  }
  return blocks;
}

// m-values that can pair with some l in the block so that lm ~ x.
IntRange partner_range(IntRange l_block, IntRange n) {
  const std::uint64_t lo = std::max<std::uint64_t>(1, n.lo / (l_block.hi - 1));
  const std::uint64_t hi = (n.hi - 1) / l_block.lo + 1;
  return {lo, std::max(lo, hi)};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (const double c : v) m = std::max(m, std::abs(c));
  return m;
}

std::vector<std::complex<double>> normalized(const std::vector<double>& v, double scale) {
  std::vector<std::complex<double>> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / scale;
  return out;
}

VaughanComponent make_component(int source, int sign, ComponentKind kind, double anchor,
                                double x, IntRange l_range, const std::vector<double>& alpha,
                                IntRange m_range, const std::vector<double>* beta) {
  VaughanComponent c;
  c.source = source;
  c.sign = sign;
  c.kind = kind;
  const double alpha_scale = max_abs(alpha);
  const double beta_scale = beta ? max_abs(*beta) : 1.0;
  c.scale = alpha_scale * beta_scale;
  c.form.L = std::max(1.0, anchor);
  c.form.M = std::max(1.0, x / c.form.L);
  c.form.l_range = l_range;
  c.form.m_range = m_range;
  c.form.alpha = normalized(alpha, alpha_scale);
  if (beta) c.form.beta = normalized(*beta, beta_scale);
  c.form.restrict_x = x;
  return c;
}

}  // namespace

LambdaParts vaughan_parts(std::uint64_t n, double U, const NumberTables& tables) {
  if (n == 0) throw ParameterError("vaughan_parts: n must be >= 1");
  if (!(U >= 1.0)) throw ParameterError("vaughan_parts: U must be >= 1");
  tables.primes.require_covers(n + 1);
  const auto& mult = tables.mult;
  const std::uint64_t u = cutoff_of(U);
  const auto divs = divisors_of(n, tables.primes);

  LambdaParts parts;
  if (n <= u) parts.a1 = mult.von_mangoldt(n);

  CompensatedSum a2, a3, a4;
  for (const auto m : divs) {
    const double lambda = mult.von_mangoldt(m);
    const std::uint64_t k = n / m;
    if (lambda != 0.0 && m <= u) {
      a2.add(-lambda * truncated_mobius_sum(k, u, divs, mult));
    }
    if (lambda != 0.0 && m > u && k > u) {
      a4.add(-lambda * truncated_mobius_sum(k, u, divs, mult));
    }
  }
  for (const auto d : divs) {
    if (d > u) break;
    const int mu = mult.mobius(d);
    if (mu != 0) a3.add(mu * std::log(static_cast<double>(n / d)));
  }
  parts.a2 = a2.value();
  parts.a3 = a3.value();
  parts.a4 = a4.value();
  return parts;
}

double reconstruct_lambda(std::uint64_t n, double U, const NumberTables& tables) {
  return vaughan_parts(n, U, tables).total();
}

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::type_one:
      return "type_one";
    case ComponentKind::type_two:
      return "type_two";
    case ComponentKind::remainder:
      return "remainder";
  }
  return "unknown";
}

void VaughanDecomposition::check_ranges() const {
  const double U = params.U;
  const double x = params.x;
  for (const auto& c : components) {
    const double L = c.form.L;
    const bool ok = c.kind == ComponentKind::type_one   ? L <= U
                    : c.kind == ComponentKind::type_two ? (U <= L && L < 2.0 * x / U)
                                                        : true;
    if (!ok) {
      throw InternalError(std::string("vaughan: ") + to_string(c.kind) + " component from a" +
                          std::to_string(c.source) + " has L = " + std::to_string(L) +
                          " outside its admissible range");
    }
  }
}

VaughanDecomposition decompose(const VaughanParams& params, const NumberTables& tables) {
  params.validate();
  const double x = params.x;
  const double U = params.U;
  const IntRange n = dyadic_range(x);
  tables.primes.require_covers(n.hi);
  const auto& mult = tables.mult;
  const std::uint64_t u = cutoff_of(U);

  VaughanDecomposition out;
  out.params = params;
  auto kind_for = [U](double anchor) {
    return anchor <= U ? ComponentKind::type_one : ComponentKind::type_two;
  };

  // a1: n <= U inside n ~ x, a single variable paired with m = 1.
  {
    const IntRange l{n.lo, std::min(n.hi, u + 1)};
    if (!l.empty()) {
      std::vector<double> alpha;
      for (std::uint64_t v = l.lo; v < l.hi; ++v) alpha.push_back(mult.von_mangoldt(v));
      if (max_abs(alpha) > 0.0) {
        out.components.push_back(make_component(1, 1, ComponentKind::remainder, x, x, l, alpha,
                                                {1, 2}, nullptr));
      }
    }
  }

  // a2: l = m d with m, d <= U and coefficient sum Lambda(m) mu(d); r free.
  {
    const std::uint64_t l_max = u * u;
    std::vector<double> coeff(l_max + 1, 0.0);
    for (std::uint64_t m = 2; m <= u; ++m) {
      const double lambda = mult.von_mangoldt(m);
      if (lambda == 0.0) continue;
      for (std::uint64_t d = 1; d <= u; ++d) {
        const int mu = mult.mobius(d);
        if (mu != 0) coeff[m * d] += lambda * mu;
      }
    }
    for (const auto& block : dyadic_blocks({1, l_max + 1}, U)) {
      std::vector<double> alpha(coeff.begin() + static_cast<std::ptrdiff_t>(block.range.lo),
                                coeff.begin() + static_cast<std::ptrdiff_t>(block.range.hi));
      if (max_abs(alpha) == 0.0) continue;
      out.components.push_back(make_component(2, -1, kind_for(block.anchor), block.anchor, x,
                                              block.range, alpha,
                                              partner_range(block.range, n), nullptr));
    }
  }

  // a3: l = d <= U with mu(d), m = h with log h.
  for (const auto& block : dyadic_blocks({1, u + 1}, U)) {
    std::vector<double> alpha;
    for (std::uint64_t d = block.range.lo; d < block.range.hi; ++d) {
      alpha.push_back(mult.mobius(d));
    }
    if (max_abs(alpha) == 0.0) continue;
    const IntRange h = partner_range(block.range, n);
    std::vector<double> beta;
    for (std::uint64_t v = h.lo; v < h.hi; ++v) beta.push_back(std::log(static_cast<double>(v)));
    if (max_abs(beta) == 0.0) continue;
    out.components.push_back(
        make_component(3, 1, kind_for(block.anchor), block.anchor, x, block.range, alpha, h, &beta));
  }

  // a4: l = m > U with Lambda(m), k > U with sum_{d | k, d <= U} mu(d).
  {
    const std::uint64_t m_max = (n.hi - 1) / (u + 1);
    const std::uint64_t k_max = (n.hi - 1) / (u + 1);
    std::vector<double> trunc(k_max + 1, 0.0);
    for (std::uint64_t d = 1; d <= u; ++d) {
      const int mu = mult.mobius(d);
      if (mu == 0) continue;
      for (std::uint64_t k = d; k <= k_max; k += d) trunc[k] += mu;
    }
    for (const auto& block : dyadic_blocks({u + 1, m_max + 1}, U)) {
      std::vector<double> alpha;
      for (std::uint64_t m = block.range.lo; m < block.range.hi; ++m) {
        alpha.push_back(mult.von_mangoldt(m));
      }
      if (max_abs(alpha) == 0.0) continue;
      IntRange k = partner_range(block.range, n);
      k.lo = std::max(k.lo, u + 1);
      k.hi = std::min(k.hi, k_max + 1);
      if (k.empty()) continue;
      std::vector<double> beta(trunc.begin() + static_cast<std::ptrdiff_t>(k.lo),
                               trunc.begin() + static_cast<std::ptrdiff_t>(k.hi));
      if (max_abs(beta) == 0.0) continue;
      out.components.push_back(make_component(4, -1, ComponentKind::type_two, block.anchor, x,
                                              block.range, alpha, k, &beta));
    }
  }

  out.check_ranges();
  return out;
}

ExpSumValue evaluate(const VaughanDecomposition& decomposition, std::int64_t a, std::uint64_t q) {
  CompensatedSum re, im;
  ExpSumValue out;
  for (const auto& c : decomposition.components) {
    const ExpSumValue w = bilinear_sum({c.form, a, q});
    const double factor = c.sign * c.scale;
    re.add(factor * w.value.real());
    im.add(factor * w.value.imag());
    out.term_count += w.term_count;
    out.accumulation_error_bound += c.scale * w.accumulation_error_bound;
  }
  out.value = {re.value(), im.value()};
  return out;
}

PrimePowerGap prime_power_gap(std::uint64_t q, std::int64_t a, double x,
                              const NumberTables& tables) {
  ExpSumQuery{a, q, x}.validate();
  const IntRange n = dyadic_range(x);
  tables.primes.require_covers(n.hi);
  const std::uint64_t ar = reduce_mod(a, q);
  ComplexAccumulator acc;
  CompensatedSum envelope;
  PrimePowerGap out;
  for (std::uint64_t v = n.lo; v < n.hi; ++v) {
    const auto pp = tables.mult.prime_power(v);
    if (pp.p == 0 || pp.alpha < 2) continue;
    const double log_p = std::log(static_cast<double>(pp.p));
    envelope.add(log_p);
    if (q % pp.p == 0) continue;
    const auto inv = mod_inverse(static_cast<std::int64_t>(v), q);
    acc.add(log_p * unit_root(mulmod(ar, inv, q), q));
  }
  out.gap = std::abs(acc.value());
  out.envelope = envelope.value();
  out.sqrt_envelope = 2.0 * std::sqrt(2.0 * x) * std::log(2.0 * x);
  out.terms = acc.terms();
  return out;
}

}  // namespace kfsum
