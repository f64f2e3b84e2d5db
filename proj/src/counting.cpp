#include "kfsum/counting.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "kfsum/arith.hpp"
#include "kfsum/errors.hpp"

namespace kfsum {

namespace {

constexpr std::uint64_t kDenseResidueLimit = 10'000'000;

// Saturating power used only for capacity checks.
double dpow(std::uint64_t base, unsigned exp) {
  return std::pow(static_cast<double>(base), static_cast<double>(exp));
}

// Reduced rational num/den.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool operator==(const Fraction&) const = default;
};

struct FractionHash {
  std::size_t operator()(const Fraction& f) const noexcept {
    std::uint64_t h = f.num * 0x9E3779B97F4A7C15ULL;
    h ^= f.den + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

Fraction add_unit_fraction(Fraction f, std::uint64_t n) {
  // num/den + 1/n = (num n + den) / (den n)
  u128 num = static_cast<u128>(f.num) * n + f.den;
  u128 den = static_cast<u128>(f.den) * n;
  u128 a = num, b = den;
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  num /= a;
  den /= a;
  if ((num >> 64) != 0 || (den >> 64) != 0) {
    throw CapacityError("unit-fraction sum exceeds 64-bit rational range");
  }
  return {static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
}

// Calls visit(tuple) for every k-tuple over values, in lexicographic order.
template <typename Visit>
void for_each_tuple(std::span<const std::uint64_t> values, unsigned k, Visit&& visit) {
  if (values.empty()) return;
  std::vector<std::size_t> idx(k, 0);
  std::vector<std::uint64_t> tuple(k, values[0]);
  for (;;) {
    visit(std::span<const std::uint64_t>(tuple));
    unsigned pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < values.size()) {
        tuple[pos] = values[idx[pos]];
        break;
      }
      idx[pos] = 0;
      tuple[pos] = values[0];
      if (pos == 0) return;
    }
  }
}

std::vector<std::uint64_t> iota_values(std::uint64_t N) {
  std::vector<std::uint64_t> v(N);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

}  // namespace

std::string to_string(CountMethod method) {
  return method == CountMethod::naive ? "naive" : "convolution";
}

void CongruenceQuery::validate() const {
  if (k < 1 || k > 4) throw ParameterError("congruence count: k must be in [1, 4]");
  if (M < 1) throw ParameterError("congruence count: M must be >= 1");
  if (q < 2) throw ParameterError("congruence count: q must be >= 2");
}

CountResult count_unit_fraction_solutions(unsigned k, std::uint64_t N, CountMethod method) {
  if (k < 1 || k > 3) throw ParameterError("unit-fraction count: k must be 1, 2 or 3");
  CountResult result{0, method, k, N, 0};
  if (N == 0) return result;
  if (dpow(N, k) > static_cast<double>(kMaxTupleStates)) {
    throw CapacityError("unit-fraction count: N^k exceeds the tuple-state capacity");
  }
  const auto values = iota_values(N);

  if (method == CountMethod::convolution) {
    std::unordered_map<Fraction, std::uint64_t, FractionHash> multiplicity;
    multiplicity.reserve(static_cast<std::size_t>(dpow(N, k)));
    for_each_tuple(values, k, [&](std::span<const std::uint64_t> t) {
      Fraction f{0, 1};
      for (const auto n : t) f = add_unit_fraction(f, n);
      ++multiplicity[f];
    });
    for (const auto& [f, c] : multiplicity) result.count += static_cast<u128>(c) * c;
    return result;
  }

  if (dpow(N, 2 * k) > static_cast<double>(kMaxNaivePairs)) {
    throw CapacityError("unit-fraction count: N^(2k) exceeds the naive budget");
  }
  // Unreduced sums num/den with den = prod n_i, compared by cross
  // multiplication over every ordered pair of k-tuples.
  std::vector<std::pair<u128, u128>> sums;
  for_each_tuple(values, k, [&](std::span<const std::uint64_t> t) {
    u128 den = 1;
    for (const auto n : t) den *= n;
    u128 num = 0;
    for (const auto n : t) num += den / n;
    sums.emplace_back(num, den);
  });
  for (const auto& [ln, ld] : sums) {
    for (const auto& [rn, rd] : sums) {
      if (ln * rd == rn * ld) ++result.count;
    }
  }
  return result;
}

std::uint64_t count_squarefull(std::uint64_t x) {
  if (x > 1'000'000'000'000'000'000ULL) throw CapacityError("count_squarefull: x above 10^18");
  // Each square-full n is uniquely a^2 b^3 with b squarefree.
  std::uint64_t count = 0;
  const std::uint64_t b_max = icbrt(x);
  for (std::uint64_t b = 1; b <= b_max; ++b) {
    if (!is_squarefree(b)) continue;
    count += isqrt(x / (b * b * b));
  }
  return count;
}

CountResult count_congruence_solutions(const CongruenceQuery& query, CountMethod method) {
  query.validate();
  const unsigned k = query.k;
  const std::uint64_t q = query.q;
  CountResult result{0, method, k, query.M, q};

  std::vector<std::uint64_t> inverses;
  for (std::uint64_t m = 1; m <= query.M; ++m) {
    if (std::gcd(m, q) == 1) inverses.push_back(mod_inverse(static_cast<std::int64_t>(m), q));
  }
  const auto units = static_cast<std::uint64_t>(inverses.size());
  if (units == 0) return result;

  if (method == CountMethod::naive) {
    if (dpow(units, 2 * k) > static_cast<double>(kMaxNaivePairs)) {
      throw CapacityError("congruence count: M'^(2k) exceeds the naive budget");
    }
    std::vector<std::uint64_t> sums;
    for_each_tuple(inverses, k, [&](std::span<const std::uint64_t> t) {
      u128 s = 0;
      for (const auto v : t) s += v;
      sums.push_back(static_cast<std::uint64_t>(s % q));
    });
    for (const auto l : sums) {
      for (const auto r : sums) {
        if (l == r) ++result.count;
      }
    }
    return result;
  }

  if (dpow(units, k) > 9.0e18) throw CapacityError("congruence count: M'^k overflows");
  if (q <= kDenseResidueLimit) {
    if (static_cast<double>(k - 1) * static_cast<double>(q) * static_cast<double>(units) > 1e11) {
      throw CapacityError("congruence count: convolution cost exceeds capacity");
    }
    std::vector<std::uint64_t> base(q, 0);
    for (const auto v : inverses) ++base[v];
    std::vector<std::uint64_t> support;
    for (std::uint64_t r = 0; r < q; ++r) {
      if (base[r] != 0) support.push_back(r);
    }
    std::vector<std::uint64_t> dist = base;
    std::vector<std::uint64_t> next(q);
    for (unsigned step = 1; step < k; ++step) {
      std::fill(next.begin(), next.end(), 0);
      for (std::uint64_t r = 0; r < q; ++r) {
        if (dist[r] == 0) continue;
        for (const auto s : support) {
          std::uint64_t t = r + s;
          if (t >= q) t -= q;
          next[t] += dist[r] * base[s];
        }
      }
      dist.swap(next);
    }
    for (const auto c : dist) result.count += static_cast<u128>(c) * c;
    return result;
  }

  if (dpow(units, k) > static_cast<double>(kMaxTupleStates)) {
    throw CapacityError("congruence count: sparse residue table exceeds capacity");
  }
  std::unordered_map<std::uint64_t, std::uint64_t> base;
  for (const auto v : inverses) ++base[v];
  auto dist = base;
  for (unsigned step = 1; step < k; ++step) {
    std::unordered_map<std::uint64_t, std::uint64_t> next;
    for (const auto& [r, c] : dist) {
      for (const auto& [s, d] : base) next[(r + s) % q] += c * d;
    }
    dist.swap(next);
  }
  for (const auto& [r, c] : dist) result.count += static_cast<u128>(c) * c;
  return result;
}

BoundReport sum_congruence_counts(unsigned k, std::uint64_t M, double Q,
                                  const ExecPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  if (!(Q >= 2.0) || !std::isfinite(Q)) throw ParameterError("Q must be a finite real >= 2");
  CongruenceQuery{k, M, 2}.validate();
  const IntRange moduli = dyadic_range(Q);
  std::vector<u128> counts(moduli.size());
  parallel_for(moduli.size(), policy, [&](std::size_t i) {
    counts[i] = count_congruence_solutions({k, M, moduli.lo + i}).count;
  });
  u128 total = 0;
  for (const auto c : counts) total += c;

  BoundReport report;
  report.name = "lemma3";
  report.params = {{"k", static_cast<double>(k)},
                   {"M", static_cast<double>(M)},
                   {"Q", Q}};
  report.lhs = static_cast<double>(total);
  report.exact_lhs = total;
  report.rhs_terms = {{"Q M^k", Q * dpow(M, k)}, {"M^(2k)", dpow(M, 2 * k)}};
  report.trivial_bound = static_cast<double>(moduli.size()) * dpow(M, 2 * k);
  report.term_count = moduli.size();
  report.finish();
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TupleClass classify_tuple(std::span<const std::uint64_t> m) {
  if (m.empty() || m.size() % 2 != 0) {
    throw ParameterError("classify_tuple: need 2k entries with k >= 1");
  }
  for (const auto v : m) {
    if (v == 0) throw ParameterError("classify_tuple: entries must be positive");
  }
  const std::size_t k = m.size() / 2;
  // F = sum_{i<k} prod_{j != i} m_j - sum_{i>=k} prod_{j != i} m_j
  i128 F = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    i128 prod = 1;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j == i) continue;
      if (__builtin_mul_overflow(prod, static_cast<i128>(m[j]), &prod)) {
        throw CapacityError("classify_tuple: product overflows 128 bits");
      }
    }
    const i128 signed_prod = i < k ? prod : -prod;
    if (__builtin_add_overflow(F, signed_prod, &F)) {
      throw CapacityError("classify_tuple: F overflows 128 bits");
    }
  }
  if (F == 0) return {TupleClass::Kind::rational_identity, 0};
  return {TupleClass::Kind::nonzero_F, F};
}

}  // namespace kfsum
