#include "kfsum/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <variant>

#include "kfsum/arith.hpp"
#include "kfsum/counting.hpp"
#include "kfsum/errors.hpp"
#include "kfsum/experiments.hpp"
#include "kfsum/expsums.hpp"
#include "kfsum/vaughan.hpp"

namespace kfsum::cli {

namespace {

using Cell = std::variant<i128, double, std::string>;

Cell integer(std::uint64_t v) { return static_cast<i128>(v); }
Cell integer(std::int64_t v) { return static_cast<i128>(v); }
Cell integer(u128 v) { return static_cast<i128>(v); }

struct Table {
  std::vector<std::pair<std::string, Cell>> params;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> warnings;
};

enum class Format { csv, json, pretty };

struct Config {
  Format format = Format::csv;
  std::string output;
  unsigned workers = 1;
  std::uint64_t max_q_scan = kDefaultScanLimit;
  std::uint64_t max_sieve = 200'000'000;
  bool timing = false;

  ExecPolicy policy() const { return {workers}; }
};

// Twelve significant digits.
std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double rounded_real(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_real(v).c_str(), nullptr);
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<i128>(&c)) return to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json cell_json(const Cell& c, bool round) {
  if (const auto* i = std::get_if<i128>(&c)) {
    if (*i >= INT64_MIN && *i <= INT64_MAX) return static_cast<std::int64_t>(*i);
    if (*i >= 0 && *i <= static_cast<i128>(UINT64_MAX)) return static_cast<std::uint64_t>(*i);
    return to_string(*i);
  }
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_real(*d);
    return round ? rounded_real(*d) : *d;
  }
  return std::get<std::string>(c);
}

std::string format_name(Format f) {
  switch (f) {
    case Format::csv:
      return "csv";
    case Format::json:
      return "json";
    case Format::pretty:
      return "pretty";
  }
  return "csv";
}

void write_csv(const Table& t, std::ostream& os) {
  std::vector<std::string> header;
  for (const auto& [name, value] : t.params) header.push_back(name);
  header.insert(header.end(), t.columns.begin(), t.columns.end());
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    std::size_t i = 0;
    for (const auto& [name, value] : t.params) os << (i++ ? "," : "") << csv_field(cell_text(value));
    for (const auto& c : row) os << (i++ ? "," : "") << csv_field(cell_text(c));
    os << '\n';
  }
}

void write_json(const Table& t, const std::string& command, const Config& cfg, std::ostream& os) {
  nlohmann::ordered_json doc;
  doc["params"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : t.params) doc["params"][name] = cell_json(value, false);
  doc["results"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = cell_json(row[i], true);
    doc["results"].push_back(std::move(obj));
  }
  nlohmann::ordered_json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["command"] = command;
  meta["config"] = {{"format", format_name(cfg.format)},
                    {"workers", cfg.workers},
                    {"max_q_scan", cfg.max_q_scan},
                    {"max_sieve", cfg.max_sieve},
                    {"memory_budget_bytes", memory_budget_bytes()}};
  meta["warnings"] = t.warnings;
  doc["meta"] = std::move(meta);
  os << doc.dump(2) << '\n';
}

void write_pretty(const Table& t, const std::string& command, std::ostream& os) {
  os << kToolName << ' ' << command << '\n';
  for (const auto& [name, value] : t.params) os << "  " << name << " = " << cell_text(value) << '\n';
  for (const auto& w : t.warnings) os << "  warning: " << w << '\n';
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i]).size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << (i ? "  " : "") << cells[i] << std::string(width[i] - cells[i].size(), ' ');
    }
    os << '\n';
  };
  os << '\n';
  line(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(cell_text(c));
    line(cells);
  }
}

NumberTables make_tables(double cover, const Config& cfg) {
  const auto limit = static_cast<std::uint64_t>(std::max(2.0, std::ceil(cover)));
  if (limit > cfg.max_sieve) {
    throw BudgetError("sieve limit " + std::to_string(limit) + " exceeds --max-sieve " +
                      std::to_string(cfg.max_sieve));
  }
  return NumberTables(limit);
}

void add_report(Table& t, const BoundReport& r, const Config& cfg) {
  t.columns = {"report", "lhs"};
  std::vector<Cell> row{r.name, r.lhs};
  if (r.exact_lhs) {
    t.columns.push_back("lhs_exact");
    row.push_back(integer(*r.exact_lhs));
  }
  for (const auto& term : r.rhs_terms) {
    t.columns.push_back(term.name);
    row.push_back(term.value);
  }
  t.columns.insert(t.columns.end(), {"rhs_total", "ratio", "trivial_bound", "term_count"});
  row.insert(row.end(), {r.rhs_total(), r.ratio, r.trivial_bound.value_or(NAN),
                         integer(r.term_count)});
  if (cfg.timing) {
    t.columns.push_back("runtime_seconds");
    row.push_back(r.runtime_seconds);
  }
  t.rows.push_back(std::move(row));
  t.warnings.insert(t.warnings.end(), r.warnings.begin(), r.warnings.end());
}

void add_value(Table& t, const ExpSumValue& v) {
  t.columns = {"re", "im", "abs", "term_count", "error_bound"};
  t.rows.push_back({v.value.real(), v.value.imag(), std::abs(v.value), integer(v.term_count),
                    v.accumulation_error_bound});
}

CountMethod parse_method(const std::string& s) {
  if (s == "naive") return CountMethod::naive;
  if (s == "convolution") return CountMethod::convolution;
  throw ParameterError("method must be naive or convolution");
}

double parse_fraction(const std::string& s) {
  const auto slash = s.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ParameterError("");
      return v;
    }
    const double num = std::stod(s.substr(0, slash), &used);
    if (used != slash) throw ParameterError("");
    const std::string den_text = s.substr(slash + 1);
    const double den = std::stod(den_text, &used);
    if (used != den_text.size() || den == 0.0) throw ParameterError("");
    return num / den;
  } catch (const std::exception&) {
    throw ParameterError("cannot parse number '" + s + "'");
  }
}

std::vector<std::complex<double>> coefficients(const std::string& family, IntRange r,
                                               const NumberTables& tables) {
  std::vector<std::complex<double>> out;
  for (std::uint64_t n = r.lo; n < r.hi; ++n) {
    if (family == "ones") {
      out.emplace_back(1.0);
    } else if (family == "mobius") {
      out.emplace_back(tables.mult.mobius(n));
    } else if (family == "primes") {
      out.emplace_back(tables.primes.is_prime(n) ? 1.0 : 0.0);
    } else if (family == "alternating") {
      out.emplace_back(n % 2 == 0 ? 1.0 : -1.0);
    } else {
      throw ParameterError("unknown coefficient family '" + family +
                           "' (ones, mobius, primes, alternating)");
    }
  }
  return out;
}

// Options of every subcommand, filled by CLI11.
struct Options {
  std::int64_t a = 1;
  std::int64_t b = 1;
  std::uint64_t q = 2;
  double x = 0.0;
  double Q = 0.0;
  double Y = 0.0;
  double Z = 0.0;
  double L = 1.0;
  double M_real = 1.0;
  double U = 0.0;
  unsigned k = 1;
  std::uint64_t M = 1;
  std::uint64_t N = 1;
  std::uint64_t x_int = 0;
  std::uint64_t lambda = 0;
  std::uint64_t weil_sweep = 0;
  std::uint64_t q_max = 0;
  std::uint64_t identity_max = 0;
  unsigned theorem = 1;
  std::string weight = "unit";
  std::string inverse_method = "direct";
  std::string count_method = "convolution";
  std::string alpha_family = "ones";
  std::string beta_family = "unit";
  std::string report = "none";
  std::string alpha_text = "23/21";
  double lo = 0.0;
  double hi = 0.0;
  double tol = 1e-12;
  double restrict_x = 0.0;
  std::vector<double> thetas{0.5, 1.0, 1.1, 1.2};
  std::vector<std::string> points;
  std::vector<double> theorem1_scales;
};

using Handler = std::function<Table(const Options&, const Config&, const CLI::App&)>;

bool given(const CLI::App& sub, const char* name) { return sub.count(name) > 0; }

Table cmd_sum(const Options& o, const Config& cfg, const CLI::App&) {
  Weight w = Weight::unit;
  if (o.weight == "von_mangoldt") {
    w = Weight::von_mangoldt;
  } else if (o.weight == "log_prime") {
    w = Weight::log_prime;
  } else if (o.weight != "unit") {
    throw ParameterError("weight must be unit, von_mangoldt or log_prime");
  }
  if (o.inverse_method != "direct" && o.inverse_method != "batched") {
    throw ParameterError("inverse method must be direct or batched");
  }
  const ExpSumQuery query{o.a, o.q, o.x};
  query.validate();
  const auto tables = make_tables(2 * o.x, cfg);
  Table t;
  t.params = {{"a", integer(o.a)}, {"q", integer(o.q)}, {"x", o.x}, {"weight", o.weight}};
  add_value(t, prime_sum(query, w, tables,
                         o.inverse_method == "batched" ? InverseMethod::batched
                                                       : InverseMethod::direct));
  return t;
}

Table cmd_max_sum(const Options& o, const Config& cfg, const CLI::App&) {
  ExpSumQuery{1, o.q, o.x}.validate();
  const auto tables = make_tables(2 * o.x, cfg);
  const auto r = max_prime_sum(o.q, o.x, tables.primes, cfg.max_q_scan);
  Table t;
  t.params = {{"q", integer(o.q)}, {"x", o.x}};
  t.columns = {"a_star", "magnitude"};
  t.rows.push_back({integer(r.a_star), r.magnitude});
  return t;
}

Table cmd_avg_max(const Options& o, const Config& cfg, const CLI::App&) {
  ExpSumQuery{1, 2, o.x}.validate();
  const auto tables = make_tables(2 * o.x, cfg);
  Table t;
  t.params = {{"Q", o.Q}, {"x", o.x}};
  add_report(t, theorem1_report(o.Q, o.x, tables, cfg.policy(), cfg.max_q_scan), cfg);
  return t;
}

Table cmd_fixed_a_avg(const Options& o, const Config& cfg, const CLI::App&) {
  ExpSumQuery{o.a, 2, o.x}.validate();
  const auto tables = make_tables(2 * o.x, cfg);
  Table t;
  t.params = {{"a", integer(o.a)}, {"Q", o.Q}, {"x", o.x}};
  add_report(t, theorem3_report(o.a, o.Q, o.x, tables, cfg.policy()), cfg);
  return t;
}

Table cmd_kloosterman(const Options& o, const Config& cfg, const CLI::App& sub) {
  Table t;
  if (o.weil_sweep == 0) {
    if (!given(sub, "--q")) throw ParameterError("kloosterman: --q is required");
    t.params = {{"a", integer(o.a)}, {"b", integer(o.b)}, {"q", integer(o.q)}};
    t.columns = {"value"};
    t.rows.push_back({kloosterman(o.a, o.b, o.q)});
    return t;
  }
  if (o.weil_sweep > 100'000) throw BudgetError("kloosterman: --weil-sweep above 10^5");
  const auto tables = make_tables(static_cast<double>(o.weil_sweep), cfg);
  const auto primes = tables.primes.primes_in({2, o.weil_sweep + 1});
  struct Slot {
    double max_abs = 0.0;
    std::uint64_t pairs = 0;
  };
  std::vector<Slot> slots(primes.size());
  parallel_for(primes.size(), cfg.policy(), [&](std::size_t i) {
    const std::int64_t p = primes[i];
    for (std::int64_t a = 1; a < p; ++a) {
      for (std::int64_t b = 1; b < p; ++b) {
        slots[i].max_abs = std::max(slots[i].max_abs, std::abs(kloosterman(a, b, p)));
        ++slots[i].pairs;
      }
    }
  });
  t.params = {{"weil_sweep", integer(o.weil_sweep)}};
  t.columns = {"p", "max_abs", "two_sqrt_p", "ratio", "pairs"};
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const double bound = 2.0 * std::sqrt(static_cast<double>(primes[i]));
    t.rows.push_back({integer(static_cast<std::uint64_t>(primes[i])), slots[i].max_abs, bound,
                      slots[i].max_abs / bound, integer(slots[i].pairs)});
  }
  return t;
}

Table cmd_short_sum(const Options& o, const Config&, const CLI::App&) {
  Table t;
  t.params = {{"a", integer(o.a)}, {"q", integer(o.q)}, {"Y", o.Y}, {"Z", o.Z}};
  add_value(t, short_inverse_sum(o.a, o.q, o.Y, o.Z));
  return t;
}

Table cmd_weil_ratio(const Options& o, const Config& cfg, const CLI::App& sub) {
  Table t;
  if (o.q_max == 0) {
    if (!given(sub, "--q") || !given(sub, "--Z")) {
      throw ParameterError("weil-ratio: --q and --Z are required without --q-max");
    }
    t.params = {{"a", integer(o.a)}, {"q", integer(o.q)}, {"Y", o.Y}, {"Z", o.Z}};
    add_report(t, weil_ratio(o.a, o.q, o.Y, o.Z), cfg);
    return t;
  }
  // Prime moduli 101 <= q <= q_max over (0, q/2].
  const auto tables = make_tables(static_cast<double>(o.q_max), cfg);
  const auto primes = tables.primes.primes_in({101, o.q_max + 1});
  std::vector<BoundReport> reports(primes.size());
  parallel_for(primes.size(), cfg.policy(), [&](std::size_t i) {
    reports[i] = weil_ratio(o.a, primes[i], 0.0, primes[i] / 2.0);
  });
  t.params = {{"a", integer(o.a)}, {"q_max", integer(o.q_max)}};
  t.columns = {"q", "Y", "Z", "lhs", "rhs_total", "ratio", "log_q"};
  for (std::size_t i = 0; i < primes.size(); ++i) {
    t.rows.push_back({integer(static_cast<std::uint64_t>(primes[i])), 0.0, primes[i] / 2.0,
                      reports[i].lhs, reports[i].rhs_total(), reports[i].ratio,
                      std::log(static_cast<double>(primes[i]))});
  }
  return t;
}

Table cmd_bilinear(const Options& o, const Config& cfg, const CLI::App&) {
  const auto tables = make_tables(2 * std::max(o.L, o.M_real) + 2, cfg);
  const IntRange l_range = dyadic_range(o.L);
  const IntRange m_range = dyadic_range(o.M_real);
  auto form = BilinearForm::dyadic(
      o.L, o.M_real, coefficients(o.alpha_family, l_range, tables),
      o.beta_family == "unit" ? std::vector<std::complex<double>>{}
                              : coefficients(o.beta_family, m_range, tables));
  if (o.restrict_x > 0.0) {
    form.restrict_x = o.restrict_x;
    form.validate();
  }
  Table t;
  t.params = {{"L", o.L},
              {"M", o.M_real},
              {"alpha", o.alpha_family},
              {"beta", o.beta_family},
              {"restrict_x", o.restrict_x}};
  if (o.report == "none") {
    t.params.insert(t.params.begin(), {{"a", integer(o.a)}, {"q", integer(o.q)}});
    add_value(t, bilinear_sum({form, o.a, o.q}));
    return t;
  }
  t.params.push_back({"Q", o.Q});
  if (o.report == "lemma4") {
    t.params.push_back({"k", integer(static_cast<std::uint64_t>(o.k))});
    add_report(t, lemma4_report(form, o.Q, static_cast<int>(o.k), cfg.policy()), cfg);
  } else if (o.report == "lemma5") {
    t.params.push_back({"a", integer(o.a)});
    add_report(t, lemma5_report(form, o.a, o.Q, cfg.policy()), cfg);
  } else if (o.report == "lemma6") {
    add_report(t, lemma6_report(form, o.Q, std::nullopt, cfg.policy()), cfg);
  } else if (o.report == "lemma6-fixed-a") {
    t.params.push_back({"a", integer(o.a)});
    add_report(t, lemma6_report(form, o.Q, o.a, cfg.policy()), cfg);
  } else {
    throw ParameterError("report must be none, lemma4, lemma5, lemma6 or lemma6-fixed-a");
  }
  return t;
}

Table cmd_jcount(const Options& o, const Config&, const CLI::App&) {
  const auto r = count_congruence_solutions({o.k, o.M, o.q}, parse_method(o.count_method));
  Table t;
  t.params = {{"k", integer(static_cast<std::uint64_t>(o.k))},
              {"M", integer(o.M)},
              {"q", integer(o.q)},
              {"method", o.count_method}};
  t.columns = {"count"};
  t.rows.push_back({integer(r.count)});
  return t;
}

Table cmd_jcount_avg(const Options& o, const Config& cfg, const CLI::App&) {
  Table t;
  t.params = {{"k", integer(static_cast<std::uint64_t>(o.k))}, {"M", integer(o.M)}, {"Q", o.Q}};
  add_report(t, sum_congruence_counts(o.k, o.M, o.Q, cfg.policy()), cfg);
  return t;
}

Table cmd_unitfrac(const Options& o, const Config&, const CLI::App&) {
  const auto r = count_unit_fraction_solutions(o.k, o.N, parse_method(o.count_method));
  Table t;
  t.params = {{"k", integer(static_cast<std::uint64_t>(o.k))},
              {"N", integer(o.N)},
              {"method", o.count_method}};
  t.columns = {"count"};
  t.rows.push_back({integer(r.count)});
  return t;
}

Table cmd_squarefull(const Options& o, const Config&, const CLI::App&) {
  const std::uint64_t c = count_squarefull(o.x_int);
  const double root = std::sqrt(static_cast<double>(o.x_int));
  Table t;
  t.params = {{"x", integer(o.x_int)}};
  t.columns = {"count", "three_sqrt_x", "count_over_sqrt_x"};
  t.rows.push_back({integer(c), 3.0 * root, root > 0 ? static_cast<double>(c) / root : 0.0});
  return t;
}

Table cmd_vaughan_check(const Options& o, const Config& cfg, const CLI::App& sub) {
  const double U = given(sub, "--U") ? o.U : std::cbrt(o.x);
  const VaughanParams params{o.x, U};
  params.validate();
  const std::uint64_t id_max =
      o.identity_max > 0 ? o.identity_max : static_cast<std::uint64_t>(std::ceil(2 * o.x));
  const auto tables = make_tables(std::max(2 * o.x, static_cast<double>(id_max) + 1), cfg);

  const auto direct = prime_sum({o.a, o.q, o.x}, Weight::von_mangoldt, tables);
  const auto decomposition = decompose(params, tables);
  const auto split = evaluate(decomposition, o.a, o.q);
  const double diff = std::abs(direct.value - split.value);
  double identity_error = 0.0;
  for (std::uint64_t n = 1; n <= id_max; ++n) {
    identity_error = std::max(
        identity_error, std::abs(reconstruct_lambda(n, U, tables) - tables.mult.von_mangoldt(n)));
  }
  std::uint64_t type_one = 0, type_two = 0;
  for (const auto& c : decomposition.components) {
    type_one += c.kind == ComponentKind::type_one;
    type_two += c.kind == ComponentKind::type_two;
  }
  Table t;
  t.params = {{"a", integer(o.a)}, {"q", integer(o.q)}, {"x", o.x}, {"U", U}};
  t.columns = {"direct_re", "direct_im",  "decomposed_re", "decomposed_im",
               "abs_diff",  "rel_diff",   "components",    "type_one",
               "type_two",  "identity_n_max", "identity_max_error"};
  t.rows.push_back({direct.value.real(), direct.value.imag(), split.value.real(),
                    split.value.imag(), diff, diff / std::max(std::abs(direct.value), 1e-300),
                    integer(static_cast<std::uint64_t>(decomposition.components.size())),
                    integer(type_one), integer(type_two), integer(id_max), identity_error});
  return t;
}

Table cmd_prime_power_gap(const Options& o, const Config& cfg, const CLI::App&) {
  ExpSumQuery{o.a, o.q, o.x}.validate();
  const auto tables = make_tables(2 * o.x, cfg);
  const auto g = prime_power_gap(o.q, o.a, o.x, tables);
  Table t;
  t.params = {{"q", integer(o.q)}, {"a", integer(o.a)}, {"x", o.x}};
  t.columns = {"gap", "envelope", "sqrt_envelope", "terms"};
  t.rows.push_back({g.gap, g.envelope, g.sqrt_envelope, integer(g.terms)});
  return t;
}

Table cmd_theorem2_root(const Options&, const Config&, const CLI::App&) {
  const auto r = theorem2_root();
  const auto general = baker_root({23.0 / 21.0, std::nullopt, 1e-12});
  Table t;
  t.columns = {"root", "residual", "iterations", "baker_root_23_21", "difference"};
  t.rows.push_back({r.root, r.residual, integer(static_cast<std::uint64_t>(r.iterations)),
                    general.root, std::abs(r.root - general.root)});
  return t;
}

Table cmd_baker_root(const Options& o, const Config&, const CLI::App& sub) {
  RootQuery query;
  query.alpha = parse_fraction(o.alpha_text);
  query.tolerance = o.tol;
  if (given(sub, "--lo") || given(sub, "--hi")) {
    const auto def = query.effective_bracket();
    query.bracket = {given(sub, "--lo") ? o.lo : def.first, given(sub, "--hi") ? o.hi : def.second};
  }
  const auto bracket = query.effective_bracket();
  const auto r = baker_root(query);
  Table t;
  t.params = {{"alpha", o.alpha_text}, {"tol", o.tol}};
  t.columns = {"root", "residual", "iterations", "bracket_lo", "bracket_hi"};
  t.rows.push_back({r.root, r.residual, integer(static_cast<std::uint64_t>(r.iterations)),
                    bracket.first, bracket.second});
  return t;
}

Table cmd_ternary(const Options& o, const Config& cfg, const CLI::App&) {
  if (12.0 * o.x * o.x > 1e15) throw BudgetError("ternary: x too large");
  const auto counts = ternary_count(o.x, o.thetas, cfg.policy());
  Table t;
  t.params = {{"x", o.x}};
  t.columns = {"theta", "count", "total", "fraction", "normalized"};
  for (const auto& c : counts) {
    t.rows.push_back({c.theta, integer(c.count), integer(c.total), c.fraction, c.normalized});
  }
  return t;
}

Table cmd_garaev(const Options& o, const Config& cfg, const CLI::App& sub) {
  const auto tables = make_tables(static_cast<double>(o.x_int) + 1, cfg);
  Table t;
  t.params = {{"x", integer(o.x_int)}, {"q", integer(o.q)}};
  t.columns = {"lambda", "count"};
  if (given(sub, "--lambda")) {
    t.rows.push_back({integer(o.lambda % std::max<std::uint64_t>(o.q, 1)),
                      integer(garaev_congruence_count(o.x_int, o.q, o.lambda, tables.primes))});
    return t;
  }
  const auto counts = garaev_counts(o.x_int, o.q, tables.primes);
  for (std::uint64_t l = 0; l < counts.size(); ++l) t.rows.push_back({integer(l), integer(counts[l])});
  return t;
}

Table cmd_compare_bounds(const Options& o, const Config&, const CLI::App&) {
  Table t;
  t.params = {{"Q", o.Q}};
  t.columns = {"bound", "exponent_label", "exponent", "value"};
  for (const auto& r : comparison_table(o.Q)) {
    t.rows.push_back({r.name, r.exponent_label, r.exponent, r.value});
  }
  return t;
}

Table cmd_exponent_fit(const Options& o, const Config& cfg, const CLI::App&) {
  std::vector<std::pair<double, double>> series;
  Table t;
  if (!o.theorem1_scales.empty()) {
    if (!o.points.empty()) throw ParameterError("exponent-fit: use --points or --theorem1, not both");
    const double largest = *std::max_element(o.theorem1_scales.begin(), o.theorem1_scales.end());
    const auto tables = make_tables(2 * largest, cfg);
    for (const double s : o.theorem1_scales) {
      series.emplace_back(s, theorem1_report(s, s, tables, cfg.policy(), cfg.max_q_scan).lhs);
    }
    t.params = {{"source", std::string("theorem1 x=Q")}};
  } else {
    for (const auto& p : o.points) {
      const auto colon = p.find(':');
      if (colon == std::string::npos) throw ParameterError("exponent-fit: points are scale:value");
      series.emplace_back(parse_fraction(p.substr(0, colon)), parse_fraction(p.substr(colon + 1)));
    }
    t.params = {{"source", std::string("points")}};
  }
  const auto fit = exponent_fit(series);
  t.columns = {"scale", "value", "residual", "slope", "intercept", "residual_norm"};
  for (std::size_t i = 0; i < series.size(); ++i) {
    t.rows.push_back({series[i].first, series[i].second, fit.residuals[i], fit.slope,
                      fit.intercept, fit.residual_norm});
  }
  return t;
}

Table cmd_choose_u(const Options& o, const Config&, const CLI::App&) {
  if (o.theorem != 1 && o.theorem != 3) throw ParameterError("choose-u: --theorem must be 1 or 3");
  const double U = choose_U(o.theorem == 1 ? Theorem::one : Theorem::three, o.Q, o.x);
  Table t;
  t.params = {{"theorem", integer(static_cast<std::uint64_t>(o.theorem))}, {"Q", o.Q}, {"x", o.x}};
  t.columns = {"U", "x_over_U", "cube_root_x"};
  t.rows.push_back({U, o.x / U, std::cbrt(o.x)});
  return t;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential sums with Kloosterman fractions over primes", kToolName};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  Config cfg;
  std::string format = "csv";
  app.add_option("--format", format, "csv, json or pretty")
      ->check(CLI::IsMember({"csv", "json", "pretty"}));
  app.add_option("--output", cfg.output, "write the report to this file instead of stdout");
  app.add_option("--workers", cfg.workers, "worker threads (wall time only)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-q-scan", cfg.max_q_scan, "largest modulus for max-over-a scans")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-sieve", cfg.max_sieve, "largest sieve limit")->check(CLI::PositiveNumber);
  app.add_flag("--timing", cfg.timing, "include runtimes in reports");

  Options o;
  std::map<const CLI::App*, Handler> handlers;
  auto sub = [&](const char* name, const char* help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    handlers[s] = std::move(h);
    return s;
  };

  auto* s = sub("sum", "S_q(a;x) over primes x <= p < 2x", cmd_sum);
  s->add_option("--a", o.a)->required();
  s->add_option("--q", o.q)->required();
  s->add_option("--x", o.x)->required();
  s->add_option("--weight", o.weight, "unit, von_mangoldt or log_prime");
  s->add_option("--method", o.inverse_method, "direct or batched");

  s = sub("max-sum", "max over (a,q)=1 of |S_q(a;x)|", cmd_max_sum);
  s->add_option("--q", o.q)->required();
  s->add_option("--x", o.x)->required();

  s = sub("avg-max", "sum over q ~ Q of max_a |S_q(a;x)| against its bound", cmd_avg_max);
  s->add_option("--Q", o.Q)->required();
  s->add_option("--x", o.x)->required();

  s = sub("fixed-a-avg", "sum over q ~ Q of |S_q(a;x)| against its bound", cmd_fixed_a_avg);
  s->add_option("--a", o.a)->required();
  s->add_option("--Q", o.Q)->required();
  s->add_option("--x", o.x)->required();

  s = sub("kloosterman", "K(a,b;q), or a Weil-bound sweep over primes", cmd_kloosterman);
  s->add_option("--a", o.a);
  s->add_option("--b", o.b);
  s->add_option("--q", o.q);
  s->add_option("--weil-sweep", o.weil_sweep, "max |K(a,b;p)| for every prime p up to this");

  s = sub("short-sum", "sum over Y < n <= Z of e(a n^-1 / q)", cmd_short_sum);
  s->add_option("--a", o.a)->required();
  s->add_option("--q", o.q)->required();
  s->add_option("--Y", o.Y)->required();
  s->add_option("--Z", o.Z)->required();

  s = sub("weil-ratio", "short sum against gcd(a,q)((Z-Y)/q+1) + q^(1/2)", cmd_weil_ratio);
  s->add_option("--a", o.a);
  s->add_option("--q", o.q);
  s->add_option("--Y", o.Y);
  s->add_option("--Z", o.Z);
  s->add_option("--q-max", o.q_max, "grid over primes 101 <= q <= q-max with (Y,Z) = (0,q/2)");

  s = sub("bilinear", "bilinear form W_{a,q} or its averaged bound reports", cmd_bilinear);
  s->add_option("--a", o.a);
  s->add_option("--q", o.q);
  s->add_option("--L", o.L)->required();
  s->add_option("--M", o.M_real)->required();
  s->add_option("--alpha", o.alpha_family, "ones, mobius, primes or alternating");
  s->add_option("--beta", o.beta_family, "unit (Type I) or a coefficient family");
  s->add_option("--restrict-x", o.restrict_x, "only pairs with x <= lm < 2x");
  s->add_option("--report", o.report, "none, lemma4, lemma5, lemma6 or lemma6-fixed-a");
  s->add_option("--Q", o.Q);
  s->add_option("--k", o.k);

  s = sub("jcount", "J^(k)_M(q)", cmd_jcount);
  s->add_option("--k", o.k)->required();
  s->add_option("--M", o.M)->required();
  s->add_option("--q", o.q)->required();
  s->add_option("--method", o.count_method, "naive or convolution");

  s = sub("jcount-avg", "sum over q ~ Q of J^(k)_M(q) against Q M^k + M^(2k)", cmd_jcount_avg);
  s->add_option("--k", o.k)->required();
  s->add_option("--M", o.M)->required();
  s->add_option("--Q", o.Q)->required();

  s = sub("unitfrac", "solutions of 1/n_1+...+1/n_k = 1/n_(k+1)+...+1/n_2k", cmd_unitfrac);
  s->add_option("--k", o.k)->required();
  s->add_option("--N", o.N)->required();
  s->add_option("--method", o.count_method, "naive or convolution");

  s = sub("squarefull", "number of square-full n <= x", cmd_squarefull);
  s->add_option("--x", o.x_int)->required();

  s = sub("vaughan-check", "Vaughan decomposition against the direct Lambda-weighted sum",
          cmd_vaughan_check);
  s->add_option("--a", o.a)->required();
  s->add_option("--q", o.q)->required();
  s->add_option("--x", o.x)->required();
  s->add_option("--U", o.U, "cutoff, default x^(1/3)");
  s->add_option("--identity-max", o.identity_max, "check the identity for n up to this");

  s = sub("prime-power-gap", "contribution of p^k ~ x with k >= 2", cmd_prime_power_gap);
  s->add_option("--q", o.q)->required();
  s->add_option("--a", o.a)->required();
  s->add_option("--x", o.x)->required();

  sub("theorem2-root", "root of 42t - 65 + 38 log((21t - 19)/4)", cmd_theorem2_root);

  s = sub("baker-root", "root of the general ternary-exponent equation", cmd_baker_root);
  s->add_option("--alpha", o.alpha_text, "alpha in (1,2), decimal or p/q");
  s->add_option("--lo", o.lo);
  s->add_option("--hi", o.hi);
  s->add_option("--tol", o.tol);

  s = sub("ternary", "prime triples with large P+(p1p2+p1p3+p2p3)", cmd_ternary);
  s->add_option("--x", o.x)->required();
  s->add_option("--theta", o.thetas, "comma-separated exponents")->delimiter(',');

  s = sub("garaev", "prime triples with p1(p2+p3) = lambda (mod q)", cmd_garaev);
  s->add_option("--x", o.x_int)->required();
  s->add_option("--q", o.q)->required();
  s->add_option("--lambda", o.lambda, "single residue; default all");

  s = sub("compare-bounds", "bound exponents at x = Q", cmd_compare_bounds);
  s->add_option("--Q", o.Q)->required();

  s = sub("exponent-fit", "log-log slope of a series", cmd_exponent_fit);
  s->add_option("--points", o.points, "scale:value pairs")->delimiter(',');
  s->add_option("--theorem1", o.theorem1_scales, "measure avg-max at x = Q for these Q")
      ->delimiter(',');

  s = sub("choose-u", "the Vaughan cutoff used for theorem 1 or 3", cmd_choose_u);
  s->add_option("--theorem", o.theorem)->required();
  s->add_option("--Q", o.Q)->required();
  s->add_option("--x", o.x)->required();

  std::vector<const char*> argv{kToolName};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitParameter;
  }
  cfg.format = format == "json" ? Format::json : format == "pretty" ? Format::pretty : Format::csv;

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    Table table = handlers.at(chosen)(o, cfg, *chosen);
    for (const auto& w : table.warnings) err << "warning: " << w << '\n';
    std::ostringstream text;
    switch (cfg.format) {
      case Format::csv:
        write_csv(table, text);
        break;
      case Format::json:
        write_json(table, chosen->get_name(), cfg, text);
        break;
      case Format::pretty:
        write_pretty(table, chosen->get_name(), text);
        break;
    }
    if (cfg.output.empty()) {
      out << text.str();
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw ParameterError("cannot open output file " + cfg.output);
      file << text.str();
    }
    return kExitOk;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const NotInvertible& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace kfsum::cli
