#include "cyclocert/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/errors.hpp"

namespace cyclocert {

namespace {

constexpr int kDigits = 40;

std::string str(const mpz_class& v) { return v.get_str(); }

Json opt_str(const std::optional<mpz_class>& v) { return v ? Json(v->get_str()) : Json(nullptr); }

Json cases_json(const std::vector<Theorem2Case>& cs) {
  Json a = Json::array();
  for (auto c : cs) a.push_back(to_string(c));
  return a;
}

std::string unit_label(const QuadElement& u) {
  std::ostringstream s;
  mpz_class a = u.a, b = u.b;
  const bool half = mpz_odd_p(a.get_mpz_t()) || mpz_odd_p(b.get_mpz_t());
  if (!half) {
    a /= 2;
    b /= 2;
  }
  s << (half ? "(" : "") << a.get_str() << (b < 0 ? "-" : "+");
  const mpz_class ab = abs(b);
  if (ab != 1) s << ab.get_str();
  s << "sqrt(" << u.D << ")" << (half ? ")/2" : "");
  return s.str();
}

std::uint64_t parse_u64(const char* name, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return n;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(name) + ": not a non-negative integer: " + v);
  }
}

FactorOptions factor_options(const RunConfig& cfg, FactorCache* cache) {
  FactorOptions o;
  o.budget_ticks = cfg.budget;
  o.trial_bound = cfg.trial_bound;
  o.cache = cache;
  return o;
}

std::unique_ptr<FactorCache> open_cache(const RunConfig& cfg) {
  if (cfg.cache_path.empty()) return nullptr;
  return std::make_unique<FactorCache>(cfg.cache_path);
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"kind", kind}, {"message", message}};
}

}  // namespace

const char* to_string(OutputFormat f) { return f == OutputFormat::tsv ? "tsv" : "json"; }

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::json;
  if (s == "tsv") return OutputFormat::tsv;
  throw std::invalid_argument("format must be json or tsv: " + s);
}

void RunConfig::validate() const {
  if (budget == 0) throw std::invalid_argument("budget must be > 0");
  if (precision_bits < 128) throw std::invalid_argument("precision bits must be >= 128");
  if (jobs == 0) throw std::invalid_argument("jobs must be >= 1");
}

RunConfig RunConfig::from_env() {
  RunConfig c;
  if (const char* v = std::getenv("CYCLOCERT_BUDGET")) c.budget = parse_u64("CYCLOCERT_BUDGET", v);
  if (const char* v = std::getenv("CYCLOCERT_TRIAL_BOUND")) c.trial_bound = parse_u64("CYCLOCERT_TRIAL_BOUND", v);
  if (const char* v = std::getenv("CYCLOCERT_PRECISION_BITS"))
    c.precision_bits = static_cast<long>(parse_u64("CYCLOCERT_PRECISION_BITS", v));
  if (const char* v = std::getenv("CYCLOCERT_JOBS")) c.jobs = static_cast<unsigned>(parse_u64("CYCLOCERT_JOBS", v));
  if (const char* v = std::getenv("CYCLOCERT_CACHE")) c.cache_path = v;
  if (const char* v = std::getenv("CYCLOCERT_FORMAT")) c.format = parse_format(v);
  return c;
}

// ---------------------------------------------------------------------------
// parsing

mpz_class parse_expression(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  static const std::regex dec_re("[0-9]+");
  static const std::regex pow_re("([0-9]+)\\^([0-9]+)([+-])1");
  static const std::regex phi_re("phi\\(([0-9]+),([0-9]+)\\)");
  std::smatch m;
  if (std::regex_match(s, m, dec_re)) return mpz_class(s);
  if (std::regex_match(s, m, pow_re)) {
    const mpz_class a(m[1].str());
    const unsigned long b = parse_u64("exponent", m[2].str());
    if (b > 1'000'000) throw ParseError("exponent too large: " + m[2].str());
    mpz_class v;
    mpz_pow_ui(v.get_mpz_t(), a.get_mpz_t(), b);
    v += m[3].str() == "+" ? 1 : -1;
    if (v < 1) throw ParseError("expression must be a positive integer: " + text);
    return v;
  }
  if (std::regex_match(s, m, phi_re)) {
    const unsigned long l = parse_u64("phi index", m[1].str());
    if (l == 0 || l > 100'000) throw ParseError("phi index out of range: " + m[1].str());
    const mpz_class x(m[2].str());
    if (x < 2) throw ParseError("phi argument must be >= 2");
    return eval_phi(l, x);
  }
  throw ParseError("cannot parse expression: " + text);
}

std::pair<unsigned long, unsigned long> parse_range(const std::string& text) {
  static const std::regex re("\\s*([0-9]+)\\s*\\.\\.\\s*([0-9]+)\\s*");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ParseError("range must look like A..B: " + text);
  const unsigned long a = parse_u64("range", m[1].str()), b = parse_u64("range", m[2].str());
  if (a > b) throw ParseError("empty range: " + text);
  return {a, b};
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const Interval& v) {
  return Json{{"lo", v.lo_string(kDigits)}, {"hi", v.hi_string(kDigits)}, {"bits", v.precision()}};
}

Json to_json(const QuadElement& v) {
  return Json{{"a", str(v.a)}, {"b", str(v.b)}, {"D", v.D}, {"form", "(a+b*sqrt(D))/2"}, {"label", unit_label(v)}};
}

Json to_json(const QuadraticField& f) {
  Json j{{"ell", f.ell},
         {"D", f.D},
         {"h", f.h},
         {"kappa", f.kappa},
         {"imaginary", f.imaginary},
         {"abs_R", to_json(f.regulator)},
         {"below_paper_range", f.below_paper_range}};
  if (f.unit) {
    j["unit"] = to_json(*f.unit);
    j["unit_norm"] = f.unit_norm;
    j["R_label"] = "log(" + unit_label(*f.unit) + ")";
  } else {
    j["unit"] = nullptr;
    j["R_label"] = "pi i";
  }
  return j;
}

Json to_json(const FactorizationResult& r) {
  Json factors = Json::array();
  for (const auto& [p, e] : r.factors) factors.push_back(Json{{"p", str(p)}, {"e", e}});
  Json cof = Json::array();
  for (const auto& [c, e] : r.cofactors) cof.push_back(Json{{"n", str(c)}, {"e", e}});
  return Json{{"n", str(r.n)},
              {"factors", factors},
              {"cofactors", cof},
              {"complete", r.complete()},
              {"certainty", to_string(r.certainty)},
              {"text", r.to_string()},
              {"from_cache", r.from_cache},
              {"ticks",
               Json{{"trial_divisions", r.spent.trial_divisions},
                    {"pm1_mulmods", r.spent.pm1_mulmods},
                    {"rho_mulmods", r.spent.rho_mulmods},
                    {"total", r.spent.total()}}}};
}

Json to_json(const SolutionRecord& r) {
  return Json{{"ell", r.ell}, {"x", str(r.x)}, {"m", r.m}, {"p", str(r.p)}, {"q", str(r.q)},
              {"shape", to_string(r.shape)}};
}

Json to_json(const SearchResult& r) {
  Json recs = Json::array(), fails = Json::array(), rej = Json::array(), xs = Json::array();
  for (const auto& x : r.records) recs.push_back(to_json(x));
  for (const auto& f : r.failures) fails.push_back(Json{{"x", str(f.x)}, {"message", f.message}});
  for (const auto& f : r.rejected) rej.push_back(Json{{"x", str(f.x)}, {"reason", f.message}});
  for (const auto& x : r.distinct_x()) xs.push_back(str(x));
  return Json{{"records", recs},   {"count", r.records.size()},        {"distinct_x", xs},
              {"failures", fails}, {"rejected", rej},                  {"min_prime", opt_str(r.min_prime())},
              {"max_prime", opt_str(r.max_prime())}};
}

Json to_json(const BoundReport& r) {
  Json j{{"case", to_string(r.kase)}, {"ell", r.ell},          {"h", r.h},
         {"kappa", r.kappa},          {"abs_R", to_json(r.R)}, {"log_p", to_json(r.log_p)},
         {"log_q", to_json(r.log_q)}, {"C3", to_json(r.C3)},   {"m_upper", to_json(r.m_upper)},
         {"tied", cases_json(r.tied)}};
  j["U"] = r.U ? to_json(*r.U) : Json(nullptr);
  if (r.U) {
    try {
      j["superlog"] = to_json(resolve_superlog(*r.U));
    } catch (const DomainTooSmall&) {
      j["superlog"] = nullptr;
    }
  }
  return j;
}

Json to_json(const GapChain& g) {
  const std::string qe = std::to_string(g.q_exponent_num()) + "/" + std::to_string(g.q_exponent_den());
  Json j{{"ell", g.ell},
         {"x1_lower", str(g.x1_lower)},
         {"e", g.e},
         {"x2_lower", str(g.x2_lower)},
         {"x3_lower_fixed", str(g.x3_lower_fixed)},
         {"x3_lower", "max{q^(" + qe + "), " + str(g.x1_lower) + "^" + std::to_string(g.e * g.e) + "}"},
         {"c", to_json(g.c)},
         {"c_kind", to_string(g.c_kind)},
         {"M", "0.397*" + std::string(g.c_kind == LemmaFiveConstant::pi ? "pi" : "|R|") + "*max{q^(" + qe + "), " +
                   str(g.x1_lower) + "^" + std::to_string(g.e * g.e) + "}"},
         {"q_exponent", qe},
         {"crossover_log_q", to_json(g.crossover_log_q())}};
  j["q"] = opt_str(g.q);
  j["m5_lower"] = g.m5_lower ? to_json(*g.m5_lower) : Json(nullptr);
  return j;
}

Json to_json(const CertificateReport& r) {
  Json branches = Json::array();
  for (const auto& b : r.branches)
    branches.push_back(Json{{"regime", b.regime},
                            {"log_q_lo", to_json(b.log_q_lo)},
                            {"log_q_hi", to_json(b.log_q_hi)},
                            {"cases", cases_json(b.cases)},
                            {"worst_bound", to_json(b.worst_bound)},
                            {"M_at_worst", to_json(b.M_at_worst)},
                            {"margin", to_json(b.margin)},
                            {"cells", b.cells},
                            {"certified", b.certified},
                            {"note", b.note}});
  Json excl = Json::array();
  for (const auto& e : r.exclusions) excl.push_back(Json{{"x", str(e.x)}, {"reason", e.reason}});
  Json small = Json::array();
  for (const auto& s : r.small_cases) {
    Json sec = Json::array();
    for (const auto& x : s.second_solutions) sec.push_back(str(x));
    small.push_back(Json{{"record", to_json(s.record)},
                         {"escalation_limit", str(s.escalation_limit)},
                         {"escalation_candidates", s.escalation_candidates},
                         {"second_solutions", sec},
                         {"bound", to_json(s.bound)},
                         {"m5_lower", to_json(s.m5_lower)},
                         {"ideal_equation", s.ideal_equation},
                         {"below_1.3e17", s.below_paper_m_bound},
                         {"certified", s.certified}});
  }
  Json fails = Json::array();
  for (const auto& f : r.search_failures) fails.push_back(Json{{"x", str(f.x)}, {"message", f.message}});
  Json disc = Json::array();
  for (const auto& d : r.discrepancies)
    disc.push_back(Json{{"item", d.item}, {"recorded", d.recorded}, {"derived", d.derived}, {"flagged", true}});
  Json cmp = Json::array();
  for (const auto& c : r.paper_comparisons)
    cmp.push_back(Json{{"item", c.item}, {"recorded", c.paper}, {"ours", c.ours}, {"matches", c.matches}});
  Json j{{"ell", r.ell},
         {"verdict", to_string(r.verdict)},
         {"range_note", r.range_note},
         {"field", to_json(r.field)},
         {"C3", to_json(r.C3)},
         {"chain", to_json(r.chain)},
         {"branches", branches},
         {"tail_dominance", r.tail_dominance},
         {"exclusions", excl},
         {"small_cases", small},
         {"search_failures", fails},
         {"discrepancies", disc},
         {"comparisons", cmp},
         {"table_rows_checked", r.table_rows_checked},
         {"failure", r.failure}};
  j["chain_pi"] = r.chain_pi ? to_json(*r.chain_pi) : Json(nullptr);
  return j;
}

Json to_json(const OPNBound& b) {
  return Json{{"beta", b.beta}, {"k_max", b.k_max}, {"exponent", b.exponent},
              {"statement", "N < 2^(4^" + std::to_string(b.exponent) + ")"}};
}

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

std::string render(const CommandOutput& out, OutputFormat format) {
  if (format == OutputFormat::json) return dump_canonical(out.report);
  std::string s;
  for (const auto& row : out.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "\t" : "") + row[i];
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// commands

CommandOutput cmd_field(unsigned long ell, const RunConfig& cfg) {
  cfg.validate();
  PrecisionScope prec(cfg.precision_bits);
  if (!is_small_prime(ell)) throw NotPrime(std::to_string(ell) + " is not prime");
  const QuadraticField f = build_field(ell);
  CommandOutput out;
  out.report = Json{{"command", "field"}, {"field", to_json(f)}};
  out.rows.push_back({"ell", "D", "h", "kappa", "unit", "unit_norm", "abs_R_lo", "abs_R_hi"});
  out.rows.push_back({std::to_string(ell), std::to_string(f.D), std::to_string(f.h), std::to_string(f.kappa),
                      f.unit ? unit_label(*f.unit) : "-", f.unit ? std::to_string(f.unit_norm) : "-",
                      f.regulator.lo_string(kDigits), f.regulator.hi_string(kDigits)});
  return out;
}

CommandOutput cmd_search(unsigned long ell, const mpz_class& x_min, const mpz_class& x_max,
                         const std::optional<std::pair<mpz_class, mpz_class>>& pq, const RunConfig& cfg) {
  cfg.validate();
  if (!is_small_prime(ell) || ell < 3) throw NotPrime(std::to_string(ell) + " is not an odd prime");
  if (x_min < 2 || x_min > x_max) throw std::invalid_argument("search range must satisfy 2 <= x-min <= x-max");
  auto cache = open_cache(cfg);
  const SearchResult r = search_solutions(ell, x_min, x_max, pq, factor_options(cfg, cache.get()), cfg.jobs);
  CommandOutput out;
  out.report = Json{{"command", "search"}, {"ell", ell}, {"x_min", str(x_min)}, {"x_max", str(x_max)},
                    {"result", to_json(r)}};
  out.report["filter"] = pq ? Json{{"p", str(pq->first)}, {"q", str(pq->second)}} : Json(nullptr);
  out.rows.push_back({"ell", "x", "m", "p", "q"});
  for (const auto& rec : r.records)
    out.rows.push_back({std::to_string(ell), str(rec.x), std::to_string(rec.m), str(rec.p), str(rec.q)});
  for (const auto& f : r.failures) out.rows.push_back({"#budget", str(f.x), f.message});
  if (!r.failures.empty()) out.exit_code = kExitBudget;
  return out;
}

CommandOutput cmd_certify(const std::vector<unsigned long>& ells, const RunConfig& cfg) {
  cfg.validate();
  if (ells.empty()) throw std::invalid_argument("no primes to certify");
  auto cache = open_cache(cfg);
  CertifyOptions opts;
  opts.factor = factor_options(cfg, cache.get());
  const unsigned outer = std::min<std::size_t>(cfg.jobs, ells.size());
  opts.jobs = outer > 1 ? 1 : cfg.jobs;

  struct Slot {
    std::optional<CertificateReport> report;
    std::optional<std::pair<std::string, std::string>> error;
    bool budget = false;
  };
  std::vector<Slot> slots(ells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    PrecisionScope prec(cfg.precision_bits);
    for (std::size_t i; (i = next++) < ells.size();) {
      try {
        slots[i].report = certify(ells[i], opts);
      } catch (const FactorizationBudgetExceeded& e) {
        slots[i].error = {e.kind(), e.what()};
        slots[i].budget = true;
      } catch (const Error& e) {
        slots[i].error = {e.kind(), e.what()};
      } catch (const std::invalid_argument& e) {
        slots[i].error = {"InvalidArgument", e.what()};
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < outer; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CommandOutput out;
  Json reports = Json::array();
  bool any_error = false, any_budget = false, any_not = false;
  out.rows.push_back({"ell", "verdict", "D", "h", "e", "x1_lower", "min_margin", "cells", "small_cases", "flags",
                      "failure"});
  for (std::size_t i = 0; i < ells.size(); ++i) {
    const Slot& s = slots[i];
    if (s.error) {
      reports.push_back(Json{{"ell", ells[i]}, {"error", error_json(s.error->first, s.error->second)}});
      out.rows.push_back({std::to_string(ells[i]), "error", "", "", "", "", "", "", "", "", s.error->second});
      (s.budget ? any_budget : any_error) = true;
      continue;
    }
    const CertificateReport& r = *s.report;
    reports.push_back(to_json(r));
    if (!r.search_failures.empty()) any_budget = true;
    if (r.verdict != Verdict::certified_at_most_four) any_not = true;
    std::optional<Interval> margin;
    std::size_t cells = 0;
    for (const auto& b : r.branches) {
      cells += b.cells;
      if (!margin || certainly_less(b.margin, *margin)) margin = b.margin;
    }
    out.rows.push_back({std::to_string(r.ell), to_string(r.verdict), std::to_string(r.field.D),
                        std::to_string(r.field.h), std::to_string(r.chain.e), str(r.chain.x1_lower),
                        margin ? margin->lo_string(6) : "-", std::to_string(cells),
                        std::to_string(r.small_cases.size()), std::to_string(r.discrepancies.size()),
                        r.failure.empty() ? "-" : r.failure});
  }
  out.report = Json{{"command", "certify"}, {"reports", reports}};
  out.exit_code = any_error ? kExitInputError : any_budget ? kExitBudget : any_not ? kExitNotCertified : kExitOk;
  return out;
}

CommandOutput cmd_factor(const std::string& expression, const RunConfig& cfg) {
  cfg.validate();
  const mpz_class n = parse_expression(expression);
  auto cache = open_cache(cfg);
  FactorizationResult r;
  try {
    r = factorize(n, factor_options(cfg, cache.get()));
  } catch (const FactorizationBudgetExceeded& e) {
    r = e.partial();
  }
  CommandOutput out;
  const bool prime = r.complete() && r.factors.size() == 1 && r.factors.begin()->second == 1;
  out.report = Json{{"command", "factor"}, {"expression", expression}, {"result", to_json(r)}, {"prime", prime}};
  out.rows.push_back({"n", "factorization", "complete", "certainty"});
  out.rows.push_back({str(n), r.to_string(), r.complete() ? "true" : "false", to_string(r.certainty)});
  if (!r.complete()) out.exit_code = kExitBudget;
  return out;
}

CommandOutput cmd_bound(unsigned long ell, const mpz_class& p, const mpz_class& q, const RunConfig& cfg) {
  cfg.validate();
  PrecisionScope prec(cfg.precision_bits);
  if (!is_small_prime(ell)) throw NotPrime(std::to_string(ell) + " is not prime");
  const QuadraticField f = build_field(ell);
  const BoundReport b = theorem2_bound(f, p, q);
  CommandOutput out;
  out.report = Json{{"command", "bound"}, {"p", str(p)}, {"q", str(q)}, {"bound", to_json(b)}};
  out.rows.push_back({"ell", "p", "q", "case", "m_upper_hi"});
  out.rows.push_back({std::to_string(ell), str(p), str(q), to_string(b.kase), b.m_upper.hi_string(kDigits)});
  return out;
}

CommandOutput cmd_opn(unsigned long beta, const RunConfig& cfg) {
  cfg.validate();
  const OPNBound b = opn_bound(beta);
  CommandOutput out;
  out.report = Json{{"command", "opn"}, {"bound", to_json(b)}};
  out.rows.push_back({"beta", "k_max", "exponent"});
  out.rows.push_back({std::to_string(b.beta), std::to_string(b.k_max), std::to_string(b.exponent)});
  return out;
}

// ---------------------------------------------------------------------------
// command line

int run_cli(int argc, char** argv) {
  CLI::App app{"Certified bounds for x^l-1/(x-1) = p^m q"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> budget, trial_bound;
  std::optional<long> precision;
  std::optional<unsigned> jobs;
  std::optional<std::string> cache, format;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--budget", budget, "factorization budget in ticks");
    sub->add_option("--trial-bound", trial_bound, "trial-division bound");
    sub->add_option("--precision-bits", precision, "interval precision (>= 128)");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option("--cache", cache, "factorization cache file");
    sub->add_option("--format", format, "json or tsv");
  };

  unsigned long ell = 0;
  std::optional<unsigned long> ell_opt;
  std::string range, expr, x_min = "2", x_max;
  std::optional<std::string> p, q;
  unsigned long beta = 0;

  auto* field = app.add_subcommand("field", "field invariants of Q(sqrt(l*))");
  field->add_option("--ell", ell, "prime l")->required();
  common(field);

  auto* search = app.add_subcommand("search", "solutions of Phi_l(x) = p^m q");
  search->add_option("--ell", ell, "prime l")->required();
  search->add_option("--x-min", x_min, "smallest x");
  search->add_option("--x-max", x_max, "largest x")->required();
  search->add_option("--p", p, "restrict to this p");
  search->add_option("--q", q, "restrict to this q");
  common(search);

  auto* cert = app.add_subcommand("certify", "at most four solutions");
  auto* cert_ell = cert->add_option("--ell", ell_opt, "prime l");
  cert->add_option("--range", range, "A..B")->excludes(cert_ell);
  common(cert);

  auto* factor = app.add_subcommand("factor", "factor a^b-1, a^b+1, phi(l,x) or a decimal");
  factor->add_option("expression", expr, "expression")->required();
  common(factor);

  auto* bound = app.add_subcommand("bound", "upper bound for m given p and q");
  bound->add_option("--ell", ell, "prime l")->required();
  bound->add_option("--p", p, "prime p")->required();
  bound->add_option("--q", q, "prime q")->required();
  common(bound);

  auto* opn = app.add_subcommand("opn", "odd perfect number exponent bound");
  opn->add_option("--beta", beta, "beta >= 1")->required();
  common(opn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  RunConfig cfg;
  try {
    cfg = RunConfig::from_env();
    if (budget) cfg.budget = *budget;
    if (trial_bound) cfg.trial_bound = *trial_bound;
    if (precision) cfg.precision_bits = *precision;
    if (jobs) cfg.jobs = *jobs;
    if (cache) cfg.cache_path = *cache;
    if (format) cfg.format = parse_format(*format);
    cfg.validate();

    CommandOutput out;
    if (*field) {
      out = cmd_field(ell, cfg);
    } else if (*search) {
      std::optional<std::pair<mpz_class, mpz_class>> pq;
      if (p.has_value() != q.has_value()) throw std::invalid_argument("--p and --q go together");
      if (p) pq = std::make_pair(parse_expression(*p), parse_expression(*q));
      out = cmd_search(ell, parse_expression(x_min), parse_expression(x_max), pq, cfg);
    } else if (*cert) {
      std::vector<unsigned long> ells;
      if (ell_opt) {
        ells.push_back(*ell_opt);
      } else if (!range.empty()) {
        const auto [a, b] = parse_range(range);
        for (unsigned long l : primes_up_to(b))
          if (l >= a) ells.push_back(l);
      } else {
        throw std::invalid_argument("certify needs --ell or --range");
      }
      out = cmd_certify(ells, cfg);
    } else if (*factor) {
      out = cmd_factor(expr, cfg);
    } else if (*bound) {
      out = cmd_bound(ell, parse_expression(*p), parse_expression(*q), cfg);
    } else if (*opn) {
      out = cmd_opn(beta, cfg);
    }
    std::cout << render(out, cfg.format);
    return out.exit_code;
  } catch (const FactorizationBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace cyclocert
