#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cyclocert/certifier.hpp"
#include "cyclocert/cli.hpp"
#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/factorint.hpp"
#include "cyclocert/linforms.hpp"
#include "cyclocert/quadfield.hpp"

using namespace cyclocert;

namespace {

using Clock = std::chrono::steady_clock;

Interval dec(const char* s) { return Interval::from_decimal(s); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0;
  double limit = 0;

  void add(std::string name, bool ok, std::string detail = "") {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }
  bool passed() const {
    if (seconds > limit) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
  }
};

std::string join(const std::vector<mpz_class>& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ",") + x.get_str();
  return s;
}

// -- 1 ----------------------------------------------------------------------

Criterion table1_invariants() {
  Criterion c{1, "Table 1 invariants (h exact, unit exact, |R| to 30 digits)", {}, 0, 1.0};
  struct Row {
    unsigned long l, h;
    long ua, ub;
    const char* R;
  };
  const Row rows[] = {
      {17, 1, 8, 2, "2.09471254726110129424482284606552865345315105"},
      {19, 1, 0, 0, "3.1415926535897932384626433832795028841971694"},
      {23, 3, 0, 0, "3.1415926535897932384626433832795028841971694"},
      {29, 1, 5, 1, "1.64723114637109571062485861044361966350441443"},
      {31, 3, 0, 0, "3.1415926535897932384626433832795028841971694"},
      {37, 1, 12, 2, "2.49177985264491197042979253715662276162104958"},
      {41, 1, 64, 10, "4.15912713462618001310854497357220128708512763"},
  };
  const auto t0 = Clock::now();
  for (const auto& r : rows) {
    const QuadraticField f = build_field(r.l);
    const bool unit_ok = r.ua ? (f.unit && f.unit->a == r.ua && f.unit->b == r.ub) : !f.unit;
    const bool R_ok = certainly_less(abs(f.regulator - dec(r.R)), dec("1e-30"));
    c.add("l=" + std::to_string(r.l), f.h == r.h && unit_ok && R_ok,
          "h=" + std::to_string(f.h) +
              " unit=" + (f.unit ? to_json(*f.unit)["label"].get<std::string>() : std::string("none")) +
              " |R|=" + f.regulator.mid_string(32));
  }
  c.seconds = seconds_since(t0);
  return c;
}

// -- 2 ----------------------------------------------------------------------

Criterion key_factorizations() {
  Criterion c{2, "Key factorizations", {}, 0, 10.0};
  const auto t0 = Clock::now();
  const std::pair<const char*, const char*> cases[] = {
      {"2^43-1", "431 * 9719 * 2099863"}, {"2^37-1", "223 * 616318177"}, {"2^41-1", "13367 * 164511353"}};
  for (auto [expr, want] : cases) {
    const auto r = factorize(parse_expression(expr));
    c.add(expr, r.complete() && r.to_string() == want, r.to_string());
  }
  const auto rep = factorize(parse_expression("phi(23,10)"));  // (10^23-1)/9
  const bool prime = rep.complete() && rep.factors.size() == 1 && rep.factors.begin()->second == 1;
  c.add("(10^23-1)/9", prime, std::string(prime ? "prime" : "not prime") + ", certainty " + to_string(rep.certainty));
  c.seconds = seconds_since(t0);
  return c;
}

// -- 3 ----------------------------------------------------------------------

struct Table2Search {
  unsigned long ell;
  SearchResult result;
};

Criterion table2_search(std::vector<Table2Search>& found) {
  Criterion c{3, "Table 2 search reproduction (l = 17, 19, 23)", {}, 0, 3600.0};
  const auto t0 = Clock::now();
  for (unsigned long l : {17UL, 19UL, 23UL}) {
    const auto row = *table2_row(l);
    const auto t1 = *table1_row(l);
    const SearchResult r = search_solutions(l, 2, t1.x1_threshold - 1);
    found.push_back({l, r});
    std::vector<mpz_class> want(row.x1.begin(), row.x1.end());
    const auto xs = r.distinct_x();
    const std::string mn = r.min_prime() ? r.min_prime()->get_str() : "-";
    const std::string mx = r.max_prime() ? r.max_prime()->get_str() : "-";
    c.add("l=" + std::to_string(l) + " x1 set", xs == want && r.failures.empty(),
          "found {" + join(xs) + "}, recorded {" + join(want) + "}" +
              (r.failures.empty() ? "" : ", " + std::to_string(r.failures.size()) + " budget failures"));
    c.add("l=" + std::to_string(l) + " min/max prime", mn == row.p_min && mx == row.p_max,
          "found " + mn + " / " + mx + ", recorded " + row.p_min + " / " + row.p_max);
  }
  c.seconds = seconds_since(t0);
  return c;
}

// -- 4 ----------------------------------------------------------------------

Criterion matveev() {
  Criterion c{4, "Matveev constant C(3) > 1e10, stable to 30 digits at 128/192/256 bits", {}, 0, 60.0};
  const auto t0 = Clock::now();
  for (int kappa : {1, 2}) {
    std::vector<std::string> d;
    bool big = true;
    for (long bits : {128L, 192L, 256L}) {
      PrecisionScope scope(bits);
      const Interval v = matveev_constant(3, kappa);
      big = big && certainly_less(dec("1e10"), v);
      d.push_back(v.mid_string(30));
    }
    c.add("kappa=" + std::to_string(kappa), big && d[0] == d[1] && d[1] == d[2], d[0] + " / " + d[1] + " / " + d[2]);
  }
  c.seconds = seconds_since(t0);
  return c;
}

// -- 5 ----------------------------------------------------------------------

Criterion l43() {
  Criterion c{5, "l = 43 branch bounds", {}, 0, 60.0};
  const auto t0 = Clock::now();
  const QuadraticField f = build_field(43);
  const Interval l3 = log(Interval(3));
  const Interval lmin = log(Interval(87));
  const Interval q43 = Interval(43) * l3, q44 = Interval(44) * l3;
  c.add("field h=1, |R|=pi", f.h == 1 && certainly_less(abs(f.regulator - Interval::pi()), dec("1e-40")));

  const WorstBound low = theorem2_worst_bound(43, f.h, f.regulator, f.kappa, lmin, q43);
  c.add("q < 3^43: bound <= 4.7e16", certainly_less_equal(low.value, dec("4.7e16")), "bound " + low.value.hi_string(8));

  const WorstBound hi = theorem2_worst_bound(43, f.h, f.regulator, f.kappa, q44, q44);
  const Interval paper = dec("2.8e13") * q44 * (log(q44) + Interval(32));
  const Interval ratio = hi.value / paper;
  c.add("q = 3^44: bound within factor 1.02 of 2.8e13 (log q)(log log q + 32)",
        certainly_less(ratio, dec("1.02")) && certainly_less(Interval(1) / dec("1.02"), ratio),
        "bound " + hi.value.hi_string(8) + ", formula " + paper.hi_string(8) + ", ratio " + ratio.mid_string(6));

  const GapChain chain = gap_chain(f, 3, LemmaFiveConstant::pi);
  const SweepResult s = sweep_q(f, chain, 512);
  for (const auto& b : s.branches)
    c.add("branch " + b.regime + " below 0.397 pi max{q^(49/43), 3^49}", b.certified,
          std::to_string(b.cells) + " cells, min margin " + b.margin.lo_string(6));
  c.add("two branches and tail dominance", s.branches.size() == 2 && s.tail_dominance);
  c.seconds = seconds_since(t0);
  return c;
}

// -- 6 ----------------------------------------------------------------------

Criterion sweep() {
  Criterion c{6, "certify --range 17..199 certifies every prime", {}, 0, 300.0};
  const auto t0 = Clock::now();
  std::vector<unsigned long> ells;
  for (auto l : primes_up_to(199))
    if (l >= 17) ells.push_back(l);
  RunConfig cfg;
  const CommandOutput out = cmd_certify(ells, cfg);
  std::size_t certified = 0;
  std::string bad;
  for (const auto& r : out.report["reports"]) {
    if (r.contains("verdict") && r["verdict"] == "certified_at_most_four") {
      ++certified;
    } else {
      bad += (bad.empty() ? "" : ",") + std::to_string(r["ell"].get<unsigned long>());
    }
  }
  c.add("all verdicts certified", certified == ells.size() && out.exit_code == kExitOk,
        std::to_string(certified) + "/" + std::to_string(ells.size()) + (bad.empty() ? "" : " failing " + bad));
  c.seconds = seconds_since(t0);
  return c;
}

// -- 7 ----------------------------------------------------------------------

Criterion properties(const std::vector<Table2Search>& found) {
  Criterion c{7, "Property suites", {}, 0, 120.0};
  const auto t0 = Clock::now();

  {
    std::size_t bad = 0, n = 0;
    for (auto l : primes_up_to(41)) {
      if (l < 3) continue;
      const GaussPair g = gauss_pair(l);
      for (long x = 2; x <= 50; ++x, ++n) {
        const mpz_class a = g.eval_A(x), b = g.eval_B(x);
        if (a * a - g.D * b * b != 4 * eval_phi(l, x)) ++bad;
      }
    }
    c.add("Gauss identity 3 <= l <= 41, x <= 50", bad == 0, std::to_string(n) + " cases, " + std::to_string(bad) + " bad");
  }

  {
    std::size_t bad = 0, n = 0;
    for (unsigned long a = 2; a <= 12; ++a)
      for (unsigned long k = 1; k <= 20; ++k, ++n) {
        mpz_class an;
        mpz_ui_pow_ui(an.get_mpz_t(), a, k);
        const auto f = factorize(an - 1);
        bool oracle = false;
        for (const auto& [r, e] : f.factors) {
          (void)e;
          if (r.fits_ulong_p() && a % r.get_ui() == 0) continue;
          bool earlier = false;
          for (unsigned long m = 1; m < k && !earlier; ++m) {
            mpz_class am;
            mpz_ui_pow_ui(am.get_mpz_t(), a, m);
            earlier = (am - 1) % r == 0;
          }
          oracle = oracle || !earlier;
        }
        if (has_primitive_prime_factor(a, k).exists != oracle) ++bad;
      }
    c.add("Zsigmondy oracle a <= 12, n <= 20", bad == 0, std::to_string(n) + " cases, " + std::to_string(bad) + " bad");
  }

  {
    std::size_t bad = 0, n = 0;
    FactorOptions o;
    o.budget_ticks = 20'000'000;
    o.trial_bound = 100'000;
    for (auto l : primes_up_to(23)) {
      if (l < 3) continue;
      for (long x = 2; x <= 200; ++x, ++n) {
        const mpz_class v = eval_phi(l, x);
        const bool div = mpz_divisible_ui_p(v.get_mpz_t(), l);
        if (div != (x % static_cast<long>(l) == 1)) ++bad;
        if (div && mpz_divisible_ui_p(v.get_mpz_t(), l * l)) ++bad;
        if (x > 50) continue;
        FactorizationResult fr;
        try {
          fr = factorize(v, o);
        } catch (const FactorizationBudgetExceeded& ex) {
          fr = ex.partial();
        }
        for (const auto& [r, e] : fr.factors) {
          (void)e;
          if (r % l != 1 && r != l) ++bad;
        }
      }
    }
    c.add("Nagell congruence l <= 23", bad == 0, std::to_string(n) + " values, " + std::to_string(bad) + " bad");
  }

  {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<long> d(-1'000'000'000L, 1'000'000'000L);
    const long Ds[] = {17, -19, -23, 29, -31, 37, 41, -43};
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const long D = Ds[i % 8];
      long a = d(rng), b = d(rng), e = d(rng), f = d(rng);
      if ((a - b) % 2) ++a;
      if ((e - f) % 2) ++e;
      const QuadElement x(a, b, D), y(e, f, D);
      if ((x * y).norm() != x.norm() * y.norm()) ++bad;
    }
    c.add("norm multiplicativity, 1000 random pairs", bad == 0, std::to_string(bad) + " bad");
  }

  {
    std::size_t n = 0, nonzero = 0, literal = 0, scaled = 0, middle = 0;
    std::string first_fail;
    std::vector<std::pair<unsigned long, mpz_class>> sols;
    for (const auto& s : found)
      for (const auto& x : s.result.distinct_x()) sols.emplace_back(s.ell, x);
    sols.emplace_back(37, 2);
    sols.emplace_back(41, 2);
    for (const auto& [l, x] : sols) {
      const QuadraticField f = build_field(l);
      const LambdaChain ch = lambda_chain(f, represent_phi(l, x));
      ++n;
      nonzero += ch.nonzero;
      literal += ch.literal_holds;
      scaled += ch.scaled_holds;
      middle += ch.middle_holds;
      if (!ch.literal_holds && first_fail.empty())
        first_fail = "; e.g. l=" + std::to_string(l) + " x=" + x.get_str() + ": |Lambda|=" + ch.lambda_abs.mid_string(6) +
                     " vs 1.2588h/x=" + ch.literal_bound.mid_string(6);
    }
    c.add("Lambda chain 0 < |Lambda| < 1.2588h/x on every found solution", nonzero == n && literal == n,
          std::to_string(n) + " solutions: nonzero " + std::to_string(nonzero) + ", below 1.2588h/x " +
              std::to_string(literal) + ", below 1.2588h sqrt|D|/x " + std::to_string(scaled) +
              ", below 2hY sqrt|D|/|X-Y sqrt D| " + std::to_string(middle) + first_fail);
  }

  {
    std::size_t bad = 0;
    const Interval lo = log(dec("3.6e10")), hi = log(dec("1e30"));
    for (int i = 0; i < 50; ++i) {
      const Interval U = exp(lo + (hi - lo) * Interval(i) / Interval(49)) * (i == 0 ? dec("1.0000000001") : Interval(1));
      const Interval star = superlog_fixed_point(U);
      if (!certainly_less_equal(star / Interval(2), resolve_superlog(U))) ++bad;
    }
    c.add("superlog fixed point at 50 grid points", bad == 0, std::to_string(bad) + " bad");
  }
  c.seconds = seconds_since(t0);
  return c;
}

// -- 8 ----------------------------------------------------------------------

Criterion ledger() {
  Criterion c{8, "Discrepancy ledger emits the Table 1 anomalies", {}, 0, 600.0};
  const auto t0 = Clock::now();
  auto has = [](const CertificateReport& r, const std::string& item) {
    return std::any_of(r.discrepancies.begin(), r.discrepancies.end(),
                       [&](const Discrepancy& d) { return d.item == item; });
  };
  const CertificateReport r31 = certify(31);
  c.add("l=31 x2 exponent flagged", has(r31, "table1.l=31.x2_exponent"));
  std::size_t x3 = 0;
  for (unsigned long l : {17UL, 19UL, 23UL, 29UL, 31UL}) {
    const CertificateReport r = l == 31 ? r31 : certify(l);
    x3 += has(r, "table1.l=" + std::to_string(l) + ".x3_fixed_term");
  }
  c.add("x3 column flagged for l = 17, 19, 23, 29, 31", x3 == 5, std::to_string(x3) + "/5 rows flagged");
  c.seconds = seconds_since(t0);
  return c;
}

}  // namespace

int main() {
  std::vector<Table2Search> found;
  std::vector<std::function<Criterion()>> runs = {
      table1_invariants, key_factorizations, [&] { return table2_search(found); }, matveev, l43, sweep,
      [&] { return properties(found); },     ledger};
  bool all = true;
  for (auto& run : runs) {
    const Criterion c = run();
    const bool ok = c.passed();
    all = all && ok;
    std::printf("CRITERION %d %s  %s  (%.2fs, limit %.0fs)\n", c.number, ok ? "PASS" : "FAIL", c.title.c_str(),
                c.seconds, c.limit);
    for (const auto& k : c.checks)
      std::printf("    [%s] %s%s%s\n", k.ok ? "ok" : "xx", k.name.c_str(), k.detail.empty() ? "" : ": ",
                  k.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
