#include "cyclocert/certifier.hpp"

#include <algorithm>
#include <set>

#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/errors.hpp"

namespace cyclocert {

namespace {

Interval dec(const char* s) { return Interval::from_decimal(s); }

std::string pow_str(unsigned long base, unsigned long e) { return std::to_string(base) + "^" + std::to_string(e); }

}  // namespace

const char* to_string(LemmaFiveConstant c) { return c == LemmaFiveConstant::pi ? "pi" : "abs_R"; }

const char* to_string(Verdict v) {
  return v == Verdict::certified_at_most_four ? "certified_at_most_four" : "not_certified";
}

// ---------------------------------------------------------------------------
// gap chain

Interval GapChain::crossover_log_q() const { return Interval(static_cast<long>(ell)) * log_of(x1_lower); }

Interval GapChain::M(const Interval& log_q) const {
  const Interval k = Interval(static_cast<long>(e * e)) / Interval(static_cast<long>(ell));
  return dec("0.397") * c * max(exp(k * log_q), Interval(x3_lower_fixed));
}

GapChain gap_chain(unsigned long ell, const mpz_class& x1_lower, const Interval& c, LemmaFiveConstant kind,
                   const std::optional<mpz_class>& q) {
  if (ell < 17) throw BelowRange("gap chain needs l >= 17");
  if (x1_lower < 2) throw std::invalid_argument("gap_chain: x1_lower must be >= 2");
  GapChain g;
  g.ell = ell;
  g.x1_lower = x1_lower;
  g.e = gap_exponent(ell);
  mpz_pow_ui(g.x2_lower.get_mpz_t(), x1_lower.get_mpz_t(), g.e);
  mpz_pow_ui(g.x3_lower_fixed.get_mpz_t(), x1_lower.get_mpz_t(), g.e * g.e);
  g.c = c;
  g.c_kind = kind;
  g.q = q;
  if (q) g.m5_lower = g.M(log_of(*q));
  return g;
}

GapChain gap_chain(const QuadraticField& field, const mpz_class& x1_lower, LemmaFiveConstant kind,
                   const std::optional<mpz_class>& q) {
  const Interval c = kind == LemmaFiveConstant::pi ? Interval::pi() : field.regulator;
  return gap_chain(field.ell, x1_lower, c, kind, q);
}

// ---------------------------------------------------------------------------
// q sweep

namespace {

struct CellResult {
  bool ok = false;
  Interval bound;
  Interval M;
  Interval margin;
  std::vector<Theorem2Case> cases;
  std::size_t cells = 0;
  Interval right;
};

CellResult check_cell(const QuadraticField& f, const GapChain& chain, const Interval& a, const Interval& b,
                      int depth) {
  const WorstBound wb = theorem2_worst_bound(f.ell, f.h, f.regulator, f.kappa, a, b);
  const Interval M = chain.M(a);
  CellResult r;
  r.bound = wb.value;
  r.M = M;
  r.cases = wb.cases;
  r.cells = 1;
  r.right = b;
  if (certainly_less(wb.value, M)) {
    r.ok = true;
    r.margin = M / wb.value;
    return r;
  }
  if (depth == 0) return r;
  const Interval mid = (a + b) / Interval(2);
  CellResult left = check_cell(f, chain, a, mid, depth - 1);
  if (!left.ok) return left;
  CellResult right = check_cell(f, chain, mid, b, depth - 1);
  if (!right.ok) return right;
  CellResult out = certainly_less(left.margin, right.margin) ? left : right;
  for (auto c : right.cases)
    if (std::find(out.cases.begin(), out.cases.end(), c) == out.cases.end()) out.cases.push_back(c);
  for (auto c : left.cases)
    if (std::find(out.cases.begin(), out.cases.end(), c) == out.cases.end()) out.cases.push_back(c);
  out.cells = left.cells + right.cells;
  out.right = b;
  return out;
}

}  // namespace

SweepResult sweep_q(const QuadraticField& field, const GapChain& chain, std::size_t grid_points) {
  if (grid_points < 2) throw std::invalid_argument("sweep_q: need at least two grid points");
  const Interval L0 = log(Interval(static_cast<long>(2 * field.ell + 1)));
  const Interval L1 = Interval(400) * log(Interval(10));
  const Interval ratio = L1 / L0;

  std::vector<Interval> pts;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const Interval t = Interval(static_cast<long>(i)) / Interval(static_cast<long>(grid_points - 1));
    pts.push_back(L0 * pow(ratio, t));
  }
  pts.front() = L0;
  pts.back() = L1;
  const Interval cross = chain.crossover_log_q();
  const Interval Rh = field.regulator / Interval(static_cast<long>(field.h));
  for (const Interval& extra : {cross, Rh})
    if (certainly_less(L0, extra) && certainly_less(extra, L1)) pts.push_back(extra);
  std::sort(pts.begin(), pts.end(), [](const Interval& a, const Interval& b) { return a.mid_double() < b.mid_double(); });

  SweepResult out;
  Branch below{"q^(e^2/l) <= x1^(e^2)", L0, L0, {}, {}, {}, {}, 0, true, ""};
  Branch above{"q^(e^2/l) > x1^(e^2)", cross, cross, {}, {}, {}, {}, 0, true, ""};
  bool below_used = false, above_used = false;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Interval& a = pts[i];
    const Interval& b = pts[i + 1];
    const bool is_below = b.mid_double() <= cross.mid_double() + 1e-9;
    Branch& br = is_below ? below : above;
    bool& used = is_below ? below_used : above_used;
    CellResult cr = check_cell(field, chain, a, b, 30);
    br.cells += cr.cells;
    br.log_q_hi = b;
    for (auto c : cr.cases)
      if (std::find(br.cases.begin(), br.cases.end(), c) == br.cases.end()) br.cases.push_back(c);
    if (!cr.ok) {
      br.certified = false;
      if (out.failure.empty())
        out.failure = "log q in [" + a.lo_string(8) + ", " + b.hi_string(8) + "]: bound " + cr.bound.hi_string(8) +
                      " not below M " + cr.M.lo_string(8);
      if (!used || certainly_less(br.worst_bound, cr.bound)) {
        br.worst_bound = cr.bound;
        br.M_at_worst = cr.M;
      }
      br.margin = cr.M / cr.bound;
      used = true;
      continue;
    }
    if (!used || certainly_less(cr.margin, br.margin)) {
      br.margin = cr.margin;
      br.worst_bound = cr.bound;
      br.M_at_worst = cr.M;
    }
    used = true;
  }
  std::sort(below.cases.begin(), below.cases.end());
  std::sort(above.cases.begin(), above.cases.end());
  if (below_used) out.branches.push_back(below);
  if (above_used) out.branches.push_back(above);

  // Beyond the grid: bound(t) <= bound(L1) (t/L1)^2 while M grows like exp(t e^2/l).
  const Interval k = Interval(static_cast<long>(chain.e * chain.e)) / Interval(static_cast<long>(field.ell));
  out.tail_dominance = certainly_less(Interval(2) / L1, k);
  out.certified = out.tail_dominance && out.failure.empty() && !out.branches.empty();
  for (const auto& b : out.branches) out.certified = out.certified && b.certified;
  if (!out.tail_dominance && out.failure.empty()) out.failure = "tail dominance not established";
  return out;
}

// ---------------------------------------------------------------------------
// recorded tables

const std::vector<Table1Row>& table1() {
  static const std::vector<Table1Row> rows = {
      {17, 1, "log(4+sqrt(17))", 63, 3, 9, 63, 17},
      {19, 1, "pi i", 68, 3, 9, 68, 19},
      {23, 3, "pi i", 13, 4, 14, 13, 23},
      {29, 1, "log((5+sqrt(29))/2)", 5, 5, 25, 6, 29},
      {31, 3, "pi i", 5, 6, 25, 5, 31},
      {37, 1, "log(6+sqrt(37))", 3, 6, 36, 3, 36},
      {41, 1, "log(32+5sqrt(41))", 3, 7, 49, 3, 49},
  };
  return rows;
}

std::optional<Table1Row> table1_row(unsigned long ell) {
  for (const auto& r : table1())
    if (r.ell == ell) return r;
  return std::nullopt;
}

const std::vector<Table2Row>& table2() {
  static const std::vector<Table2Row> rows = {
      {17,
       {3, 4, 7, 10, 12, 14, 15, 19, 23, 26, 32, 39, 41, 42, 44, 45, 46, 48, 58, 61},
       "103",
       "362759437743508955104646759"},
      {19,
       {3, 4, 6, 7, 13, 15, 18, 21, 26, 28, 29, 30, 33, 34, 35, 37, 38, 50, 61, 62, 63},
       "191",
       "607127818287731321660577427051"},
      {23, {2, 3, 5}, "47", "332207361361"},
      {37, {2}, "223", "616318177"},
      {41, {2}, "13367", "164511353"},
  };
  return rows;
}

std::optional<Table2Row> table2_row(unsigned long ell) {
  for (const auto& r : table2())
    if (r.ell == ell) return r;
  return std::nullopt;
}

std::vector<Discrepancy> table1_discrepancies(unsigned long ell) {
  std::vector<Discrepancy> out;
  const auto row = table1_row(ell);
  if (!row) return out;
  const unsigned long e = gap_exponent(ell);
  const std::string tag = "table1.l=" + std::to_string(ell);
  if (row->x2_exponent != e)
    out.push_back({tag + ".x2_exponent", "x2 > x1^" + std::to_string(row->x2_exponent),
                   "x2 > x1^" + std::to_string(e) + " (e = floor((l+1)/6))"});
  if (row->x3_q_num != e * e)
    out.push_back({tag + ".x3_q_exponent", "q^(" + std::to_string(row->x3_q_num) + "/" + std::to_string(ell) + ")",
                   "q^(" + std::to_string(e * e) + "/" + std::to_string(ell) + ")"});
  if (row->x3_base != row->x1_threshold || row->x3_base_exponent != e * e)
    out.push_back({tag + ".x3_fixed_term", pow_str(row->x3_base, row->x3_base_exponent),
                   pow_str(row->x1_threshold, e * e) + " (x1 threshold to the power e^2)"});
  return out;
}

OPNBound opn_bound(unsigned long beta) {
  if (beta < 1) throw std::invalid_argument("opn_bound: beta must be >= 1");
  OPNBound b;
  b.beta = beta;
  b.k_max = 2 * beta * beta + 6 * beta + 3;
  b.exponent = b.k_max + 1;
  return b;
}

// ---------------------------------------------------------------------------
// certification

namespace {

CertificateReport base_report(unsigned long ell, const QuadraticField& field, const mpz_class& x1_lower,
                              const CertifyOptions& opts) {
  CertificateReport rep;
  rep.ell = ell;
  rep.field = field;
  rep.C3 = matveev_constant(3, field.kappa);
  rep.chain = gap_chain(field, x1_lower, opts.c_kind);
  rep.chain_pi = gap_chain(field, x1_lower, LemmaFiveConstant::pi);
  if (ell == 17) rep.range_note = "abstract-range";
  return rep;
}

void apply_sweep(CertificateReport& rep, const SweepResult& s) {
  rep.branches = s.branches;
  rep.tail_dominance = s.tail_dominance;
  if (!s.certified && rep.failure.empty()) rep.failure = "large-x1 sweep: " + s.failure;
}

}  // namespace

CertificateReport certify_large(unsigned long ell, const CertifyOptions& opts) {
  if (!is_small_prime(ell)) throw NotPrime(std::to_string(ell) + " is not prime");
  if (ell < 43) throw BelowRange("certify_large needs l >= 43");
  const QuadraticField field = build_field(ell);

  mpz_class x1_lower = 2;
  std::vector<Exclusion> exclusions;
  if (ell == 43) {
    const auto cls = classify_phi_shape(ell, 2, opts.factor);
    if (cls.shape == Shape::other) {
      exclusions.push_back({2, "Phi_43(2) = 2^43-1 = " + cls.factorization.to_string() + ": " + cls.reason});
      x1_lower = 3;
    }
  }
  CertificateReport rep = base_report(ell, field, x1_lower, opts);
  rep.exclusions = exclusions;
  apply_sweep(rep, sweep_q(field, rep.chain, opts.grid_points));

  if (ell == 43) {
    const Interval l3 = log(Interval(3));
    const Interval lmin = log(Interval(static_cast<long>(2 * ell + 1)));
    const Interval q43 = Interval(43) * l3;
    const Interval q44 = Interval(44) * l3;
    const WorstBound low = theorem2_worst_bound(ell, field.h, field.regulator, field.kappa, lmin, q43);
    const Interval cap = dec("4.7e16");
    rep.paper_comparisons.push_back({"l=43: bound for q < 3^43", "m5 < 4.7e16", "m5 < " + low.value.hi_string(6),
                                     certainly_less_equal(low.value, cap)});
    const Interval M43 = rep.chain.M(lmin);
    rep.paper_comparisons.push_back({"l=43: 4.7e16 < 0.397 pi 3^49", "holds", M43.lo_string(6),
                                     certainly_less(cap, rep.chain_pi->M(lmin))});
    const WorstBound hi = theorem2_worst_bound(ell, field.h, field.regulator, field.kappa, q44, q44);
    const Interval paper = dec("2.8e13") * q44 * (log(q44) + Interval(32));
    const Interval ratio = hi.value / paper;
    const bool within = certainly_less(ratio, dec("1.02")) && certainly_less(dec("0.98039215686274509803"), ratio);
    rep.paper_comparisons.push_back({"l=43: bound at q = 3^44 vs 2.8e13 (log q)(log log q + 32), factor 1.02",
                                     paper.hi_string(6), hi.value.hi_string(6) + " (ratio " + ratio.mid_string(5) + ")",
                                     within});
    rep.paper_comparisons.push_back({"l=43: bound at q = 3^44 does not exceed 2.8e13 (log q)(log log q + 32)",
                                     paper.hi_string(6), hi.value.hi_string(6), certainly_less_equal(hi.value, paper)});
    if (!within)
      rep.discrepancies.push_back({"l=43.q>3^43.formula", "2.8e13 (log q)(log log q + 32)",
                                   "recomputed bound is " + ratio.mid_string(4) + " times the recorded formula at q = 3^44"});
  }
  rep.verdict = rep.failure.empty() ? Verdict::certified_at_most_four : Verdict::not_certified;
  return rep;
}

CertificateReport certify_small(unsigned long ell, const CertifyOptions& opts) {
  if (!is_small_prime(ell)) throw NotPrime(std::to_string(ell) + " is not prime");
  if (ell < 17) throw BelowRange("l=" + std::to_string(ell) + " is below 17");
  const auto row = table1_row(ell);
  if (!row) throw std::invalid_argument("certify_small: l must be in {17, ..., 41}");
  const QuadraticField field = build_field(ell);
  CertificateReport rep = base_report(ell, field, row->x1_threshold, opts);
  rep.table_rows_checked.push_back("table1.l=" + std::to_string(ell));

  // recorded field invariants
  rep.paper_comparisons.push_back({"table1.l=" + std::to_string(ell) + ".h", std::to_string(row->h),
                                   std::to_string(field.h), row->h == field.h});
  for (auto& d : table1_discrepancies(ell)) rep.discrepancies.push_back(d);

  // large-x1 phase
  apply_sweep(rep, sweep_q(field, rep.chain, opts.grid_points));

  // small-x1 phase
  const unsigned long T = row->x1_threshold;
  const SearchResult sr = search_solutions(ell, 2, T - 1, std::nullopt, opts.factor, opts.jobs);
  rep.search_failures = sr.failures;
  for (const auto& r : sr.rejected) rep.exclusions.push_back({r.x, r.message});
  if (!sr.failures.empty() && rep.failure.empty())
    rep.failure = "small-x1 search incomplete at x = " + sr.failures.front().x.get_str();

  const unsigned long e = rep.chain.e;
  mpz_class limit_pow;
  mpz_pow_ui(limit_pow.get_mpz_t(), opts.escalation_limit.get_mpz_t(), e);
  const Interval m5 = dec("0.397") * rep.chain.c * Interval(limit_pow);
  const Interval paper_m = dec("1.3e17");

  struct Key {
    mpz_class x, a, b;
    bool operator<(const Key& o) const { return std::tie(x, a, b) < std::tie(o.x, o.a, o.b); }
  };
  std::map<Key, EscalationResult> escalations;
  for (const auto& rec : sr.records) {
    SmallCase sc;
    sc.record = rec;
    Key key{rec.x, std::min(rec.p, rec.q), std::max(rec.p, rec.q)};
    auto it = escalations.find(key);
    if (it == escalations.end())
      it = escalations.emplace(key, escalation_check(ell, rec.x, rec.p, rec.q, opts.escalation_limit)).first;
    sc.escalation_candidates = it->second.candidates_checked;
    sc.second_solutions = it->second.second_solutions;
    sc.escalation_limit = opts.escalation_limit;
    sc.bound = theorem2_bound(field, rec.p, rec.q);
    sc.m5_lower = m5;
    sc.below_paper_m_bound = certainly_less(sc.bound.m_upper, paper_m);
    try {
      sc.ideal_equation = verify_ideal_equation(field, represent_phi(ell, rec.x), rec.p, rec.q, rec.m);
    } catch (const Error&) {
      sc.ideal_equation = false;
    }
    sc.certified = sc.second_solutions.empty() && certainly_less(sc.bound.m_upper, m5);
    if (!sc.certified && rep.failure.empty())
      rep.failure = "small-x1 case x = " + rec.x.get_str() + ", (p, q) = (" + rec.p.get_str() + ", " +
                    rec.q.get_str() + ")";
    rep.small_cases.push_back(std::move(sc));
  }
  if (e < 4)
    rep.discrepancies.push_back({"l=" + std::to_string(ell) + ".small_x1.x3",
                                 "x3 > x2^4 > 10^24", "x3 > x2^" + std::to_string(e) + " > 10^" +
                                                          std::to_string(6 * e) + " (e = " + std::to_string(e) + ")"});

  // recorded small-x1 rows
  std::vector<mpz_class> xs = sr.distinct_x();
  std::string ours_x;
  for (const auto& x : xs) ours_x += (ours_x.empty() ? "" : ",") + x.get_str();
  const auto t2 = table2_row(ell);
  if (t2) {
    rep.table_rows_checked.push_back("table2.l=" + std::to_string(ell));
    std::string paper_x;
    std::vector<mpz_class> px;
    for (auto x : t2->x1) {
      paper_x += (paper_x.empty() ? "" : ",") + std::to_string(x);
      px.emplace_back(x);
    }
    const bool x_match = px == xs;
    rep.paper_comparisons.push_back({"table2.l=" + std::to_string(ell) + ".x1", paper_x, ours_x, x_match});
    if (!x_match) {
      std::string extra, missing;
      for (const auto& x : xs)
        if (std::find(px.begin(), px.end(), x) == px.end()) extra += (extra.empty() ? "" : ",") + x.get_str();
      for (const auto& x : px)
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) missing += (missing.empty() ? "" : ",") + x.get_str();
      rep.discrepancies.push_back({"table2.l=" + std::to_string(ell) + ".x1", paper_x,
                                   ours_x + (extra.empty() ? "" : "; extra " + extra) +
                                       (missing.empty() ? "" : "; missing " + missing)});
    }
    const auto mn = sr.min_prime(), mx = sr.max_prime();
    const std::string ours_min = mn ? mn->get_str() : "-", ours_max = mx ? mx->get_str() : "-";
    rep.paper_comparisons.push_back({"table2.l=" + std::to_string(ell) + ".min_prime", t2->p_min, ours_min,
                                     ours_min == t2->p_min});
    rep.paper_comparisons.push_back({"table2.l=" + std::to_string(ell) + ".max_prime", t2->p_max, ours_max,
                                     ours_max == t2->p_max});
    if (ours_min != t2->p_min)
      rep.discrepancies.push_back({"table2.l=" + std::to_string(ell) + ".min_prime", t2->p_min, ours_min});
    if (ours_max != t2->p_max)
      rep.discrepancies.push_back({"table2.l=" + std::to_string(ell) + ".max_prime", t2->p_max, ours_max});
  } else {
    rep.paper_comparisons.push_back(
        {"table2.l=" + std::to_string(ell) + ".x1", "(no row)", ours_x.empty() ? "(none)" : ours_x, xs.empty()});
    if (!xs.empty())
      rep.discrepancies.push_back({"table2.l=" + std::to_string(ell) + ".x1", "(no row)", ours_x});
  }

  rep.verdict = rep.failure.empty() ? Verdict::certified_at_most_four : Verdict::not_certified;
  return rep;
}

CertificateReport certify(unsigned long ell, const CertifyOptions& opts) {
  if (!is_small_prime(ell)) throw NotPrime(std::to_string(ell) + " is not prime");
  if (ell < 17) throw BelowRange("l=" + std::to_string(ell) + " is below 17");
  return ell <= 41 ? certify_small(ell, opts) : certify_large(ell, opts);
}

}  // namespace cyclocert
