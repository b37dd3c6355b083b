#include "doctest.h"

#include <algorithm>

#include "cyclocert/certifier.hpp"
#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/errors.hpp"

using namespace cyclocert;

namespace {

Interval dec(const char* s) { return Interval::from_decimal(s); }

bool has_item(const std::vector<Discrepancy>& ds, const std::string& item) {
  return std::any_of(ds.begin(), ds.end(), [&](const Discrepancy& d) { return d.item == item; });
}

const PaperComparison* find_cmp(const CertificateReport& r, const std::string& prefix) {
  for (const auto& c : r.paper_comparisons)
    if (c.item.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("gap chain") {
  const GapChain g43 = gap_chain(43, 3, Interval::pi(), LemmaFiveConstant::pi);
  CHECK(g43.e == 7);
  CHECK(g43.q_exponent_num() == 49);
  CHECK(g43.q_exponent_den() == 43);
  mpz_class t;
  mpz_ui_pow_ui(t.get_mpz_t(), 3, 49);
  CHECK(g43.x3_lower_fixed == t);
  CHECK(g43.x2_lower == 2187);
  // below the crossover M is 0.397 pi 3^49
  const Interval M0 = g43.M(log(Interval(87)));
  CHECK(certainly_less(abs(M0 / (dec("0.397") * Interval::pi() * Interval(t)) - Interval(1)), dec("1e-40")));
  const Interval lq = Interval(100) * log(Interval(3));
  const Interval M1 = g43.M(lq);
  CHECK(certainly_less(abs(log(M1) - log(dec("0.397") * Interval::pi()) - Interval(49) * lq / Interval(43)),
                       dec("1e-30")));
  CHECK(certainly_less(abs(g43.crossover_log_q() - Interval(43) * log(Interval(3))), dec("1e-40")));

  const GapChain g17 = gap_chain(17, 2, Interval::pi());
  CHECK(g17.e == 3);
  CHECK(g17.x2_lower == 8);
  CHECK(g17.x3_lower_fixed == 512);

  const GapChain g47 = gap_chain(build_field(47), 2, LemmaFiveConstant::pi, mpz_class(97));
  CHECK(g47.e == 8);
  mpz_ui_pow_ui(t.get_mpz_t(), 2, 64);
  CHECK(g47.x3_lower_fixed == t);
  REQUIRE(g47.m5_lower);
  CHECK(certainly_less(abs(*g47.m5_lower / (dec("0.397") * Interval::pi() * Interval(t)) - Interval(1)), dec("1e-40")));

  CHECK_THROWS_AS(gap_chain(13, 2, Interval::pi()), BelowRange);
}

TEST_CASE("default constant is |R|") {
  const QuadraticField f = build_field(29);
  const GapChain g = gap_chain(f, 5);
  CHECK(g.c_kind == LemmaFiveConstant::abs_R);
  CHECK(certainly_less(abs(g.c - f.regulator), dec("1e-40")));
}

TEST_CASE("l = 43") {
  const CertificateReport r = certify(43);
  CHECK(r.verdict == Verdict::certified_at_most_four);
  REQUIRE(r.exclusions.size() == 1);
  CHECK(r.exclusions[0].x == 2);
  CHECK(r.exclusions[0].reason.find("431 * 9719 * 2099863") != std::string::npos);
  CHECK(r.exclusions[0].reason.find("3 distinct prime factors") != std::string::npos);
  CHECK(r.chain.x1_lower == 3);
  CHECK(r.field.h == 1);
  CHECK(r.branches.size() == 2);
  for (const auto& b : r.branches) CHECK(b.certified);
  CHECK(r.tail_dominance);
  const auto* low = find_cmp(r, "l=43: bound for q < 3^43");
  REQUIRE(low);
  CHECK(low->matches);
  const auto* le = find_cmp(r, "l=43: bound at q = 3^44 does not exceed");
  REQUIRE(le);
  CHECK(le->matches);
}

TEST_CASE("certify_large on l >= 47") {
  for (unsigned long l : {47UL, 53UL, 59UL, 97UL, 199UL}) {
    CAPTURE(l);
    const CertificateReport r = certify_large(l);
    CHECK(r.verdict == Verdict::certified_at_most_four);
    CHECK(r.chain.x1_lower == 2);
    CHECK(r.failure.empty());
    std::size_t cells = 0;
    for (const auto& b : r.branches) {
      CHECK(b.certified);
      CHECK(certainly_less(b.worst_bound, b.M_at_worst));
      CHECK(certainly_less(Interval(1), b.margin));
      cells += b.cells;
    }
    CHECK(cells >= 512);
    CHECK(r.discrepancies.empty());
  }
  CHECK_THROWS_AS(certify_large(41), BelowRange);
  CHECK_THROWS_AS(certify(13), BelowRange);
  CHECK_THROWS_AS(certify(49), NotPrime);
}

TEST_CASE("a failing chain is not certified") {
  // with x1 >= 2 instead of 3, the l = 43 chain is far too weak
  const QuadraticField f = build_field(43);
  const GapChain weak = gap_chain(f, 2);
  const SweepResult s = sweep_q(f, weak, 64);
  CHECK_FALSE(s.certified);
  CHECK_FALSE(s.failure.empty());
}

TEST_CASE("l = 23 small phase") {
  const CertificateReport r = certify(23);
  CHECK(r.verdict == Verdict::certified_at_most_four);
  std::vector<mpz_class> xs;
  for (const auto& s : r.small_cases) {
    if (std::find(xs.begin(), xs.end(), s.record.x) == xs.end()) xs.push_back(s.record.x);
    CHECK(s.second_solutions.empty());
    CHECK(s.ideal_equation);
    CHECK(s.below_paper_m_bound);
    CHECK(certainly_less(s.bound.m_upper, dec("1.3e17")));
    CHECK(certainly_less(dec("1e24"), s.m5_lower));
    CHECK(s.certified);
    const mpz_class pmin = std::min(s.record.p, s.record.q);
    CHECK(pmin >= 47);
  }
  CHECK(xs == std::vector<mpz_class>{2, 3, 5});
  CHECK(std::find(r.table_rows_checked.begin(), r.table_rows_checked.end(), "table2.l=23") !=
        r.table_rows_checked.end());
  CHECK(has_item(r.discrepancies, "table1.l=23.x3_q_exponent"));
}

TEST_CASE("l = 37 and 41 small phase") {
  for (unsigned long l : {37UL, 41UL}) {
    const CertificateReport r = certify(l);
    CHECK(r.verdict == Verdict::certified_at_most_four);
    REQUIRE(r.small_cases.size() == 2);
    CHECK(r.small_cases[0].record.x == 2);
    for (const char* k : {".x1", ".min_prime", ".max_prime"}) {
      const auto* c = find_cmp(r, "table2.l=" + std::to_string(l) + k);
      REQUIRE(c);
      CHECK(c->matches);
    }
  }
}

TEST_CASE("recorded table anomalies are flagged") {
  CHECK(has_item(table1_discrepancies(31), "table1.l=31.x2_exponent"));
  for (unsigned long l : {17UL, 19UL, 23UL, 29UL, 31UL}) CHECK(has_item(table1_discrepancies(l), "table1.l=" + std::to_string(l) + ".x3_fixed_term"));
  CHECK(table1_discrepancies(37).empty());
  CHECK(table1_discrepancies(41).empty());
  for (const auto& row : table1()) {
    if (row.ell == 31) continue;
    CHECK(row.x2_exponent == gap_exponent(row.ell));
  }
}

TEST_CASE("Table 2 rows") {
  REQUIRE(table2_row(17));
  CHECK(table2_row(17)->x1.size() == 20);
  CHECK(table2_row(19)->x1.size() == 21);
  CHECK_FALSE(table2_row(29));
  CHECK_FALSE(table2_row(31));
}

TEST_CASE("odd perfect number bound") {
  CHECK(opn_bound(9).k_max == 219);
  CHECK(opn_bound(9).exponent == 220);
  CHECK(opn_bound(1).k_max == 11);
  CHECK(opn_bound(1).exponent == 12);
  for (unsigned long b = 1; b < 50; ++b) {
    CHECK(opn_bound(b).exponent == opn_bound(b).k_max + 1);
    CHECK(opn_bound(b).k_max == 2 * b * b + 6 * b + 3);
  }
  CHECK_THROWS_AS(opn_bound(0), std::invalid_argument);
}
