#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "cyclocert/factorint.hpp"
#include "cyclocert/interval.hpp"
#include "cyclocert/linforms.hpp"
#include "cyclocert/quadfield.hpp"

namespace cyclocert {

// Constant in the exponent lower bound m > 0.397 c x.
enum class LemmaFiveConstant { abs_R, pi };
const char* to_string(LemmaFiveConstant c);

// x_2 > x_1^e, x_3 > max{q, x1_lower^l}^{e^2/l}, M = 0.397 c max{q^{e^2/l}, x1_lower^{e^2}}.
struct GapChain {
  unsigned long ell = 0;
  mpz_class x1_lower;
  unsigned long e = 0;
  mpz_class x2_lower;        // x1_lower^e
  mpz_class x3_lower_fixed;  // x1_lower^{e^2}
  Interval c;                // |R| or pi
  LemmaFiveConstant c_kind = LemmaFiveConstant::abs_R;
  std::optional<mpz_class> q;
  std::optional<Interval> m5_lower;  // M at q when q is given

  // e^2 / l as an exact fraction.
  unsigned long q_exponent_num() const { return e * e; }
  unsigned long q_exponent_den() const { return ell; }
  // log q at which q^{e^2/l} = x1_lower^{e^2}: l log x1_lower.
  Interval crossover_log_q() const;
  Interval M(const Interval& log_q) const;
};

GapChain gap_chain(unsigned long ell, const mpz_class& x1_lower, const Interval& c,
                   LemmaFiveConstant kind = LemmaFiveConstant::abs_R,
                   const std::optional<mpz_class>& q = std::nullopt);
GapChain gap_chain(const QuadraticField& field, const mpz_class& x1_lower,
                   LemmaFiveConstant kind = LemmaFiveConstant::abs_R,
                   const std::optional<mpz_class>& q = std::nullopt);

enum class Verdict { certified_at_most_four, not_certified };
const char* to_string(Verdict v);

// One q-regime of the comparison between the Theorem 2 bound and M.
struct Branch {
  std::string regime;
  Interval log_q_lo;
  Interval log_q_hi;  // upper end of the last checked cell
  std::vector<Theorem2Case> cases;
  Interval worst_bound;      // largest cell bound in the regime
  Interval M_at_worst;       // M at the left end of that cell
  Interval margin;           // min over cells of M(left) / bound(right)
  std::size_t cells = 0;
  bool certified = false;
  std::string note;
};

struct Discrepancy {
  std::string item;
  std::string recorded;
  std::string derived;
};

struct Exclusion {
  mpz_class x;
  std::string reason;
};

// Small-x phase: one solution candidate and its contradiction chain.
struct SmallCase {
  SolutionRecord record;
  std::uint64_t escalation_candidates = 0;
  std::vector<mpz_class> second_solutions;
  mpz_class escalation_limit;
  BoundReport bound;
  Interval m5_lower;  // 0.397 c limit^{e^2}
  bool ideal_equation = false;
  bool below_paper_m_bound = false;  // m_upper < 1.3e17
  bool certified = false;
};

struct PaperComparison {
  std::string item;
  std::string paper;
  std::string ours;
  bool matches = false;
};

struct CertificateReport {
  unsigned long ell = 0;
  Verdict verdict = Verdict::not_certified;
  std::string range_note;  // "abstract-range" for l = 17
  QuadraticField field;
  Interval C3;
  GapChain chain;
  std::optional<GapChain> chain_pi;  // paper's variant with c = pi
  std::vector<Branch> branches;
  bool tail_dominance = false;
  std::vector<Exclusion> exclusions;
  std::vector<SmallCase> small_cases;
  std::vector<SearchFailure> search_failures;
  std::vector<Discrepancy> discrepancies;
  std::vector<PaperComparison> paper_comparisons;
  std::vector<std::string> table_rows_checked;
  std::string failure;  // first failing branch, if any
};

struct CertifyOptions {
  FactorOptions factor;
  unsigned jobs = 1;
  std::size_t grid_points = 512;
  LemmaFiveConstant c_kind = LemmaFiveConstant::abs_R;
  mpz_class escalation_limit = 1'000'000;
};

// l >= 43. For l = 43 the smallest admissible x1 is derived from the shape of Phi_43(2).
CertificateReport certify_large(unsigned long ell, const CertifyOptions& opts = {});
// 17 <= l <= 41: large-x1 phase from the recorded x1 thresholds, small-x1 phase by search.
CertificateReport certify_small(unsigned long ell, const CertifyOptions& opts = {});
// Dispatch; throws NotPrime or BelowRange.
CertificateReport certify(unsigned long ell, const CertifyOptions& opts = {});

// Large-x1 q-sweep for a given chain, shared by both phases.
struct SweepResult {
  std::vector<Branch> branches;
  bool tail_dominance = false;
  bool certified = false;
  std::string failure;
};
SweepResult sweep_q(const QuadraticField& field, const GapChain& chain, std::size_t grid_points);

struct OPNBound {
  unsigned long beta = 0;
  unsigned long k_max = 0;
  unsigned long exponent = 0;  // N < 2^{4^exponent}
};
OPNBound opn_bound(unsigned long beta);

// Recorded large-x1 table: (l, h, R label, x1 >=, x2 exponent, x3 q-exponent num,
// x3 base, x3 base exponent).
struct Table1Row {
  unsigned long ell;
  unsigned long h;
  const char* R;
  unsigned long x1_threshold;
  unsigned long x2_exponent;
  unsigned long x3_q_num;
  unsigned long x3_base;
  unsigned long x3_base_exponent;
};
const std::vector<Table1Row>& table1();
std::optional<Table1Row> table1_row(unsigned long ell);

struct Table2Row {
  unsigned long ell;
  std::vector<unsigned long> x1;
  const char* p_min;
  const char* p_max;
};
const std::vector<Table2Row>& table2();
std::optional<Table2Row> table2_row(unsigned long ell);

// Differences between the recorded large-x1 table and the derived gap chain.
std::vector<Discrepancy> table1_discrepancies(unsigned long ell);

}  // namespace cyclocert
