#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/interval.hpp"
#include "cyclocert/quadfield.hpp"

namespace cyclocert {

// Matveev's C(n) for kappa in {1, 2}.
Interval matveev_constant(unsigned n, int kappa);

struct LinearFormInstance {
  unsigned n = 3;
  int kappa = 1;
  std::vector<Interval> A;   // A_1 .. A_n
  std::vector<mpz_class> b;  // b_1 .. b_n

  Interval B() const;      // max{1, |b_1| A_1/A_n, ..., |b_n|}
  Interval Omega() const;  // A_1 ... A_n
};

// Lower bound for log|Lambda| when Lambda != 0.
Interval matveev_lower_bound(const LinearFormInstance& inst);

// 0.569 U log U, an upper bound for t/2 whenever t < U log t. Throws
// DomainTooSmall below U = 3.6e10.
Interval resolve_superlog(const Interval& U);
// Largest root of t = U log t (bisection), enclosed.
Interval superlog_fixed_point(const Interval& U);

enum class Theorem2Case { I, II, III, IV, V };
const char* to_string(Theorem2Case c);

struct BoundReport {
  Theorem2Case kase = Theorem2Case::I;
  unsigned long ell = 0;
  unsigned long h = 0;
  int kappa = 1;
  Interval R;  // |R|
  Interval log_p;
  Interval log_q;
  Interval C3;
  std::optional<Interval> U;  // case I only: 4(2C(3)+1) l h^2 R log p
  Interval m_upper;
  // Cases whose hypotheses could not be separated numerically; the minimum
  // bound among them is reported.
  std::vector<Theorem2Case> tied;
};

// The displayed bound of one case, R read as |R|.
Interval theorem2_case_bound(Theorem2Case c, unsigned long ell, unsigned long h, const Interval& R,
                             const Interval& log_p, const Interval& log_q, const Interval& C3);

// true unless the hypothesis of the case is certainly violated.
bool theorem2_case_possible(Theorem2Case c, unsigned long h, const Interval& R, const Interval& log_p,
                            const Interval& log_q);

BoundReport theorem2_bound(unsigned long ell, unsigned long h, const Interval& R, int kappa, const Interval& log_p,
                           const Interval& log_q);
BoundReport theorem2_bound(const QuadraticField& field, const mpz_class& p, const mpz_class& q);

// Upper bound on m valid for every prime p >= 2l+1, p != q, and every q with
// log q in [lq_lo, lq_hi]: the maximum over the cases that can occur there of
// each case bound at the right endpoint.
struct WorstBound {
  Interval value;
  std::vector<Theorem2Case> cases;
};
WorstBound theorem2_worst_bound(unsigned long ell, unsigned long h, const Interval& R, int kappa,
                                const Interval& lq_lo, const Interval& lq_hi);

// Lambda = h Log((X + Y sqrt D)/(X - Y sqrt D)) for a representation, and the
// magnitude chain checks.
struct LambdaChain {
  Interval lambda_abs;
  Interval literal_bound;    // 1.2588 h / x
  Interval middle_bound;     // 2 h Y sqrt|D| / |X - Y sqrt D|
  Interval scaled_bound;     // 1.2588 h sqrt|D| / x
  bool nonzero = false;
  bool literal_holds = false;
  bool middle_holds = false;
  bool scaled_holds = false;
};
LambdaChain lambda_chain(const QuadraticField& field, const Representation& rep);

}  // namespace cyclocert
