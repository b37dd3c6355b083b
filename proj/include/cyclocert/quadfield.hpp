#pragma once

#include <gmpxx.h>

#include <optional>

#include "cyclocert/interval.hpp"

namespace cyclocert {

struct FactorOptions;
struct Representation;

// (a + b*sqrt(D))/2 in the maximal order Z[(1+sqrt D)/2], D = 1 (mod 4).
struct QuadElement {
  mpz_class a;
  mpz_class b;
  long D = 0;

  QuadElement() = default;
  QuadElement(mpz_class a_, mpz_class b_, long D_);
  // Rational integer n, i.e. (2n + 0*sqrt D)/2.
  static QuadElement integer(const mpz_class& n, long D);

  bool is_zero() const { return a == 0 && b == 0; }
  QuadElement conj() const { return {a, -b, D}; }
  mpz_class norm() const;  // (a^2 - D b^2)/4, exact
  // Coordinates in the basis {1, w}, w = (1 + sqrt D)/2.
  mpz_class omega_u() const { return (a - b) / 2; }
  const mpz_class& omega_v() const { return b; }
  // Real embedding (D > 0) or real/imaginary parts (D < 0).
  Interval real_part() const;
  Interval imag_part() const;  // 0 for D > 0
  Interval real_value() const;  // D > 0 only
  Interval abs_value() const;

  friend QuadElement operator*(const QuadElement& x, const QuadElement& y);
  friend QuadElement operator-(const QuadElement& x) { return {-x.a, -x.b, x.D}; }
  friend bool operator==(const QuadElement& x, const QuadElement& y) {
    return x.a == y.a && x.b == y.b && x.D == y.D;
  }
};

QuadElement power(const QuadElement& x, unsigned long k);

struct QuadraticField {
  unsigned long ell = 0;
  long D = 0;
  unsigned long h = 0;                // class number
  std::optional<QuadElement> unit;    // fundamental unit > 1, absent when D < 0
  int unit_norm = 0;                  // +1 or -1 (D > 0)
  Interval regulator;                 // log(eps) for D > 0, pi for D < 0
  bool imaginary = false;
  int kappa = 1;
  bool below_paper_range = false;     // l < 17
};

QuadraticField build_field(unsigned long ell);

// Smallest unit > 1 of Z[(1+sqrt D)/2] by the continued fraction of (1 + sqrt D)/2.
QuadElement fundamental_unit(long D);

// Class number: reduced definite forms (D < 0) or the Dirichlet formula with the
// continued-fraction regulator (D > 0).
unsigned long class_number(long D);
// Independent routes used for cross-validation.
unsigned long class_number_reduced_forms(long D);  // D < 0: reduced forms; D > 0: cycles of reduced forms
unsigned long class_number_analytic(long D);       // D < 0: -(1/|D|) sum chi(a) a; D > 0: Dirichlet

int kronecker(long D, long n);

// Prime p splitting as p = P * conj(P); pi generates P^h.
struct PrimeIdealData {
  mpz_class p;
  unsigned long h = 0;
  long D = 0;
  QuadElement pi;
  QuadElement pi_conj;
  // P = (p, w - root): the residue of w modulo P.
  mpz_class root;
  // D > 0: p^{h/2} eps^{-1/2} <= |pi| <= p^{h/2} eps^{1/2}. D < 0: |arg pi| <= pi/2.
  bool normalized = false;
  // D < 0 only: |arg pi| < pi/4, which the unit group {+1, -1} cannot always reach.
  bool arg_within_quarter_pi = false;
  Interval arg;  // principal argument of pi (0 for D > 0 and pi > 0)
};

PrimeIdealData split_prime(const QuadraticField& field, const mpz_class& p);

// Valuations of a nonzero element at the two primes above a split p, where the
// first prime is the one whose residue map sends w to `root`.
struct SplitValuation {
  long at_prime = 0;
  long at_conjugate = 0;
};
SplitValuation split_valuation(const QuadElement& x, const mpz_class& p, const mpz_class& root);

// Absolute logarithmic height of num/den.
Interval height(const QuadElement& num, const QuadElement& den, const FactorOptions& opts);
Interval height(const QuadElement& num, const QuadElement& den);

// |Log(num/den)| on the principal branch.
Interval abs_log(const QuadElement& num, const QuadElement& den);

// max{2 h(alpha), |log alpha|}.
Interval a_value(const QuadElement& num, const QuadElement& den, const FactorOptions& opts);
Interval a_value(const QuadElement& num, const QuadElement& den);

struct IdealEquation {
  bool holds = false;
  // [ (X+Y sqrt D)/(X-Y sqrt D) ] = (conj P / P)^{sign_p m} (conj Q / Q)^{sign_q}
  int sign_p = 0;
  int sign_q = 0;
};

IdealEquation check_ideal_equation(const QuadraticField& field, const Representation& rep,
                                   const PrimeIdealData& p, const PrimeIdealData& q, unsigned long m);
bool verify_ideal_equation(const QuadraticField& field, const Representation& rep,
                           const mpz_class& p, const mpz_class& q, unsigned long m);

}  // namespace cyclocert
