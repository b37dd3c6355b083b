#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace cyclocert {

struct FactorOptions;

// D = (-1)^((l-1)/2) * l for an odd prime l.
long field_discriminant(unsigned long ell);

// floor((l+1)/6), the exponent in the gap x_{i+1} > x_i^e between independent solutions.
unsigned long gap_exponent(unsigned long ell);

// Phi_n(x). Exact; Phi_n(1) is p for n = p^k and 1 otherwise (0 for n = 1).
mpz_class eval_phi(unsigned long n, const mpz_class& x);

// Integer polynomials with 4*Phi_l(t) = A(t)^2 - D*B(t)^2.
struct GaussPair {
  unsigned long ell = 0;
  long D = 0;
  std::vector<mpz_class> A;  // ascending coefficients, deg (l-1)/2, leading coefficient 2
  std::vector<mpz_class> B;  // ascending coefficients, deg (l-3)/2

  mpz_class eval_A(const mpz_class& t) const;
  mpz_class eval_B(const mpz_class& t) const;
};

// Builds the pair from the quadratic-residue half of the roots of Phi_l via
// Newton's identities over Q(sqrt D). Throws ConstructionFailure if the
// resulting coefficients are not integral or fail the expansion check.
GaussPair gauss_pair(unsigned long ell);

// Phi_l(x) = X^2 - D*Y^2 with gcd(X, Y) = 1 and Y > 0.
struct Representation {
  unsigned long ell = 0;
  mpz_class x;
  long D = 0;
  mpz_class X;
  mpz_class Y;
  // Exponent k of the fundamental unit applied to the Gauss seed (0 if none).
  long unit_power = 0;
  // x > 3^floor((l+1)/6): the ratio bound is then required, not just checked.
  bool in_lemma_range = false;
  // 0.3791/x < |Y/(X - Y sqrt D)| < 0.6296/x certified by interval arithmetic.
  bool ratio_bound_holds = false;
};

// Scans unit multiples |k| <= 64 of the seed (A(x) + B(x) sqrt D)/2. Throws
// NoIntegerRepresentation when no integral associate exists, or when x is in
// the lemma range and no integral associate satisfies the ratio bound.
Representation represent_phi(unsigned long ell, const mpz_class& x);

// Certified check of the ratio bound for an arbitrary (X, Y, D, x).
bool ratio_bound_holds(const mpz_class& X, const mpz_class& Y, long D, const mpz_class& x);

struct PrimitiveDivisor {
  bool exists = false;
  std::optional<mpz_class> witness;  // smallest primitive prime factor
};

// Zsigmondy test for a^n - 1. The witness needs a factorization of Phi_n(a) and
// may raise FactorizationBudgetExceeded.
PrimitiveDivisor has_primitive_prime_factor(const mpz_class& a, unsigned long n,
                                            const FactorOptions& opts);
PrimitiveDivisor has_primitive_prime_factor(const mpz_class& a, unsigned long n);

}  // namespace cyclocert
