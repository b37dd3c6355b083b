#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace cyclocert {

// Working precision (bits) used by Interval constructors on the current thread.
long working_precision();
void set_working_precision(long bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(long bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  long saved_;
};

// Closed real interval [lo, hi] with MPFR endpoints. Every operation rounds the
// lower endpoint down and the upper endpoint up, so the exact real result of
// the corresponding operation on any points of the operands is enclosed.
class Interval {
 public:
  Interval();
  explicit Interval(long v);
  explicit Interval(const mpz_class& v);
  Interval(const mpz_class& num, const mpz_class& den);
  Interval(const Interval& o);
  Interval(Interval&& o) noexcept;
  Interval& operator=(const Interval& o);
  Interval& operator=(Interval&& o) noexcept;
  ~Interval();

  // Decimal literal such as "0.397" or "1.3e17", enclosed by outward rounding.
  static Interval from_decimal(const std::string& s);
  static Interval hull(const Interval& a, const Interval& b);
  static Interval pi();
  static Interval e();

  long precision() const { return mpfr_get_prec(lo_); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  double lo_double() const;
  double hi_double() const;
  double mid_double() const;
  // Upper endpoint in decimal scientific notation with `digits` significant digits.
  std::string hi_string(int digits = 20) const;
  std::string lo_string(int digits = 20) const;
  std::string mid_string(int digits = 40) const;
  // Width relative to magnitude; 0 for a point interval.
  double relative_width() const;

  bool contains_zero() const;
  bool is_positive() const;  // lo > 0

  Interval operator-() const;
  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }

 private:
  void init(long prec);
  mpfr_t lo_;
  mpfr_t hi_;

  friend Interval log(const Interval& x);
  friend Interval exp(const Interval& x);
  friend Interval sqrt(const Interval& x);
  friend Interval abs(const Interval& x);
  friend Interval atan2(const Interval& y, const Interval& x);
  friend Interval sin(const Interval& x);
  friend Interval pow(const Interval& x, long k);
  friend Interval pow(const Interval& x, const Interval& y);
  friend Interval max(const Interval& a, const Interval& b);
  friend Interval min(const Interval& a, const Interval& b);
  friend Interval factorial(unsigned long n);
};

Interval log(const Interval& x);  // requires x > 0
Interval exp(const Interval& x);
Interval sqrt(const Interval& x);  // requires x >= 0
Interval abs(const Interval& x);
Interval sin(const Interval& x);
// Principal argument of x + iy; requires the interval box to avoid the branch cut.
Interval atan2(const Interval& y, const Interval& x);
Interval pow(const Interval& x, long k);             // integer power, x > 0 if k < 0
Interval pow(const Interval& x, const Interval& y);  // x > 0
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);
Interval factorial(unsigned long n);

// Certified comparisons: true only when the relation holds for every pair of points.
bool certainly_less(const Interval& a, const Interval& b);
bool certainly_less_equal(const Interval& a, const Interval& b);
bool possibly_less_equal(const Interval& a, const Interval& b);

// log of a positive big integer.
Interval log_of(const mpz_class& n);

}  // namespace cyclocert
