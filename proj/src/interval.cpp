#include "cyclocert/interval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cyclocert {

namespace {

thread_local long g_precision = 192;

void raise_precision(mpfr_t lo, mpfr_t hi, long prec) {
  if (mpfr_get_prec(lo) < prec) mpfr_prec_round(lo, prec, MPFR_RNDD);
  if (mpfr_get_prec(hi) < prec) mpfr_prec_round(hi, prec, MPFR_RNDU);
}

std::string format(mpfr_srcptr v, int digits, char rnd) {
  char* buf = nullptr;
  std::string spec = std::string("%.*R") + rnd + "e";
  mpfr_asprintf(&buf, spec.c_str(), digits - 1, v);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

}  // namespace

long working_precision() { return g_precision; }

void set_working_precision(long bits) {
  if (bits < MPFR_PREC_MIN || bits > 1 << 20) throw std::invalid_argument("precision out of range");
  g_precision = bits;
}

PrecisionScope::PrecisionScope(long bits) : saved_(g_precision) { set_working_precision(bits); }
PrecisionScope::~PrecisionScope() { g_precision = saved_; }

void Interval::init(long prec) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
}

Interval::Interval() {
  init(g_precision);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(long v) {
  init(g_precision);
  mpfr_set_si(lo_, v, MPFR_RNDD);
  mpfr_set_si(hi_, v, MPFR_RNDU);
}

Interval::Interval(const mpz_class& v) {
  init(g_precision);
  mpfr_set_z(lo_, v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(hi_, v.get_mpz_t(), MPFR_RNDU);
}

Interval::Interval(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("Interval: zero denominator");
  init(g_precision);
  mpq_class q(num, den);
  q.canonicalize();
  mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Interval& o) {
  init(o.precision());
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept {
  init(o.precision());
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    mpfr_set_prec(lo_, o.precision());
    mpfr_set_prec(hi_, o.precision());
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_decimal(const std::string& s) {
  Interval r;
  if (mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD) != 0 ||
      mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU) != 0) {
    throw std::invalid_argument("Interval::from_decimal: bad literal '" + s + "'");
  }
  return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
  Interval r(a);
  raise_precision(r.lo_, r.hi_, b.precision());
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::pi() {
  Interval r;
  mpfr_const_pi(r.lo_, MPFR_RNDD);
  mpfr_const_pi(r.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::e() { return exp(Interval(1)); }

double Interval::lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Interval::hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double Interval::mid_double() const { return 0.5 * (lo_double() + hi_double()); }

std::string Interval::hi_string(int digits) const { return format(hi_, digits, 'U'); }
std::string Interval::lo_string(int digits) const { return format(lo_, digits, 'D'); }

std::string Interval::mid_string(int digits) const {
  mpfr_t m;
  mpfr_init2(m, precision() + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  std::string out = format(m, digits, 'N');
  mpfr_clear(m);
  return out;
}

double Interval::relative_width() const {
  mpfr_t w;
  mpfr_init2(w, precision());
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double width = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  double mag = std::max(std::fabs(lo_double()), std::fabs(hi_double()));
  return mag == 0.0 ? width : width / mag;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Interval::is_positive() const { return mpfr_sgn(lo_) > 0; }

Interval Interval::operator-() const {
  Interval r(*this);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval& Interval::operator+=(const Interval& o) {
  raise_precision(lo_, hi_, o.precision());
  mpfr_add(lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(hi_, hi_, o.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  raise_precision(lo_, hi_, o.precision());
  mpfr_t t;
  mpfr_init2(t, precision());
  mpfr_sub(t, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(hi_, hi_, o.lo_, MPFR_RNDU);
  mpfr_swap(lo_, t);
  mpfr_clear(t);
  return *this;
}

Interval& Interval::operator*=(const Interval& o) {
  raise_precision(lo_, hi_, o.precision());
  const long prec = precision();
  mpfr_t cand[4];
  mpfr_srcptr xs[2] = {lo_, hi_};
  mpfr_srcptr ys[2] = {o.lo_, o.hi_};
  mpfr_t lo, hi;
  mpfr_init2(lo, prec);
  mpfr_init2(hi, prec);
  for (int i = 0; i < 4; ++i) mpfr_init2(cand[i], prec);
  for (int i = 0; i < 4; ++i) mpfr_mul(cand[i], xs[i / 2], ys[i % 2], MPFR_RNDD);
  mpfr_set(lo, cand[0], MPFR_RNDD);
  for (int i = 1; i < 4; ++i) mpfr_min(lo, lo, cand[i], MPFR_RNDD);
  for (int i = 0; i < 4; ++i) mpfr_mul(cand[i], xs[i / 2], ys[i % 2], MPFR_RNDU);
  mpfr_set(hi, cand[0], MPFR_RNDU);
  for (int i = 1; i < 4; ++i) mpfr_max(hi, hi, cand[i], MPFR_RNDU);
  mpfr_swap(lo_, lo);
  mpfr_swap(hi_, hi);
  for (int i = 0; i < 4; ++i) mpfr_clear(cand[i]);
  mpfr_clear(lo);
  mpfr_clear(hi);
  return *this;
}

Interval& Interval::operator/=(const Interval& o) {
  if (o.contains_zero()) throw std::domain_error("Interval: division by an interval containing zero");
  Interval inv(o);
  mpfr_ui_div(inv.lo_, 1, o.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, o.lo_, MPFR_RNDU);
  return *this *= inv;
}

Interval log(const Interval& x) {
  if (!x.is_positive()) throw std::domain_error("log: argument not positive");
  Interval r(x);
  mpfr_log(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_log(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval exp(const Interval& x) {
  Interval r(x);
  mpfr_exp(r.lo_, x.lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval sqrt(const Interval& x) {
  if (mpfr_sgn(x.hi_) < 0) throw std::domain_error("sqrt: negative argument");
  Interval r(x);
  if (mpfr_sgn(x.lo_) <= 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_sqrt(r.lo_, x.lo_, MPFR_RNDD);
  }
  mpfr_sqrt(r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval abs(const Interval& x) {
  if (mpfr_sgn(x.lo_) >= 0) return x;
  if (mpfr_sgn(x.hi_) <= 0) return -x;
  Interval r(x);
  mpfr_set_zero(r.lo_, 1);
  mpfr_neg(r.hi_, x.lo_, MPFR_RNDU);
  mpfr_max(r.hi_, r.hi_, x.hi_, MPFR_RNDU);
  return r;
}

Interval atan2(const Interval& y, const Interval& x) {
  if (y.contains_zero() && x.contains_zero()) throw std::domain_error("atan2: box contains the origin");
  if (y.contains_zero() && mpfr_sgn(x.lo_) < 0) throw std::domain_error("atan2: box crosses the branch cut");
  const long prec = std::max(x.precision(), y.precision());
  Interval r;
  raise_precision(r.lo_, r.hi_, prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  mpfr_srcptr xs[2] = {x.lo_, x.hi_};
  mpfr_srcptr ys[2] = {y.lo_, y.hi_};
  for (int i = 0; i < 4; ++i) {
    mpfr_atan2(t, ys[i / 2], xs[i % 2], MPFR_RNDD);
    if (i == 0 || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
    mpfr_atan2(t, ys[i / 2], xs[i % 2], MPFR_RNDU);
    if (i == 0 || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
  }
  mpfr_clear(t);
  return r;
}

Interval sin(const Interval& x) {
  // sin is 1-Lipschitz: enclose by the midpoint value widened by the radius.
  const long prec = x.precision();
  Interval r(x);
  mpfr_t mid, rad, t;
  mpfr_inits2(prec + 8, mid, rad, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_add(mid, x.lo_, x.hi_, MPFR_RNDN);
  mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
  mpfr_sub(rad, x.hi_, mid, MPFR_RNDU);
  mpfr_sub(t, mid, x.lo_, MPFR_RNDU);
  mpfr_max(rad, rad, t, MPFR_RNDU);
  mpfr_sin(t, mid, MPFR_RNDD);
  mpfr_sub(r.lo_, t, rad, MPFR_RNDD);
  mpfr_sin(t, mid, MPFR_RNDU);
  mpfr_add(r.hi_, t, rad, MPFR_RNDU);
  if (mpfr_cmp_si(r.lo_, -1) < 0) mpfr_set_si(r.lo_, -1, MPFR_RNDD);
  if (mpfr_cmp_si(r.hi_, 1) > 0) mpfr_set_si(r.hi_, 1, MPFR_RNDU);
  mpfr_clears(mid, rad, t, static_cast<mpfr_ptr>(nullptr));
  return r;
}

Interval pow(const Interval& x, long k) {
  if (k == 0) return Interval(1);
  if (k < 0) {
    if (!x.is_positive()) throw std::domain_error("pow: negative exponent of non-positive base");
    Interval r(x);
    mpfr_pow_si(r.lo_, x.hi_, k, MPFR_RNDD);
    mpfr_pow_si(r.hi_, x.lo_, k, MPFR_RNDU);
    return r;
  }
  if (mpfr_sgn(x.lo_) < 0 && k % 2 == 0) return pow(abs(x), k);
  Interval r(x);
  mpfr_pow_si(r.lo_, x.lo_, k, MPFR_RNDD);
  mpfr_pow_si(r.hi_, x.hi_, k, MPFR_RNDU);
  return r;
}

Interval pow(const Interval& x, const Interval& y) { return exp(y * log(x)); }

Interval max(const Interval& a, const Interval& b) {
  Interval r(a);
  raise_precision(r.lo_, r.hi_, b.precision());
  mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval min(const Interval& a, const Interval& b) {
  Interval r(a);
  raise_precision(r.lo_, r.hi_, b.precision());
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval factorial(unsigned long n) {
  Interval r;
  mpfr_fac_ui(r.lo_, n, MPFR_RNDD);
  mpfr_fac_ui(r.hi_, n, MPFR_RNDU);
  return r;
}

bool certainly_less(const Interval& a, const Interval& b) { return mpfr_less_p(a.hi(), b.lo()); }
bool certainly_less_equal(const Interval& a, const Interval& b) { return mpfr_lessequal_p(a.hi(), b.lo()); }
bool possibly_less_equal(const Interval& a, const Interval& b) { return mpfr_lessequal_p(a.lo(), b.hi()); }

Interval log_of(const mpz_class& n) {
  if (n <= 0) throw std::domain_error("log_of: non-positive integer");
  return log(Interval(n));
}

}  // namespace cyclocert
