#include "cyclocert/quadfield.hpp"

#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/errors.hpp"
#include "cyclocert/factorint.hpp"

namespace cyclocert {

// ---------------------------------------------------------------------------
// elements

QuadElement::QuadElement(mpz_class a_, mpz_class b_, long D_) : a(std::move(a_)), b(std::move(b_)), D(D_) {
  if (mpz_odd_p(a.get_mpz_t()) != mpz_odd_p(b.get_mpz_t()))
    throw std::invalid_argument("QuadElement: a and b must have the same parity");
}

QuadElement QuadElement::integer(const mpz_class& n, long D) { return QuadElement(2 * n, 0, D); }

mpz_class QuadElement::norm() const {
  mpz_class n = a * a - D * b * b;
  mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), 4);
  return n;
}

Interval QuadElement::real_part() const {
  if (D > 0) return (Interval(a) + Interval(b) * sqrt(Interval(D))) / Interval(2);
  return Interval(a) / Interval(2);
}

Interval QuadElement::imag_part() const {
  if (D > 0) return Interval(0);
  return Interval(b) * sqrt(Interval(-D)) / Interval(2);
}

Interval QuadElement::real_value() const {
  if (D < 0) throw std::logic_error("real_value: imaginary field");
  return real_part();
}

Interval QuadElement::abs_value() const {
  if (D > 0) return abs(real_part());
  return sqrt(Interval(norm()));
}

QuadElement operator*(const QuadElement& x, const QuadElement& y) {
  if (x.D != y.D) throw std::invalid_argument("QuadElement: mismatched fields");
  mpz_class a = x.a * y.a + x.D * x.b * y.b;
  mpz_class b = x.a * y.b + x.b * y.a;
  mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), 2);
  mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), 2);
  return QuadElement(a, b, x.D);
}

QuadElement power(const QuadElement& x, unsigned long k) {
  QuadElement r = QuadElement::integer(1, x.D);
  QuadElement base = x;
  while (k) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

// ---------------------------------------------------------------------------
// units and class numbers

int kronecker(long D, long n) {
  mpz_class d = D;
  return mpz_kronecker_si(d.get_mpz_t(), n);
}

QuadElement fundamental_unit(long D) {
  if (D <= 1 || D % 4 != 1) throw std::invalid_argument("fundamental_unit: need D > 1, D = 1 mod 4");
  mpz_class Dz = D, s;
  mpz_sqrt(s.get_mpz_t(), Dz.get_mpz_t());
  if (s * s == Dz) throw std::invalid_argument("fundamental_unit: D is a square");
  mpz_class P = 1, Q = 2;
  mpz_class h1 = 1, h2 = 0, k1 = 0, k2 = 1;  // convergents h_{n-1}, h_{n-2}
  for (unsigned long i = 0;; ++i) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), mpz_class(P + s).get_mpz_t(), Q.get_mpz_t());
    mpz_class h = a * h1 + h2, k = a * k1 + k2;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    P = a * Q - P;
    Q = (Dz - P * P) / Q;
    if (Q == 2) break;
    if (i > 100000) throw ConstructionFailure("fundamental_unit: period not found");
  }
  QuadElement eps(2 * h1 - k1, k1, D);
  const mpz_class n = eps.norm();
  if (n != 1 && n != -1) throw ConstructionFailure("fundamental_unit: norm is not a unit");
  return eps;
}

namespace {

mpz_class isqrt(const mpz_class& n) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

using Form = std::array<mpz_class, 3>;

struct FormKey {
  bool operator()(const Form& x, const Form& y) const {
    return std::tie(x[0], x[1], x[2]) < std::tie(y[0], y[1], y[2]);
  }
};

// Reduced indefinite forms: 0 < b < sqrt D, sqrt D - b < 2|a| < sqrt D + b.
bool indefinite_reduced(const Form& f, const mpz_class& D) {
  const mpz_class& a = f[0];
  const mpz_class& b = f[1];
  if (b <= 0 || b * b >= D) return false;
  const mpz_class aa = 2 * abs(a);
  const mpz_class lo = aa + b;
  if (lo * lo <= D) return false;
  const mpz_class hi = aa - b;
  return hi <= 0 || hi * hi < D;
}

// 2x2 integer matrix tracking the substitution applied to a form.
struct Mat {
  mpz_class a = 1, b = 0, c = 0, d = 1;
  Mat operator*(const Mat& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

// (a,b,c) -> (c, b', c') with b' = -b (mod 2c); standard indefinite rho step.
Form rho(const Form& f, const mpz_class& D, const mpz_class& s, Mat* m) {
  const mpz_class& c = f[2];
  const mpz_class ac = abs(c);
  const mpz_class two_c = 2 * ac;
  mpz_class bp;
  if (ac > s) {
    // -|c| < b' <= |c|
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), mpz_class(-f[1] + ac).get_mpz_t(), two_c.get_mpz_t());
    bp = r - ac;
    if (bp == -ac) bp += two_c;
  } else {
    // largest b' <= s with b' = -b (mod 2|c|)
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), mpz_class(s + f[1]).get_mpz_t(), two_c.get_mpz_t());
    bp = s - r;
  }
  const mpz_class k = (bp + f[1]) / (2 * c);
  if (m) *m = *m * Mat{0, -1, 1, 0} * Mat{1, k, 0, 1};
  return {c, bp, (bp * bp - D) / (4 * c)};
}

// Definite reduction with substitution tracking: |b| <= a <= c.
Form reduce_definite(Form f, Mat* m) {
  for (;;) {
    mpz_class& a = f[0];
    mpz_class& b = f[1];
    mpz_class& c = f[2];
    // b into (-a, a]
    mpz_class two_a = 2 * a, k;
    mpz_class t = a - b;
    mpz_fdiv_q(k.get_mpz_t(), t.get_mpz_t(), two_a.get_mpz_t());
    if (k != 0) {
      c = a * k * k + b * k + c;
      b = b + 2 * a * k;
      if (m) *m = *m * Mat{1, k, 0, 1};
    }
    if (a > c) {
      std::swap(a, c);
      b = -b;
      if (m) *m = *m * Mat{0, -1, 1, 0};
      continue;
    }
    if (a == c && b < 0) {
      b = -b;
      if (m) *m = *m * Mat{0, -1, 1, 0};
    }
    return f;
  }
}

}  // namespace

unsigned long class_number_reduced_forms(long D) {
  if (D % 4 != 1 && D % 4 != -3) throw std::invalid_argument("class_number: D must be 1 mod 4");
  if (D < 0) {
    const long N = -D;
    unsigned long count = 0;
    for (long a = 1; 3 * a * a <= N; ++a) {
      for (long b = -a + 1; b <= a; ++b) {
        const long num = b * b - D;
        if (num % (4 * a)) continue;
        const long c = num / (4 * a);
        if (c < a) continue;
        if (c == a && b < 0) continue;
        ++count;
      }
    }
    return count;
  }
  const mpz_class Dz = D, s = isqrt(Dz);
  std::set<Form, FormKey> reduced;
  for (mpz_class b = 1; b <= s; b += 2) {
    const mpz_class num = (Dz - b * b) / 4;  // = -a c
    for (mpz_class a = 1; a <= num; ++a) {
      if (num % a != 0) continue;
      for (int sign : {1, -1}) {
        Form f{sign * a, b, -num / (sign * a)};
        if (indefinite_reduced(f, Dz)) reduced.insert(f);
      }
    }
  }
  unsigned long cycles = 0;
  std::set<Form, FormKey> seen;
  for (const Form& start : reduced) {
    if (seen.count(start)) continue;
    ++cycles;
    Form f = start;
    do {
      seen.insert(f);
      f = rho(f, Dz, s, nullptr);
    } while (f != start);
  }
  const QuadElement eps = fundamental_unit(D);
  return eps.norm() == -1 ? cycles : cycles / 2;
}

unsigned long class_number_analytic(long D) {
  if (D < 0) {
    const long N = -D;
    long sum = 0;
    for (long a = 1; a < N; ++a) sum += kronecker(D, a) * a;
    if (sum >= 0 || sum % N) throw ConstructionFailure("class_number_analytic: bad character sum");
    return static_cast<unsigned long>(-sum / N);
  }
  const QuadElement eps = fundamental_unit(D);
  const Interval R = log(eps.real_value());
  Interval sum(0);
  const Interval pi = Interval::pi();
  for (long a = 1; a < D; ++a) {
    const int chi = kronecker(D, a);
    if (!chi) continue;
    const Interval ang = pi * Interval(a) / Interval(D);
    const Interval term = log(sin(ang));
    sum = chi > 0 ? sum - term : sum + term;
  }
  const Interval hval = sum / Interval(2) / R;
  const double mid = hval.mid_double();
  const long n = std::lround(mid);
  const Interval gap = abs(hval - Interval(n));
  if (n < 1 || !certainly_less(gap, Interval::from_decimal("0.4")))
    throw ConstructionFailure("class_number_analytic: value not near an integer");
  return static_cast<unsigned long>(n);
}

unsigned long class_number(long D) { return D < 0 ? class_number_reduced_forms(D) : class_number_analytic(D); }

QuadraticField build_field(unsigned long ell) {
  if (!is_small_prime(ell)) throw NotPrime(std::to_string(ell) + " is not prime");
  if (ell < 5) throw BelowRange("l=" + std::to_string(ell) + " is below 5");
  QuadraticField f;
  f.ell = ell;
  f.D = field_discriminant(ell);
  f.imaginary = f.D < 0;
  f.kappa = f.imaginary ? 2 : 1;
  f.below_paper_range = ell < 17;
  f.h = class_number(f.D);
  if (f.imaginary) {
    f.regulator = Interval::pi();
  } else {
    f.unit = fundamental_unit(f.D);
    f.unit_norm = static_cast<int>(f.unit->norm().get_si());
    f.regulator = log(f.unit->real_value());
  }
  return f;
}

// ---------------------------------------------------------------------------
// prime ideals

namespace {

mpz_class sqrt_mod(const mpz_class& n, const mpz_class& p) {
  mpz_class a = n % p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1) throw NonSplitPrime("no square root modulo " + p.get_str());
  // Tonelli-Shanks
  mpz_class q = p - 1;
  unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
  q >>= s;
  mpz_class z = 2;
  while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
  mpz_class c, x, t, e;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  e = (q + 1) / 2;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
  mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    mpz_class tt = t;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    mpz_class b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b % p;
    x = x * b % p;
    c = b * b % p;
    t = t * c % p;
    m = i;
  }
  return x;
}

mpz_class inverse_mod(const mpz_class& a, const mpz_class& p) {
  mpz_class r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t())) throw std::domain_error("not invertible");
  return r;
}

mpz_class mod(const mpz_class& a, const mpz_class& p) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
  return r;
}

// Generator of the principal ideal [N, (-r + sqrt D)/2] of norm N.
QuadElement principal_generator(const mpz_class& N, const mpz_class& r, long D) {
  const mpz_class Dz = D;
  Form f{N, -r, (r * r - Dz) / (4 * N)};
  Mat m;
  if (D < 0) {
    f = reduce_definite(f, &m);
    if (f[0] != 1) throw ConstructionFailure("principal_generator: ideal class is not trivial");
  } else {
    const mpz_class s = isqrt(Dz);
    std::size_t steps = 0;
    while (!indefinite_reduced(f, Dz)) {
      f = rho(f, Dz, s, &m);
      if (++steps > 100000) throw ConstructionFailure("principal_generator: reduction did not terminate");
    }
    const Form start = f;
    while (f[0] != 1 && f[0] != -1) {
      f = rho(f, Dz, s, &m);
      if (f == start) throw ConstructionFailure("principal_generator: ideal class is not trivial");
    }
  }
  // g(x, y) = N x^2 - r x y + c y^2 is Norm(N x + y (-r + sqrt D)/2) / N.
  const mpz_class& x = m.a;
  const mpz_class& y = m.c;
  return QuadElement(2 * N * x - r * y, y, D);
}

}  // namespace

SplitValuation split_valuation(const QuadElement& x, const mpz_class& p, const mpz_class& root) {
  if (x.is_zero()) throw std::invalid_argument("split_valuation: zero element");
  mpz_class u = x.omega_u(), v = x.omega_v();
  long k = 0;
  while (mpz_divisible_p(u.get_mpz_t(), p.get_mpz_t()) && mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t())) {
    u /= p;
    v /= p;
    ++k;
  }
  const QuadElement y(2 * u + v, v, x.D);
  mpz_class n = abs(y.norm());
  const long e = static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
  if (e == 0) return {k, k};
  if (mod(u + v * root, p) == 0) return {k + e, k};
  return {k, k + e};
}

PrimeIdealData split_prime(const QuadraticField& field, const mpz_class& p) {
  if (is_probable_prime(p) == Primality::composite) throw NotPrime(p.get_str() + " is not prime");
  if (p == 2) throw NonSplitPrime("p = 2 is not supported");
  {
    mpz_class Dz = field.D;
    if (mpz_kronecker(Dz.get_mpz_t(), p.get_mpz_t()) != 1)
      throw NonSplitPrime(p.get_str() + " does not split in Q(sqrt " + std::to_string(field.D) + ")");
  }
  const long D = field.D;
  const unsigned long h = field.h;
  mpz_class ph;
  mpz_pow_ui(ph.get_mpz_t(), p.get_mpz_t(), h);

  // r^2 = D (mod 4 p^h), r odd, by Hensel lifting.
  mpz_class r = sqrt_mod(D, p);
  mpz_class pk = p;
  for (unsigned long i = 1; i < h; ++i) {
    const mpz_class next = pk * p;
    const mpz_class f = r * r - D;
    const mpz_class t = mod(-(f / pk) * inverse_mod(2 * r, p), p);
    r = mod(r + t * pk, next);
    pk = next;
  }
  if (mpz_even_p(r.get_mpz_t())) r += ph;

  QuadElement pi = principal_generator(ph, r, D);
  if (abs(pi.norm()) != ph) throw ConstructionFailure("split_prime: generator norm mismatch");

  if (D > 0) {
    const Interval target = Interval(static_cast<long>(h)) / Interval(2) * log_of(p);
    const Interval R = field.regulator;
    const double shift = ((target - log(pi.abs_value())) / R).mid_double();
    const long k = std::lround(shift);
    const QuadElement& eps = *field.unit;
    const QuadElement inv = eps.conj() * QuadElement::integer(eps.norm(), D);
    if (k != 0) pi = pi * power(k > 0 ? eps : inv, static_cast<unsigned long>(k > 0 ? k : -k));
  }
  PrimeIdealData out;
  out.p = p;
  out.h = h;
  out.D = D;
  out.pi = QuadElement(abs(pi.a), abs(pi.b), D);
  out.pi_conj = out.pi.conj();
  out.root = mod(-out.pi.omega_u() * inverse_mod(out.pi.omega_v(), p), p);
  const SplitValuation sv = split_valuation(out.pi, p, out.root);
  if (sv.at_prime != static_cast<long>(h) || sv.at_conjugate != 0)
    throw ConstructionFailure("split_prime: generator valuation mismatch");

  if (D > 0) {
    const Interval half_h = Interval(static_cast<long>(h)) / Interval(2);
    const Interval lp = log(out.pi.abs_value());
    const Interval centre = half_h * log_of(p);
    const Interval half_R = field.regulator / Interval(2);
    out.normalized = certainly_less_equal(centre - half_R, lp) && certainly_less_equal(lp, centre + half_R);
    out.arg = Interval(0);
    out.arg_within_quarter_pi = true;
  } else {
    out.arg = atan2(out.pi.imag_part(), out.pi.real_part());
    out.normalized = out.pi.a > 0;
    out.arg_within_quarter_pi = certainly_less(abs(out.arg), Interval::pi() / Interval(4));
  }
  return out;
}

// ---------------------------------------------------------------------------
// heights

namespace {

struct PlaceValuations {
  long num = 0;
  long den = 0;
};

long v_inert(const QuadElement& x, const mpz_class& r) {
  mpz_class u = x.omega_u(), v = x.omega_v();
  long k = 0;
  while (mpz_divisible_p(u.get_mpz_t(), r.get_mpz_t()) && mpz_divisible_p(v.get_mpz_t(), r.get_mpz_t())) {
    u /= r;
    v /= r;
    ++k;
  }
  return k;
}

long v_ramified(const QuadElement& x, const mpz_class& r) {
  mpz_class n = abs(x.norm());
  return static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), r.get_mpz_t()));
}

Interval finite_part(const QuadElement& num, const QuadElement& den, const FactorOptions& opts) {
  const long D = num.D;
  FactorOptions o = opts;
  o.stop_at_distinct = 0;
  std::set<mpz_class> primes;
  for (const QuadElement* z : {&num, &den}) {
    const mpz_class n = abs(z->norm());
    if (n <= 1) continue;
    auto fac = factorize(n, o);
    if (!fac.complete()) throw FactorizationBudgetExceeded(fac);
    for (const auto& [r, k] : fac.factors) primes.insert(r);
  }
  Interval total(0);
  const mpz_class Dz = D;
  for (const mpz_class& r : primes) {
    const int chi = mpz_kronecker(Dz.get_mpz_t(), r.get_mpz_t());
    const Interval lr = log_of(r);
    if (chi == 0) {
      const long d = v_ramified(den, r) - v_ramified(num, r);
      if (d > 0) total += Interval(d) * lr;
    } else if (chi == -1) {
      const long d = v_inert(den, r) - v_inert(num, r);
      if (d > 0) total += Interval(2 * d) * lr;
    } else {
      std::vector<mpz_class> roots;
      if (r == 2) {
        const mpz_class c = (Dz - 1) / 4;
        for (long t = 0; t < 2; ++t)
          if (mod(mpz_class(t * t - t) - c, r) == 0) roots.push_back(t);
      } else {
        const mpz_class s = sqrt_mod(Dz, r);
        const mpz_class inv2 = inverse_mod(2, r);
        roots = {mod((1 + s) * inv2, r), mod((1 - s) * inv2, r)};
      }
      const SplitValuation vn = split_valuation(num, r, roots[0]);
      const SplitValuation vd = split_valuation(den, r, roots[0]);
      for (long d : {vd.at_prime - vn.at_prime, vd.at_conjugate - vn.at_conjugate})
        if (d > 0) total += Interval(d) * lr;
    }
  }
  return total;
}

Interval log_plus(const Interval& t) { return max(Interval(0), log(t)); }

}  // namespace

Interval height(const QuadElement& num, const QuadElement& den, const FactorOptions& opts) {
  if (den.is_zero()) throw std::invalid_argument("height: zero denominator");
  if (num.is_zero()) return Interval(0);
  Interval arch;
  if (num.D > 0) {
    const Interval a1 = num.abs_value() / den.abs_value();
    const Interval a2 = num.conj().abs_value() / den.conj().abs_value();
    arch = log_plus(a1) + log_plus(a2);
  } else {
    arch = Interval(2) * log_plus(num.abs_value() / den.abs_value());
  }
  return (arch + finite_part(num, den, opts)) / Interval(2);
}

Interval height(const QuadElement& num, const QuadElement& den) { return height(num, den, FactorOptions{}); }

Interval abs_log(const QuadElement& num, const QuadElement& den) {
  if (num.is_zero() || den.is_zero()) throw std::invalid_argument("abs_log: zero argument");
  const Interval modulus_log = log(num.abs_value()) - log(den.abs_value());
  // alpha * Norm(den) = num * conj(den)
  const QuadElement z = num * den.conj();
  const bool den_norm_negative = den.norm() < 0;
  Interval arg;
  if (num.D > 0) {
    const Interval val = z.real_value();
    const bool negative = den_norm_negative ? val.is_positive() : !val.is_positive();
    if (val.contains_zero()) throw ConstructionFailure("abs_log: sign not resolved");
    arg = negative ? Interval::pi() : Interval(0);
  } else if (z.b == 0) {
    arg = z.a > 0 ? Interval(0) : Interval::pi();
  } else {
    arg = atan2(z.imag_part(), z.real_part());
  }
  return sqrt(modulus_log * modulus_log + arg * arg);
}

Interval a_value(const QuadElement& num, const QuadElement& den, const FactorOptions& opts) {
  return max(Interval(2) * height(num, den, opts), abs_log(num, den));
}

Interval a_value(const QuadElement& num, const QuadElement& den) { return a_value(num, den, FactorOptions{}); }

// ---------------------------------------------------------------------------
// ideal equation

IdealEquation check_ideal_equation(const QuadraticField& field, const Representation& rep,
                                   const PrimeIdealData& p, const PrimeIdealData& q, unsigned long m) {
  IdealEquation out;
  const QuadElement z(2 * rep.X, 2 * rep.Y, field.D);
  mpz_class target;
  mpz_pow_ui(target.get_mpz_t(), p.p.get_mpz_t(), m);
  target *= q.p;
  if (abs(z.norm()) != target) return out;
  const SplitValuation vp = split_valuation(z, p.p, p.root);
  const SplitValuation vq = split_valuation(z, q.p, q.root);
  // v_P(z / conj z) = v_P(z) - v_conjP(z)
  const long dp = vp.at_conjugate - vp.at_prime;
  const long dq = vq.at_conjugate - vq.at_prime;
  if ((dp == static_cast<long>(m) || dp == -static_cast<long>(m)) && (dq == 1 || dq == -1)) {
    out.holds = true;
    out.sign_p = dp > 0 ? 1 : -1;
    out.sign_q = dq > 0 ? 1 : -1;
  }
  return out;
}

bool verify_ideal_equation(const QuadraticField& field, const Representation& rep, const mpz_class& p,
                           const mpz_class& q, unsigned long m) {
  if (rep.Y == 0) throw InvalidInstance("Y = 0: the norm is a perfect square");
  if (p == q) throw InvalidInstance("p and q must be distinct");
  if (rep.D != field.D) throw InvalidInstance("representation belongs to another field");
  try {
    const PrimeIdealData P = split_prime(field, p);
    const PrimeIdealData Q = split_prime(field, q);
    return check_ideal_equation(field, rep, P, Q, m).holds;
  } catch (const NonSplitPrime& e) {
    throw InvalidInstance(e.what());
  } catch (const NotPrime& e) {
    throw InvalidInstance(e.what());
  }
}

}  // namespace cyclocert
