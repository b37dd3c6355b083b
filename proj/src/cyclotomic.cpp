#include "cyclocert/cyclotomic.hpp"

#include <stdexcept>

#include "cyclocert/errors.hpp"
#include "cyclocert/factorint.hpp"
#include "cyclocert/interval.hpp"
#include "cyclocert/quadfield.hpp"

namespace cyclocert {

namespace {

std::vector<std::pair<unsigned long, unsigned>> small_factor(unsigned long n) {
  std::vector<std::pair<unsigned long, unsigned>> out;
  for (unsigned long d = 2; d * d <= n; ++d) {
    unsigned k = 0;
    while (n % d == 0) {
      n /= d;
      ++k;
    }
    if (k) out.emplace_back(d, k);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

int moebius(unsigned long n) {
  int mu = 1;
  for (auto [p, k] : small_factor(n)) {
    if (k > 1) return 0;
    mu = -mu;
  }
  return mu;
}

mpz_class horner(const std::vector<mpz_class>& c, const mpz_class& t) {
  mpz_class v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

bool is_qr(unsigned long k, unsigned long ell) {
  k %= ell;
  for (unsigned long j = 1; j < ell; ++j)
    if ((j * j) % ell == k) return true;
  return false;
}

// r + s*sqrt(D) with rational r, s.
struct QElt {
  mpq_class r, s;
};

QElt mul(const QElt& x, const QElt& y, long D) {
  return {x.r * y.r + D * x.s * y.s, x.r * y.s + x.s * y.r};
}

std::vector<mpz_class> poly_mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  std::vector<mpz_class> c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

}  // namespace

long field_discriminant(unsigned long ell) {
  if (ell < 3 || ell % 2 == 0) throw std::invalid_argument("field_discriminant: l must be an odd prime");
  const long l = static_cast<long>(ell);
  return ((ell - 1) / 2) % 2 == 0 ? l : -l;
}

unsigned long gap_exponent(unsigned long ell) { return (ell + 1) / 6; }

mpz_class eval_phi(unsigned long n, const mpz_class& x) {
  if (n == 0) throw std::invalid_argument("eval_phi: n must be positive");
  if (x == 1) {
    if (n == 1) return 0;
    auto f = small_factor(n);
    return f.size() == 1 ? mpz_class(f[0].first) : mpz_class(1);
  }
  if (x == 0) return n == 1 ? -1 : 1;
  if (x == -1) throw std::invalid_argument("eval_phi: x = -1 is not supported");
  mpz_class num = 1, den = 1, t;
  for (unsigned long d = 1; d <= n; ++d) {
    if (n % d) continue;
    const int mu = moebius(n / d);
    if (mu == 0) continue;
    mpz_pow_ui(t.get_mpz_t(), x.get_mpz_t(), d);
    t -= 1;
    (mu > 0 ? num : den) *= t;
  }
  mpz_class out;
  mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

mpz_class GaussPair::eval_A(const mpz_class& t) const { return horner(A, t); }
mpz_class GaussPair::eval_B(const mpz_class& t) const { return horner(B, t); }

GaussPair gauss_pair(unsigned long ell) {
  if (ell < 3 || !is_small_prime(ell)) throw std::invalid_argument("gauss_pair: l must be an odd prime");
  const long D = field_discriminant(ell);
  const unsigned long K = (ell - 1) / 2;
  const QElt eta0{mpq_class(-1, 2), mpq_class(1, 2)};
  const QElt eta1{mpq_class(-1, 2), mpq_class(-1, 2)};

  // Elementary symmetric functions of the quadratic-residue powers of zeta.
  std::vector<QElt> p(K + 1), e(K + 1);
  for (unsigned long k = 1; k <= K; ++k) p[k] = is_qr(k, ell) ? eta0 : eta1;
  e[0] = {1, 0};
  for (unsigned long k = 1; k <= K; ++k) {
    QElt acc{0, 0};
    for (unsigned long i = 1; i <= k; ++i) {
      QElt term = mul(e[k - i], p[i], D);
      if (i % 2) {
        acc.r += term.r;
        acc.s += term.s;
      } else {
        acc.r -= term.r;
        acc.s -= term.s;
      }
    }
    e[k] = {acc.r / k, acc.s / k};
  }

  GaussPair g;
  g.ell = ell;
  g.D = D;
  g.A.assign(K + 1, 0);
  g.B.assign(K + 1, 0);
  for (unsigned long k = 0; k <= K; ++k) {
    const int sign = k % 2 ? -1 : 1;
    const mpq_class a = 2 * sign * e[k].r;
    const mpq_class b = -2 * sign * e[k].s;
    if (a.get_den() != 1 || b.get_den() != 1)
      throw ConstructionFailure("gauss_pair: non-integral coefficient for l=" + std::to_string(ell));
    g.A[K - k] = a.get_num();
    g.B[K - k] = b.get_num();
  }
  while (g.B.size() > 1 && g.B.back() == 0) g.B.pop_back();

  // 4 Phi_l = A^2 - D B^2
  auto lhs = poly_mul(g.A, g.A);
  auto bb = poly_mul(g.B, g.B);
  for (std::size_t i = 0; i < bb.size(); ++i) lhs[i] -= D * bb[i];
  bool ok = lhs.size() == ell && g.A.back() == 2 && g.B.size() == K;
  for (std::size_t i = 0; ok && i < lhs.size(); ++i) ok = lhs[i] == 4;
  if (!ok) throw ConstructionFailure("gauss_pair: expansion check failed for l=" + std::to_string(ell));
  return g;
}

bool ratio_bound_holds(const mpz_class& X, const mpz_class& Y, long D, const mpz_class& x) {
  if (Y == 0 || x <= 0) return false;
  Interval den;
  if (D > 0) {
    den = abs(Interval(X) - Interval(Y) * sqrt(Interval(D)));
    if (den.contains_zero()) return false;
  } else {
    den = sqrt(Interval(mpz_class(X * X + mpz_class(-D) * Y * Y)));
  }
  const Interval ratio = Interval(mpz_class(abs(Y))) / den;
  const Interval xi(x);
  return certainly_less(Interval::from_decimal("0.3791") / xi, ratio) &&
         certainly_less(ratio, Interval::from_decimal("0.6296") / xi);
}

Representation represent_phi(unsigned long ell, const mpz_class& x) {
  if (x < 2) throw std::invalid_argument("represent_phi: x must be >= 2");
  const GaussPair g = gauss_pair(ell);
  const long D = g.D;
  const mpz_class phi = eval_phi(ell, x);
  const QuadElement seed(g.eval_A(x), g.eval_B(x), D);

  mpz_class threshold;
  mpz_ui_pow_ui(threshold.get_mpz_t(), 3, gap_exponent(ell));
  const bool lemma_range = x > threshold;

  std::optional<QuadElement> unit;
  if (D > 0) unit = fundamental_unit(D);

  std::optional<Representation> first_integral;
  auto consider = [&](const QuadElement& z, long k) -> std::optional<Representation> {
    if (mpz_odd_p(z.a.get_mpz_t()) || mpz_odd_p(z.b.get_mpz_t())) return std::nullopt;
    if (z.norm() != phi) return std::nullopt;  // unit of norm -1 to an odd power
    Representation r;
    r.ell = ell;
    r.x = x;
    r.D = D;
    r.X = z.a / 2;
    r.Y = z.b / 2;
    if (r.Y < 0) {
      r.X = -r.X;
      r.Y = -r.Y;
    }
    r.unit_power = k;
    r.in_lemma_range = lemma_range;
    if (r.X * r.X - D * r.Y * r.Y != phi) throw ConstructionFailure("represent_phi: norm check failed");
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), r.X.get_mpz_t(), r.Y.get_mpz_t());
    if (gcd != 1) return std::nullopt;
    r.ratio_bound_holds = ratio_bound_holds(r.X, r.Y, D, x);
    if (!first_integral) first_integral = r;
    return r.ratio_bound_holds ? std::optional<Representation>(r) : std::nullopt;
  };

  const long window = D > 0 ? 64 : 0;
  for (long step = 0; step <= window; ++step) {
    for (long k : {step, -step}) {
      if (step == 0 && k < 0) continue;
      QuadElement base = seed;
      if (k != 0) {
        QuadElement u = power(*unit, static_cast<unsigned long>(k > 0 ? k : -k));
        base = base * (k > 0 ? u : u.conj() * QuadElement::integer(u.norm(), D));
      }
      for (const QuadElement& z : {base, base.conj()})
        if (auto r = consider(z, k)) return *r;
    }
  }
  if (first_integral && !lemma_range) return *first_integral;
  throw NoIntegerRepresentation("no integral associate" + std::string(first_integral ? " with the ratio bound" : "") +
                                " for Phi_" + std::to_string(ell) + "(" + x.get_str() + ")");
}

PrimitiveDivisor has_primitive_prime_factor(const mpz_class& a, unsigned long n, const FactorOptions& opts) {
  if (a < 2 || n < 1) throw std::invalid_argument("has_primitive_prime_factor: need a >= 2, n >= 1");
  const auto fac = factorize(eval_phi(n, a), opts);
  if (!fac.complete()) throw FactorizationBudgetExceeded(fac);
  PrimitiveDivisor out;
  for (const auto& [r, k] : fac.factors) {
    (void)k;
    if (r.fits_ulong_p() && n % r.get_ui() == 0) continue;
    out.exists = true;
    out.witness = r;
    break;
  }
  return out;
}

PrimitiveDivisor has_primitive_prime_factor(const mpz_class& a, unsigned long n) {
  return has_primitive_prime_factor(a, n, FactorOptions{});
}

}  // namespace cyclocert
