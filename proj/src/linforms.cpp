#include "cyclocert/linforms.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cyclocert/errors.hpp"

namespace cyclocert {

namespace {

bool possibly_less(const Interval& a, const Interval& b) { return !certainly_less_equal(b, a); }
bool possibly_le(const Interval& a, const Interval& b) { return !certainly_less(b, a); }

Interval dec(const char* s) { return Interval::from_decimal(s); }

Interval from_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return Interval::from_decimal(buf);
}

}  // namespace

Interval matveev_constant(unsigned n, int kappa) {
  if (n < 2) throw std::invalid_argument("matveev_constant: n must be >= 2");
  if (kappa != 1 && kappa != 2) throw std::invalid_argument("matveev_constant: kappa must be 1 or 2");
  const Interval N(static_cast<long>(n));
  const Interval K(static_cast<long>(kappa));
  const Interval e = Interval::e();
  Interval c = Interval(16) / (factorial(n) * K);
  c *= pow(e, static_cast<long>(n));
  c *= Interval(static_cast<long>(2 * n + 1 + 2 * kappa));
  c *= Interval(static_cast<long>(n + 2));
  c *= pow(Interval(static_cast<long>(4 * (n + 1))), static_cast<long>(n + 1));
  c *= pow(e * N / Interval(2), static_cast<long>(kappa));
  c *= dec("4.4") * N + dec("5.5") * log(N) + Interval(7);
  return c;
}

Interval LinearFormInstance::B() const {
  if (A.size() != n || b.size() != n) throw std::invalid_argument("LinearFormInstance: size mismatch");
  Interval out(1);
  for (unsigned j = 0; j + 1 < n; ++j) out = max(out, Interval(mpz_class(abs(b[j]))) * A[j] / A[n - 1]);
  return max(out, Interval(mpz_class(abs(b[n - 1]))));
}

Interval LinearFormInstance::Omega() const {
  if (A.size() != n) throw std::invalid_argument("LinearFormInstance: size mismatch");
  Interval out(1);
  for (const auto& a : A) out *= a;
  return out;
}

Interval matveev_lower_bound(const LinearFormInstance& inst) {
  const Interval C = matveev_constant(inst.n, inst.kappa);
  const Interval factor = Interval(1) + log(Interval(3)) - log(Interval(2)) + log(inst.B());
  const Interval nfac = max(Interval(1), Interval(static_cast<long>(inst.n)) / Interval(6));
  return -(C * factor * nfac * inst.Omega());
}

Interval resolve_superlog(const Interval& U) {
  if (!certainly_less_equal(dec("3.6e10"), U))
    throw DomainTooSmall("U = " + U.lo_string(6) + " is below 3.6e10");
  return dec("0.569") * U * log(U);
}

Interval superlog_fixed_point(const Interval& U) {
  const double u = U.mid_double();
  if (!(u > 3.0)) throw std::invalid_argument("superlog_fixed_point: U too small");
  auto g = [&](double t) { return t - u * std::log(t); };
  double lo = u, hi = 2 * u * std::log(u) + 2 * u;
  while (g(hi) < 0) hi *= 2;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  // Widen until the sign change is certified on the interval endpoints.
  Interval a = from_double(lo * (1 - 1e-12));
  Interval b = from_double(hi * (1 + 1e-12));
  for (int i = 0; i < 60; ++i) {
    const bool a_ok = certainly_less(a - U * log(a), Interval(0)) && certainly_less_equal(U, a);
    const bool b_ok = certainly_less(Interval(0), b - U * log(b));
    if (a_ok && b_ok) return Interval::hull(a, b);
    if (!a_ok) a = a * dec("0.999999");
    if (!b_ok) b = b * dec("1.000001");
  }
  throw ConstructionFailure("superlog_fixed_point: could not certify the enclosure");
}

const char* to_string(Theorem2Case c) {
  switch (c) {
    case Theorem2Case::I: return "i";
    case Theorem2Case::II: return "ii";
    case Theorem2Case::III: return "iii";
    case Theorem2Case::IV: return "iv";
    case Theorem2Case::V: return "v";
  }
  return "?";
}

Interval theorem2_case_bound(Theorem2Case c, unsigned long ell, unsigned long h, const Interval& R,
                             const Interval& log_p, const Interval& log_q, const Interval& C3) {
  const Interval L(static_cast<long>(ell));
  const Interval H(static_cast<long>(h));
  const Interval k = dec("4.56") * C3;
  switch (c) {
    case Theorem2Case::I:
      return k * L * H * H * R * log_q * (log(Interval(8) * C3 * L * H * H * R) + log(log_p));
    case Theorem2Case::II:
      // the last factor is read as a logarithm
      return k * (L / log(Interval(2) * L)) * H * R * R * log_q *
             log(Interval(8) * C3 * L * R * R * R / (Interval(2) * L));
    case Theorem2Case::III:
      return k * L * H * H * R * log_q * (log(Interval(4) * C3 * L * H * H * R) + log(log_q));
    case Theorem2Case::IV:
      return k * L * H * R * R * log(Interval(4) * C3 * L * H * R * R);
    case Theorem2Case::V:
      return k * L * R * R * R * log(Interval(8) * C3 * L * R * R * R) / log(L);
  }
  throw std::logic_error("theorem2_case_bound");
}

bool theorem2_case_possible(Theorem2Case c, unsigned long h, const Interval& R, const Interval& log_p,
                            const Interval& log_q) {
  const Interval H(static_cast<long>(h));
  const Interval hp = H * log_p, hq = H * log_q;
  switch (c) {
    case Theorem2Case::I: return possibly_less(hp, hq) && possibly_le(R, hp);
    case Theorem2Case::II: return possibly_le(R, hq) && possibly_le(hp, R);
    case Theorem2Case::III: return possibly_less(hq, hp) && possibly_le(R, hq);
    case Theorem2Case::IV: return possibly_le(R, hp) && possibly_le(hq, R);
    case Theorem2Case::V: return possibly_le(max(hp, hq), R);
  }
  return false;
}

namespace {
constexpr Theorem2Case kAllCases[] = {Theorem2Case::I, Theorem2Case::II, Theorem2Case::III, Theorem2Case::IV,
                                      Theorem2Case::V};
}

BoundReport theorem2_bound(unsigned long ell, unsigned long h, const Interval& R, int kappa, const Interval& log_p,
                           const Interval& log_q) {
  BoundReport r;
  r.ell = ell;
  r.h = h;
  r.kappa = kappa;
  r.R = R;
  r.log_p = log_p;
  r.log_q = log_q;
  r.C3 = matveev_constant(3, kappa);
  bool found = false;
  for (Theorem2Case c : kAllCases) {
    if (!theorem2_case_possible(c, h, R, log_p, log_q)) continue;
    const Interval b = theorem2_case_bound(c, ell, h, R, log_p, log_q, r.C3);
    r.tied.push_back(c);
    if (!found || certainly_less(b, r.m_upper)) {
      r.kase = c;
      r.m_upper = b;
    }
    found = true;
  }
  if (!found) throw ConstructionFailure("theorem2_bound: no case applies");
  if (r.tied.size() == 1) r.tied.clear();
  if (r.kase == Theorem2Case::I) {
    const Interval H(static_cast<long>(h));
    r.U = Interval(4) * (Interval(2) * r.C3 + Interval(1)) * Interval(static_cast<long>(ell)) * H * H * R * log_p;
  }
  return r;
}

BoundReport theorem2_bound(const QuadraticField& field, const mpz_class& p, const mpz_class& q) {
  if (p == q) throw InvalidInstance("p and q must be distinct");
  for (const mpz_class* r : {&p, &q})
    if (mpz_fdiv_ui(r->get_mpz_t(), field.ell) != 1)
      throw InvalidInstance(r->get_str() + " is not 1 mod " + std::to_string(field.ell));
  return theorem2_bound(field.ell, field.h, field.regulator, field.kappa, log_of(p), log_of(q));
}

WorstBound theorem2_worst_bound(unsigned long ell, unsigned long h, const Interval& R, int kappa,
                                const Interval& lq_lo, const Interval& lq_hi) {
  const Interval C3 = matveev_constant(3, kappa);
  const Interval H(static_cast<long>(h));
  const Interval Rh = R / H;
  const Interval lmin = log(Interval(static_cast<long>(2 * ell + 1)));
  WorstBound out;
  bool any = false;
  auto take = [&](Theorem2Case c, const Interval& v) {
    out.cases.push_back(c);
    out.value = any ? max(out.value, v) : v;
    any = true;
  };
  if (possibly_less(max(Rh, lmin), lq_hi))
    take(Theorem2Case::I, theorem2_case_bound(Theorem2Case::I, ell, h, R, lq_hi, lq_hi, C3));
  if (possibly_le(lmin, Rh) && possibly_le(Rh, lq_hi))
    take(Theorem2Case::II, theorem2_case_bound(Theorem2Case::II, ell, h, R, lmin, lq_hi, C3));
  if (possibly_le(Rh, lq_hi))
    take(Theorem2Case::III, theorem2_case_bound(Theorem2Case::III, ell, h, R, lq_hi, lq_hi, C3));
  if (possibly_le(lq_lo, Rh))
    take(Theorem2Case::IV, theorem2_case_bound(Theorem2Case::IV, ell, h, R, lq_hi, lq_lo, C3));
  if (possibly_le(lmin, Rh) && possibly_le(lq_lo, Rh))
    take(Theorem2Case::V, theorem2_case_bound(Theorem2Case::V, ell, h, R, lmin, lq_lo, C3));
  if (!any) throw ConstructionFailure("theorem2_worst_bound: no case applies");
  return out;
}

LambdaChain lambda_chain(const QuadraticField& field, const Representation& rep) {
  if (rep.Y == 0) throw InvalidInstance("Y = 0");
  const long D = field.D;
  const Interval H(static_cast<long>(field.h));
  const Interval x(rep.x);
  const Interval sqrt_absD = sqrt(Interval(D > 0 ? D : -D));
  LambdaChain out;
  Interval conj_abs;
  if (D > 0) {
    const QuadElement z(2 * rep.X, 2 * rep.Y, D);
    const mpz_class N = z.norm();
    const Interval lw = Interval(2) * log(z.abs_value()) - log_of(mpz_class(abs(N)));
    const Interval arg = N < 0 ? Interval::pi() : Interval(0);
    out.lambda_abs = H * sqrt(lw * lw + arg * arg);
    conj_abs = z.conj().abs_value();
  } else {
    const Interval th = atan2(Interval(rep.Y) * sqrt_absD, Interval(rep.X));
    const Interval two_th = Interval(2) * th;
    const Interval pi = Interval::pi();
    Interval principal;
    if (certainly_less_equal(two_th, pi)) principal = two_th;
    else if (certainly_less(pi, two_th)) principal = Interval(2) * pi - two_th;
    else principal = Interval::hull(two_th, Interval(2) * pi - two_th);
    out.lambda_abs = H * principal;
    conj_abs = sqrt(Interval(mpz_class(rep.X * rep.X + mpz_class(-D) * rep.Y * rep.Y)));
  }
  out.nonzero = out.lambda_abs.is_positive();
  out.literal_bound = dec("1.2588") * H / x;
  out.middle_bound = Interval(2) * H * Interval(rep.Y) * sqrt_absD / conj_abs;
  out.scaled_bound = dec("1.2588") * H * sqrt_absD / x;
  out.literal_holds = out.nonzero && certainly_less(out.lambda_abs, out.literal_bound);
  out.middle_holds = out.nonzero && certainly_less(out.lambda_abs, out.middle_bound);
  out.scaled_holds = out.nonzero && certainly_less(out.lambda_abs, out.scaled_bound);
  return out;
}

}  // namespace cyclocert
