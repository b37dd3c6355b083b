#include "doctest.h"

#include <random>

#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/errors.hpp"
#include "cyclocert/factorint.hpp"
#include "cyclocert/linforms.hpp"

using namespace cyclocert;

namespace {

Interval dec(const char* s) { return Interval::from_decimal(s); }

const char* kC3[] = {"16901816326.54182321815917431198426330681", "42115241839.35846285708227847033175539752"};

constexpr Theorem2Case kCases[] = {Theorem2Case::I, Theorem2Case::II, Theorem2Case::III, Theorem2Case::IV,
                                   Theorem2Case::V};

}  // namespace

TEST_CASE("Matveev constant C(3)") {
  for (int kappa : {1, 2}) {
    CAPTURE(kappa);
    const Interval c = matveev_constant(3, kappa);
    CHECK(certainly_less(dec("1e10"), c));
    CHECK(certainly_less(abs(c - dec(kC3[kappa - 1])), dec("1e-20")));
  }
  CHECK(certainly_less(matveev_constant(3, 1), matveev_constant(3, 2)));
  CHECK_THROWS_AS(matveev_constant(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(matveev_constant(3, 3), std::invalid_argument);
}

TEST_CASE("C(3) is stable across precisions") {
  for (int kappa : {1, 2}) {
    std::vector<std::string> digits;
    for (long bits : {128L, 192L, 256L}) {
      PrecisionScope scope(bits);
      const Interval c = matveev_constant(3, kappa);
      CHECK(c.precision() == bits);
      CHECK(c.relative_width() < 1e-32);
      digits.push_back(c.mid_string(30));
    }
    CHECK(digits[0] == digits[1]);
    CHECK(digits[1] == digits[2]);
  }
}

TEST_CASE("Matveev lower bound") {
  LinearFormInstance inst;
  inst.n = 3;
  inst.kappa = 1;
  inst.A = {Interval(2), Interval(3), Interval(4)};
  inst.b = {10, -20, 1};
  CHECK(certainly_less(abs(inst.B() - Interval(15)), dec("1e-30")));
  CHECK(certainly_less(abs(inst.Omega() - Interval(24)), dec("1e-30")));
  const Interval lb = matveev_lower_bound(inst);
  const Interval expect = -(matveev_constant(3, 1) * (Interval(1) + log(Interval(3) / Interval(2)) + log(Interval(15))) *
                            Interval(24));
  CHECK(certainly_less(abs(lb - expect), dec("1e-10")));
  inst.b.pop_back();
  CHECK_THROWS_AS(inst.B(), std::invalid_argument);
}

TEST_CASE("superlog resolution at 50 grid points") {
  const Interval lo = log(dec("3.6e10")), hi = log(dec("1e30"));
  for (int i = 0; i < 50; ++i) {
    const Interval t = Interval(i) / Interval(49);
    const Interval U = exp(lo + (hi - lo) * t) * (i == 0 ? dec("1.0000000001") : Interval(1));
    CAPTURE(U.mid_double());
    const Interval star = superlog_fixed_point(U);
    CHECK(star.relative_width() < 1e-8);
    CHECK(certainly_less_equal(star / Interval(2), resolve_superlog(U)));
  }
  CHECK_THROWS_AS(resolve_superlog(dec("1e10")), DomainTooSmall);
}

TEST_CASE("case bounds are increasing in log q") {
  for (unsigned long l : {17UL, 19UL, 23UL, 29UL, 43UL, 47UL, 101UL}) {
    const QuadraticField f = build_field(l);
    const Interval lp = log(Interval(static_cast<long>(2 * l + 1)));
    const Interval C3 = matveev_constant(3, f.kappa);
    for (auto c : kCases) {
      Interval prev;
      for (int i = 0; i < 64; ++i) {
        const Interval lq = lp * pow(dec("1.15"), static_cast<long>(i));
        const Interval b = theorem2_case_bound(c, l, f.h, f.regulator, lp, lq, C3);
        if (i) CHECK(certainly_less_equal(prev, b + dec("1e-20")));
        prev = b;
      }
    }
  }
}

TEST_CASE("theorem2 bound along a q grid with p fixed") {
  // the selected bound may switch cases; each displayed case is monotone, and
  // the reported value never drops below the worst value seen by more than the
  // amount a case switch allows
  for (unsigned long l : {17UL, 23UL, 41UL, 43UL, 47UL}) {
    const QuadraticField f = build_field(l);
    for (const char* p : {"103", "1000003", "100000000003"}) {
      const Interval lp = log(dec(p));
      std::size_t switches = 0;
      std::optional<BoundReport> prev;
      for (int i = 0; i < 80; ++i) {
        const Interval lq = log(Interval(static_cast<long>(2 * l + 1))) * pow(dec("1.1"), static_cast<long>(i));
        const BoundReport b = theorem2_bound(l, f.h, f.regulator, f.kappa, lp, lq);
        if (prev) {
          if (prev->kase == b.kase) CHECK(certainly_less_equal(prev->m_upper, b.m_upper + dec("1e-20")));
          else ++switches;
        }
        prev = b;
      }
      CHECK(switches <= 4);
    }
  }
}

TEST_CASE("case selection partition") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 400; ++i) {
    const unsigned long h = 1 + rng() % 9;
    const Interval R = dec("0.5") + Interval(static_cast<long>(rng() % 1000)) / Interval(50);
    const Interval lp = log(Interval(35)) + Interval(static_cast<long>(rng() % 4000)) / Interval(40);
    const Interval lq = log(Interval(35)) + Interval(static_cast<long>(rng() % 4000)) / Interval(40);
    if (!certainly_less(lp, lq) && !certainly_less(lq, lp)) continue;
    const BoundReport b = theorem2_bound(17, h, R, 1, lp, lq);
    const Interval H(static_cast<long>(h));
    const double hp = (H * lp).mid_double(), hq = (H * lq).mid_double(), r = R.mid_double();
    switch (b.kase) {
      case Theorem2Case::I: CHECK((hp < hq && r <= hp)); break;
      case Theorem2Case::II: CHECK((r <= hq && hp <= r)); break;
      case Theorem2Case::III: CHECK((hq < hp && r <= hq)); break;
      case Theorem2Case::IV: CHECK((r <= hp && hq <= r)); break;
      case Theorem2Case::V: CHECK(std::max(hp, hq) <= r); break;
    }
    for (auto c : b.tied) CHECK(theorem2_case_possible(c, h, R, lp, lq));
    if (b.kase == Theorem2Case::I) {
      REQUIRE(b.U);
    } else {
      CHECK_FALSE(b.U);
    }
  }
}

TEST_CASE("theorem2 bound on recorded instances") {
  const QuadraticField f = build_field(23);
  const BoundReport b = theorem2_bound(f, 47, mpz_class("332207361361"));
  CHECK(certainly_less(b.m_upper, dec("1.3e17")));
  CHECK(b.kase == Theorem2Case::I);
  CHECK_THROWS_AS(theorem2_bound(f, 47, 47), InvalidInstance);
  CHECK_THROWS_AS(theorem2_bound(f, 47, 53), InvalidInstance);
}

TEST_CASE("worst bound covers pointwise bounds") {
  for (unsigned long l : {17UL, 19UL, 43UL, 47UL}) {
    const QuadraticField f = build_field(l);
    const Interval a = log(Interval(1000)), b = log(Interval(100000));
    const WorstBound w = theorem2_worst_bound(l, f.h, f.regulator, f.kappa, a, b);
    for (const char* p : {"103", "9001", "99991"})
      for (const char* q : {"1009", "50021"}) {
        const Interval lp = log(dec(p)), lq = log(dec(q));
        if (!certainly_less_equal(lp, lq)) continue;
        CHECK(certainly_less_equal(theorem2_bound(l, f.h, f.regulator, f.kappa, lp, lq).m_upper, w.value));
      }
  }
}

TEST_CASE("Lambda chain on found solutions") {
  // |Lambda| is nonzero; in the lemma range it is below 2 h Y sqrt|D| / |X - Y sqrt D|
  // for D > 0 and below pi/2 times that for D < 0, where |Lambda| = 2 h theta
  for (unsigned long l : {17UL, 19UL, 23UL, 37UL, 41UL}) {
    const QuadraticField f = build_field(l);
    const SearchResult sr = search_solutions(l, 2, 30);
    for (const auto& x : sr.distinct_x()) {
      CAPTURE(l);
      CAPTURE(x.get_str());
      const Representation r = represent_phi(l, x);
      const LambdaChain c = lambda_chain(f, r);
      CHECK(c.nonzero);
      if (r.in_lemma_range && f.D > 0) CHECK(c.middle_holds);
      if (r.in_lemma_range && f.D < 0)
        CHECK(certainly_less_equal(c.lambda_abs, c.middle_bound * Interval::pi() / Interval(2)));
      CHECK(certainly_less(c.literal_bound, c.scaled_bound));
    }
  }
}
