#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "cyclocert/cyclotomic.hpp"
#include "cyclocert/factorint.hpp"
#include "cyclocert/quadfield.hpp"

using namespace cyclocert;

namespace {

mpz_class product(const FactorizationResult& r) {
  mpz_class v = 1, t;
  for (const auto& [p, e] : r.factors) {
    mpz_pow_ui(t.get_mpz_t(), p.get_mpz_t(), e);
    v *= t;
  }
  for (const auto& [c, e] : r.cofactors) {
    mpz_pow_ui(t.get_mpz_t(), c.get_mpz_t(), e);
    v *= t;
  }
  return v;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / (std::string(name) + std::to_string(::getpid()))).string();
}

}  // namespace

TEST_CASE("primality") {
  const auto small = primes_up_to(10000);
  std::size_t k = 0;
  for (unsigned long n = 0; n <= 10000; ++n) {
    const bool prime = k < small.size() && small[k] == n;
    if (prime) ++k;
    CHECK((is_probable_prime(n) != Primality::composite) == prime);
  }
  CHECK(is_probable_prime(561) == Primality::composite);
  CHECK(is_probable_prime(3215031751UL) == Primality::composite);
  CHECK(is_probable_prime(mpz_class("2305843009213693951")) == Primality::proven_prime);
  CHECK(is_probable_prime(mpz_class("11111111111111111111111")) == Primality::proven_prime);
  CHECK(is_probable_prime(mpz_class("618970019642690137449562111")) == Primality::probable_prime);
  CHECK(is_probable_prime(mpz_class("618970019642690137449562113")) == Primality::composite);
}

TEST_CASE("key factorizations") {
  const auto f43 = factorize(mpz_class("8796093022207"));
  CHECK(f43.to_string() == "431 * 9719 * 2099863");
  CHECK(factorize(mpz_class("137438953471")).to_string() == "223 * 616318177");
  CHECK(factorize(mpz_class("2199023255551")).to_string() == "13367 * 164511353");
  CHECK(factorize(12).to_string() == "2^2 * 3");
  CHECK(factorize(1).factors.empty());
  const mpz_class f7 = mpz_class("340282366920938463463374607431768211457");
  const auto r = factorize(f7);
  REQUIRE(r.complete());
  CHECK(r.factors.size() == 2);
  CHECK(r.factors.count(mpz_class("59649589127497217")) == 1);
  CHECK(product(r) == f7);
  const auto m67 = factorize(mpz_class("147573952589676412927"));
  CHECK(m67.to_string() == "193707721 * 761838257287");
}

TEST_CASE("factorization product is always the input") {
  for (unsigned long n = 1; n < 3000; ++n) CHECK(product(factorize(n)) == n);
  for (long x = 2; x <= 30; ++x) {
    const mpz_class v = eval_phi(19, x);
    CHECK(product(factorize(v)) == v);
  }
}

TEST_CASE("budget exhaustion leaves a cofactor") {
  // two 19-digit primes out of reach of a tiny budget
  const mpz_class p("1000000000000000003"), q("1000000000000000009");
  FactorOptions o;
  o.budget_ticks = 1000;
  o.trial_bound = 100;
  CHECK_THROWS_AS(factorize(p * q, o), FactorizationBudgetExceeded);
  try {
    factorize(p * q, o);
  } catch (const FactorizationBudgetExceeded& e) {
    const auto& r = e.partial();
    CHECK_FALSE(r.complete());
    CHECK(product(r) == p * q);
    CHECK(r.distinct_lower_bound() >= 1);
    CHECK(r.spent.total() > o.budget_ticks);
  }
}

TEST_CASE("hinted and unhinted agree on Phi values") {
  for (unsigned long l : {17UL, 19UL, 23UL}) {
    for (long x = 2; x <= 20; ++x) {
      CAPTURE(l);
      CAPTURE(x);
      FactorOptions hinted;
      hinted.hint_ell = l;
      const auto a = factorize(eval_phi(l, x), hinted);
      const auto b = factorize(eval_phi(l, x));
      REQUIRE(a.complete());
      REQUIRE(b.complete());
      CHECK(a.factors == b.factors);
      for (const auto& [r, e] : b.factors) {
        (void)e;
        CHECK((r % l == 1 || r == l));
      }
    }
  }
}

TEST_CASE("cache records round-trip") {
  FactorCache::Entry e;
  e.factors = {{mpz_class(431), 1}, {mpz_class(9719), 1}, {mpz_class(2099863), 1}};
  const std::string line = FactorCache::format_record(mpz_class("8796093022207"), e);
  CHECK(line == "8796093022207\t431^1,9719^1,2099863^1\tproven");
  const auto back = FactorCache::parse_record(line);
  REQUIRE(back);
  CHECK(back->first == mpz_class("8796093022207"));
  CHECK(back->second.factors == e.factors);
  CHECK(FactorCache::format_record(back->first, back->second) == line);
  CHECK_FALSE(FactorCache::parse_record("garbage"));
  CHECK_FALSE(FactorCache::parse_record("12\t2^2,3^1\tmaybe"));
  CHECK_FALSE(FactorCache::parse_record("13\t2^2,3^1\tproven"));  // product mismatch
}

TEST_CASE("cache file persists factorizations") {
  const std::string path = temp_path("cyclocert_cache_");
  std::remove(path.c_str());
  {
    FactorCache c(path);
    FactorOptions o;
    o.cache = &c;
    const auto r = factorize(mpz_class("8796093022207"), o);
    CHECK_FALSE(r.from_cache);
    CHECK(c.size() >= 1);
  }
  {
    FactorCache c(path);
    CHECK(c.lookup(mpz_class("8796093022207")));
    FactorOptions o;
    o.cache = &c;
    const auto r = factorize(mpz_class("8796093022207"), o);
    CHECK(r.from_cache);
    CHECK(r.to_string() == "431 * 9719 * 2099863");
  }
  std::remove(path.c_str());
}

TEST_CASE("shape classification") {
  const auto c43 = classify_phi_shape(43, 2);
  CHECK(c43.shape == Shape::other);
  CHECK(c43.reason == "3 distinct prime factors");
  CHECK(classify_phi_shape(23, 10).shape == Shape::prime);
  const auto c23 = classify_phi_shape(23, 2);
  CHECK(c23.shape == Shape::two_prime_pq);
  CHECK(c23.records.size() == 2);
  CHECK(classify_phi_shape(17, 18).shape == Shape::other);  // 17 | Phi_17(18)
}

TEST_CASE("search for l = 23") {
  const SearchResult r = search_solutions(23, 2, 12);
  CHECK(r.distinct_x() == std::vector<mpz_class>{2, 3, 5});
  CHECK(*r.min_prime() == 47);
  CHECK(*r.max_prime() == mpz_class("332207361361"));
  CHECK(r.failures.empty());
  CHECK(r.rejected.size() == 8);
  CHECK(search_solutions(23, 6, 9).records.empty());
  const SearchResult par = search_solutions(23, 2, 12, std::nullopt, {}, 4);
  REQUIRE(par.records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    CHECK(par.records[i].x == r.records[i].x);
    CHECK(par.records[i].p == r.records[i].p);
  }
}

TEST_CASE("filtered search records satisfy the ideal equation") {
  const QuadraticField f = build_field(23);
  const auto pq = std::make_pair(mpz_class(47), mpz_class(178481));
  const SearchResult r = search_solutions(23, 2, 12, pq);
  REQUIRE(r.records.size() >= 1);
  for (const auto& rec : r.records) {
    CHECK(rec.x == 2);
    CHECK(verify_ideal_equation(f, represent_phi(23, rec.x), rec.p, rec.q, rec.m));
  }
}

TEST_CASE("escalation finds no second solution up to 10^6") {
  struct Case {
    unsigned long l;
    long x;
    const char* p;
    const char* q;
  };
  const Case cases[] = {{23, 2, "47", "178481"}, {23, 5, "8971", "332207361361"}, {37, 2, "223", "616318177"},
                        {41, 2, "13367", "164511353"}};
  for (const auto& c : cases) {
    const auto e = escalation_check(c.l, c.x, mpz_class(c.p), mpz_class(c.q), 1'000'000);
    CHECK(e.second_solutions.empty());
    CHECK(e.candidates_checked > 0);
    CHECK(e.limit == 1'000'000);
  }
  // candidates are lifts of the 22 roots of Phi_23 modulo 47
  const auto e = escalation_check(23, 2, 47, 178481, 48);
  CHECK(e.candidates_checked <= 22);
  CHECK(e.second_solutions.empty());
}

TEST_CASE("dependent structure") {
  const auto ind = dependent_structure(17, 2, 3);
  CHECK_FALSE(ind.dependent);
  const auto dep = dependent_structure(17, 3, 9);
  CHECK(dep.dependent);
  CHECK(dep.base == 3);
  CHECK(dep.r1 == 1);
  CHECK(dep.r2 == 2);
  // Phi_5(2) = 31 = q, Phi_5(4) = 11 * 31 = p q with p = Phi_10(2)
  const auto d5 = dependent_structure(5, 2, 4);
  CHECK(d5.common_pq);
  CHECK(d5.conclusion_checked);
  CHECK(d5.conclusion_holds);
  const auto d3 = dependent_structure(3, 2, 4);
  CHECK(d3.common_pq);
  CHECK(d3.conclusion_holds);
  CHECK_THROWS_AS(dependent_structure(17, 4, 4), std::invalid_argument);
}

TEST_CASE("perfect powers") {
  CHECK(perfect_power(64) == std::make_pair(mpz_class(2), 6UL));
  CHECK(perfect_power(12) == std::make_pair(mpz_class(12), 1UL));
  CHECK(perfect_power(mpz_class("1000000000000")) == std::make_pair(mpz_class(10), 12UL));
}
