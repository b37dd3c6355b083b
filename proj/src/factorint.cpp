#include "cyclocert/factorint.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "cyclocert/cyclotomic.hpp"

namespace cyclocert {

const mpz_class kDeterministicPrimalityBound("3317044064679887385961981");

const char* to_string(Primality p) {
  switch (p) {
    case Primality::composite: return "composite";
    case Primality::probable_prime: return "probable_prime";
    case Primality::proven_prime: return "proven_prime";
  }
  return "?";
}

const char* to_string(Certainty c) { return c == Certainty::proven ? "proven" : "probable"; }

const char* to_string(Shape s) {
  switch (s) {
    case Shape::two_prime_pq: return "two_prime_pq";
    case Shape::prime: return "prime";
    case Shape::other: return "other";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// small primes

namespace {

std::mutex g_sieve_mu;
std::vector<unsigned long> g_sieve;  // primes up to g_sieve_limit
unsigned long g_sieve_limit = 0;

const std::vector<unsigned long>& sieve_at_least(unsigned long n) {
  std::lock_guard<std::mutex> lock(g_sieve_mu);
  if (n > g_sieve_limit) {
    g_sieve = primes_up_to(n);
    g_sieve_limit = n;
  }
  return g_sieve;
}

}  // namespace

std::vector<unsigned long> primes_up_to(unsigned long n) {
  std::vector<unsigned long> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (unsigned long i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (unsigned long j = i * i; j <= n && i <= n / i; j += i) composite[j] = true;
  }
  return out;
}

bool is_small_prime(unsigned long n) {
  if (n < 2) return false;
  for (unsigned long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// primality

namespace {

bool strong_probable_prime(const mpz_class& n, unsigned long base) {
  mpz_class d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_class odd = d >> s;
  mpz_class a = base;
  mpz_class x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), odd.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == d) return true;
  for (unsigned long i = 1; i < s; ++i) {
    x = (x * x) % n;
    if (x == d) return true;
    if (x == 1) return false;
  }
  return false;
}

constexpr unsigned long kMillerRabinBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

}  // namespace

Primality is_probable_prime(const mpz_class& n) {
  if (n < 2) return Primality::composite;
  for (unsigned long b : kMillerRabinBases) {
    if (n == b) return Primality::proven_prime;
    if (mpz_divisible_ui_p(n.get_mpz_t(), b)) return Primality::composite;
  }
  if (n < 43 * 43) return Primality::proven_prime;
  if (n < kDeterministicPrimalityBound) {
    for (unsigned long b : kMillerRabinBases)
      if (!strong_probable_prime(n, b)) return Primality::composite;
    return Primality::proven_prime;
  }
  // GMP runs Baillie-PSW followed by extra Miller-Rabin rounds.
  return mpz_probab_prime_p(n.get_mpz_t(), 30) == 0 ? Primality::composite : Primality::probable_prime;
}

// ---------------------------------------------------------------------------
// cache

FactorCache::FactorCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (auto rec = parse_record(line)) entries_[rec->first] = rec->second;
  }
}

std::optional<FactorCache::Entry> FactorCache::lookup(const mpz_class& n) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(n);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FactorCache::store(const mpz_class& n, const Entry& e) {
  std::lock_guard<std::mutex> lock(mu_);
  if (entries_.count(n)) return;
  entries_[n] = e;
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << format_record(n, e) << '\n';
  }
}

std::size_t FactorCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::string FactorCache::format_record(const mpz_class& n, const Entry& e) {
  std::string s = n.get_str() + '\t';
  bool first = true;
  for (const auto& [p, k] : e.factors) {
    if (!first) s += ',';
    first = false;
    s += p.get_str() + '^' + std::to_string(k);
  }
  s += '\t';
  s += to_string(e.certainty);
  return s;
}

std::optional<std::pair<mpz_class, FactorCache::Entry>> FactorCache::parse_record(const std::string& line) {
  auto t1 = line.find('\t');
  if (t1 == std::string::npos) return std::nullopt;
  auto t2 = line.find('\t', t1 + 1);
  if (t2 == std::string::npos) return std::nullopt;
  try {
    mpz_class n(line.substr(0, t1));
    Entry e;
    std::string cert = line.substr(t2 + 1);
    if (cert == "proven") e.certainty = Certainty::proven;
    else if (cert == "probable") e.certainty = Certainty::probable;
    else return std::nullopt;
    std::stringstream fs(line.substr(t1 + 1, t2 - t1 - 1));
    std::string item;
    mpz_class prod = 1;
    while (std::getline(fs, item, ',')) {
      auto caret = item.find('^');
      if (caret == std::string::npos) return std::nullopt;
      mpz_class p(item.substr(0, caret));
      unsigned long k = std::stoul(item.substr(caret + 1));
      e.factors[p] += k;
      mpz_class pk;
      mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), k);
      prod *= pk;
    }
    if (prod != n) return std::nullopt;
    return std::make_pair(n, e);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// factorization

unsigned FactorizationResult::distinct_lower_bound() const {
  unsigned k = static_cast<unsigned>(factors.size());
  for (const auto& [c, mult] : cofactors) {
    (void)mult;
    k += perfect_power(c).second > 1 ? 1 : 2;
  }
  return k;
}

std::string FactorizationResult::to_string() const {
  std::string s;
  auto append = [&](const mpz_class& p, unsigned long k, bool composite) {
    if (!s.empty()) s += " * ";
    s += composite ? "[" + p.get_str() + "]" : p.get_str();
    if (k > 1) s += "^" + std::to_string(k);
  };
  for (const auto& [p, k] : factors) append(p, k, false);
  for (const auto& [c, k] : cofactors) append(c, k, true);
  return s.empty() ? "1" : s;
}

FactorizationBudgetExceeded::FactorizationBudgetExceeded(FactorizationResult partial)
    : Error("FactorizationBudgetExceeded",
            "budget exhausted after " + std::to_string(partial.spent.total()) + " ticks factoring " +
                partial.n.get_str() + "; partial: " + partial.to_string()),
      partial_(std::move(partial)) {}

std::pair<mpz_class, unsigned long> perfect_power(const mpz_class& n) {
  if (n < 4 || !mpz_perfect_power_p(n.get_mpz_t())) return {n, 1};
  const unsigned long bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (unsigned long k = bits; k >= 2; --k) {
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), n.get_mpz_t(), k) != 0) {
      auto inner = perfect_power(r);
      return {inner.first, inner.second * k};
    }
  }
  return {n, 1};
}

namespace {

struct BudgetExhausted {};

class Factorizer {
 public:
  Factorizer(const mpz_class& n, const FactorOptions& opts) : opts_(opts) { result_.n = n; }

  FactorizationResult run() {
    mpz_class rest = result_.n;
    if (rest <= 0) throw std::invalid_argument("factorize: n must be positive");
    try {
      rest = trial_divide(rest);
      while (rest > 1) {
        if (early_stop(rest)) {
          result_.cofactors.emplace_back(rest, 1);
          break;
        }
        split_one(rest, 1);
      }
    } catch (const BudgetExhausted&) {
      for (auto& c : pending_) result_.cofactors.push_back(c);
      throw FactorizationBudgetExceeded(result_);
    }
    check_product();
    return result_;
  }

 private:
  void tick(std::uint64_t& counter, std::uint64_t k = 1) {
    counter += k;
    if (result_.spent.total() > opts_.budget_ticks) throw BudgetExhausted{};
  }

  void add_prime(const mpz_class& p, unsigned long k, Primality status) {
    result_.factors[p] += k;
    if (status == Primality::probable_prime) result_.certainty = Certainty::probable;
  }

  bool early_stop(const mpz_class& rest) const {
    if (opts_.stop_at_distinct == 0) return false;
    unsigned known = static_cast<unsigned>(result_.factors.size());
    unsigned extra = 0;
    if (rest > 1) {
      if (is_probable_prime(rest) != Primality::composite) extra = 1;
      else extra = perfect_power(rest).second > 1 ? 1 : 2;
    }
    return known + extra >= opts_.stop_at_distinct && extra == 2;
  }

  mpz_class trial_divide(mpz_class rest) {
    auto divide_out = [&](unsigned long d) {
      tick(result_.spent.trial_divisions);
      if (!mpz_divisible_ui_p(rest.get_mpz_t(), d)) return;
      unsigned long k = 0;
      while (mpz_divisible_ui_p(rest.get_mpz_t(), d)) {
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), d);
        ++k;
      }
      add_prime(mpz_class(d), k, Primality::proven_prime);
    };
    const unsigned long bound = opts_.trial_bound;
    if (opts_.hint_ell) {
      const unsigned long ell = *opts_.hint_ell;
      if (ell >= 2) divide_out(ell);
      const unsigned long step = 2 * ell;
      for (unsigned long r = step + 1; r <= bound; r += step) {
        if (rest == 1 || mpz_cmp_ui(rest.get_mpz_t(), r) < 0) break;
        if (r <= 0xFFFFFFFFUL && mpz_cmp_ui(rest.get_mpz_t(), r * r) < 0) break;
        divide_out(r);
      }
    } else {
      for (unsigned long p : sieve_at_least(bound)) {
        if (p > bound) break;
        if (rest == 1) break;
        if (p <= 0xFFFFFFFFUL && mpz_cmp_ui(rest.get_mpz_t(), p * p) < 0) break;
        divide_out(p);
      }
    }
    // Whatever survives below bound^2 is prime.
    if (rest > 1) {
      mpz_class b2 = mpz_class(bound) * bound;
      if (rest < b2 && !opts_.hint_ell) {
        add_prime(rest, 1, Primality::proven_prime);
        rest = 1;
      }
    }
    return rest;
  }

  // Factors `c` completely (or to the first cofactor when stopping early is not
  // possible here) and removes every prime found from `rest`.
  void split_one(mpz_class& rest, unsigned long mult) {
    std::vector<std::pair<mpz_class, unsigned long>> found;
    factor_completely(rest, mult, found);
    rest = 1;
    for (auto& [p, k] : found) add_prime(p, k, is_probable_prime(p));
  }

  void factor_completely(const mpz_class& c0, unsigned long mult,
                         std::vector<std::pair<mpz_class, unsigned long>>& out) {
    mpz_class c = c0;
    while (c > 1) {
      pending_.assign(1, {c, mult});
      Primality st = is_probable_prime(c);
      if (st != Primality::composite) {
        out.emplace_back(c, mult);
        pending_.clear();
        return;
      }
      auto [base, k] = perfect_power(c);
      if (k > 1) {
        factor_completely(base, mult * k, out);
        return;
      }
      mpz_class d = find_factor(c);
      // Factor the (smaller) divisor first, then strip its primes from c.
      std::vector<std::pair<mpz_class, unsigned long>> sub;
      factor_completely(d, 1, sub);
      for (auto& [p, e] : sub) {
        (void)e;
        unsigned long times = mpz_remove(c.get_mpz_t(), c.get_mpz_t(), p.get_mpz_t());
        out.emplace_back(p, times * mult);
      }
      pending_.clear();
      if (c > 1 && early_stop_inner(out, c)) {
        pending_.emplace_back(c, mult);
        throw_stop(out);
      }
    }
  }

  bool early_stop_inner(const std::vector<std::pair<mpz_class, unsigned long>>& out, const mpz_class& c) const {
    if (opts_.stop_at_distinct == 0) return false;
    std::vector<mpz_class> distinct;
    for (auto& [p, k] : result_.factors) distinct.push_back(p);
    for (auto& [p, k] : out)
      if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
    if (is_probable_prime(c) != Primality::composite) return false;
    if (perfect_power(c).second > 1) return false;
    return distinct.size() + 2 >= opts_.stop_at_distinct;
  }

  [[noreturn]] void throw_stop(const std::vector<std::pair<mpz_class, unsigned long>>& out) {
    for (auto& [p, k] : out) add_prime(p, k, is_probable_prime(p));
    throw EarlyStop{};
  }

 public:
  struct EarlyStop {};
  FactorizationResult run_with_stop() {
    try {
      return run();
    } catch (const EarlyStop&) {
      for (auto& c : pending_) result_.cofactors.push_back(c);
      pending_.clear();
      check_product();
      return result_;
    }
  }

 private:
  mpz_class find_factor(const mpz_class& n) {
    if (mpz_even_p(n.get_mpz_t())) return mpz_class(2);
    if (auto d = pollard_pm1(n)) return *d;
    for (unsigned long c = 1;; ++c) {
      if (auto d = brent_rho(n, c)) return *d;
    }
  }

  std::optional<mpz_class> pollard_pm1(const mpz_class& n) {
    constexpr unsigned long kB1 = 200000;
    const auto& primes = sieve_at_least(kB1);
    mpz_class a = 2;
    mpz_class g;
    auto powm = [&](const mpz_class& e) {
      const unsigned long bits = mpz_sizeinbase(e.get_mpz_t(), 2);
      tick(result_.spent.pm1_mulmods, bits + bits / 4 + 1);
      mpz_powm(a.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
    };
    if (opts_.hint_ell) powm(mpz_class(2 * *opts_.hint_ell));
    std::size_t since_gcd = 0;
    for (unsigned long p : primes) {
      if (p > kB1) break;
      unsigned long pk = p;
      while (pk <= kB1 / p) pk *= p;
      powm(mpz_class(pk));
      if (++since_gcd == 512) {
        since_gcd = 0;
        mpz_class am1 = a - 1;
        mpz_gcd(g.get_mpz_t(), am1.get_mpz_t(), n.get_mpz_t());
        if (g == n) return std::nullopt;
        if (g > 1) return g;
      }
    }
    mpz_class am1 = a - 1;
    mpz_gcd(g.get_mpz_t(), am1.get_mpz_t(), n.get_mpz_t());
    if (g > 1 && g < n) return g;
    return std::nullopt;
  }

  std::optional<mpz_class> brent_rho(const mpz_class& n, unsigned long c) {
    constexpr unsigned long kBatch = 128;
    mpz_class y = 2 + c, x, ys, q = 1, g = 1, t;
    auto f = [&](mpz_class& v) {
      mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
      mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), c);
      mpz_tdiv_r(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    unsigned long r = 1;
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) f(y);
      tick(result_.spent.rho_mulmods, r);
      unsigned long k = 0;
      do {
        ys = y;
        const unsigned long lim = std::min(kBatch, r - k);
        for (unsigned long i = 0; i < lim; ++i) {
          f(y);
          mpz_sub(t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          mpz_mul(q.get_mpz_t(), q.get_mpz_t(), t.get_mpz_t());
          mpz_tdiv_r(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        tick(result_.spent.rho_mulmods, 2 * lim);
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += kBatch;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        f(ys);
        tick(result_.spent.rho_mulmods);
        mpz_sub(t.get_mpz_t(), x.get_mpz_t(), ys.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g == n || g == 0) return std::nullopt;
    return abs(g);
  }

  void check_product() const {
    mpz_class prod = 1, pk;
    for (const auto& [p, k] : result_.factors) {
      mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), k);
      prod *= pk;
    }
    for (const auto& [c, k] : result_.cofactors) {
      mpz_pow_ui(pk.get_mpz_t(), c.get_mpz_t(), k);
      prod *= pk;
    }
    if (prod != result_.n) throw ConstructionFailure("factor product mismatch for " + result_.n.get_str());
  }

  const FactorOptions& opts_;
  FactorizationResult result_;
  std::vector<std::pair<mpz_class, unsigned long>> pending_;
};

}  // namespace

FactorizationResult factorize(const mpz_class& n, const FactorOptions& opts) {
  if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
  if (opts.cache) {
    if (auto e = opts.cache->lookup(n)) {
      FactorizationResult r;
      r.n = n;
      r.factors = e->factors;
      r.certainty = e->certainty;
      r.from_cache = true;
      return r;
    }
  }
  Factorizer f(n, opts);
  FactorizationResult r = f.run_with_stop();
  if (opts.cache && r.complete() && n > 1) opts.cache->store(n, {r.factors, r.certainty});
  return r;
}

// ---------------------------------------------------------------------------
// solution shapes

ShapeClassification classify_phi_shape(unsigned long ell, const mpz_class& x, const FactorOptions& opts) {
  if (x < 2) throw std::invalid_argument("classify_phi_shape: x must be >= 2");
  ShapeClassification out;
  FactorOptions o = opts;
  o.hint_ell = ell;
  o.stop_at_distinct = 3;
  out.factorization = factorize(eval_phi(ell, x), o);
  const auto& fac = out.factorization;
  if (!fac.complete()) {
    out.shape = Shape::other;
    out.reason = "at least " + std::to_string(fac.distinct_lower_bound()) + " distinct prime factors";
    return out;
  }
  const auto& f = fac.factors;
  if (f.size() == 1) {
    const auto& [p, k] = *f.begin();
    out.shape = k == 1 ? Shape::prime : Shape::other;
    out.reason = k == 1 ? "prime" : "prime power " + p.get_str() + "^" + std::to_string(k);
    return out;
  }
  if (f.size() >= 3) {
    out.shape = Shape::other;
    out.reason = std::to_string(f.size()) + " distinct prime factors";
    return out;
  }
  auto it = f.begin();
  auto [p1, e1] = *it++;
  auto [p2, e2] = *it;
  for (const mpz_class* r : {&p1, &p2}) {
    if (mpz_fdiv_ui(r->get_mpz_t(), ell) != 1) {
      out.shape = Shape::other;
      out.reason = "prime factor " + r->get_str() + " is not 1 mod " + std::to_string(ell);
      return out;
    }
  }
  if (e1 > 1 && e2 > 1) {
    out.shape = Shape::other;
    out.reason = "both exponents exceed one";
    return out;
  }
  out.shape = Shape::two_prime_pq;
  out.reason = "p^m q";
  auto rec = [&](const mpz_class& p, unsigned long m, const mpz_class& q) {
    out.records.push_back({ell, x, m, p, q, Shape::two_prime_pq});
  };
  if (e1 == 1 && e2 == 1) {
    rec(p1, 1, p2);
    rec(p2, 1, p1);
  } else if (e1 > 1) {
    rec(p1, e1, p2);
  } else {
    rec(p2, e2, p1);
  }
  return out;
}

std::vector<mpz_class> SearchResult::distinct_x() const {
  std::vector<mpz_class> xs;
  for (const auto& r : records)
    if (xs.empty() || xs.back() != r.x) xs.push_back(r.x);
  return xs;
}

std::optional<mpz_class> SearchResult::min_prime() const {
  std::optional<mpz_class> m;
  for (const auto& r : records)
    for (const mpz_class* v : {&r.p, &r.q})
      if (!m || *v < *m) m = *v;
  return m;
}

std::optional<mpz_class> SearchResult::max_prime() const {
  std::optional<mpz_class> m;
  for (const auto& r : records)
    for (const mpz_class* v : {&r.p, &r.q})
      if (!m || *v > *m) m = *v;
  return m;
}

SearchResult search_solutions(unsigned long ell, const mpz_class& x_min, const mpz_class& x_max,
                              const std::optional<std::pair<mpz_class, mpz_class>>& filter,
                              const FactorOptions& opts, unsigned jobs) {
  if (x_max < x_min) throw std::invalid_argument("search_solutions: empty x range");
  const mpz_class lo = x_min < 2 ? mpz_class(2) : x_min;
  if (x_max < lo) return {};
  const mpz_class span = x_max - lo + 1;
  if (!span.fits_ulong_p() || span.get_ui() > 100'000'000UL)
    throw std::invalid_argument("search_solutions: x range too large");
  const unsigned long count = span.get_ui();

  struct Slot {
    std::vector<SolutionRecord> records;
    std::optional<std::string> failure;
    std::optional<std::string> rejected;
  };
  std::vector<Slot> slots(count);
  std::atomic<unsigned long> next{0};
  auto worker = [&] {
    for (unsigned long i; (i = next.fetch_add(1)) < count;) {
      const mpz_class x = lo + i;
      try {
        auto cls = classify_phi_shape(ell, x, opts);
        if (cls.shape != Shape::two_prime_pq) slots[i].rejected = to_string(cls.shape) + std::string(": ") + cls.reason;
        for (auto& r : cls.records) {
          if (filter && (r.p != filter->first || r.q != filter->second)) continue;
          slots[i].records.push_back(std::move(r));
        }
      } catch (const FactorizationBudgetExceeded& e) {
        slots[i].failure = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::min<unsigned long>(count, 256))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  SearchResult out;
  for (unsigned long i = 0; i < count; ++i) {
    auto& s = slots[i];
    std::sort(s.records.begin(), s.records.end(),
              [](const SolutionRecord& a, const SolutionRecord& b) { return a.p < b.p; });
    for (auto& r : s.records) out.records.push_back(std::move(r));
    if (s.failure) out.failures.push_back({lo + i, *s.failure});
    if (s.rejected) out.rejected.push_back({lo + i, *s.rejected});
  }
  return out;
}

// ---------------------------------------------------------------------------
// dependent pairs

DependentStructure dependent_structure(unsigned long ell, const mpz_class& x1, const mpz_class& x2,
                                       const FactorOptions& opts) {
  if (x1 < 2 || x2 <= x1) throw std::invalid_argument("dependent_structure: need x2 > x1 >= 2");
  DependentStructure out;
  auto [b1, k1] = perfect_power(x1);
  auto [b2, k2] = perfect_power(x2);
  if (b1 != b2) {
    out.detail = "independent";
    return out;
  }
  out.dependent = true;
  out.base = b1;
  out.r1 = k1;
  out.r2 = k2;

  FactorOptions o = opts;
  o.hint_ell = ell;
  const auto f1 = factorize(eval_phi(ell, x1), o);
  const auto f2 = factorize(eval_phi(ell, x2), o);
  std::vector<mpz_class> primes;
  for (const auto* f : {&f1, &f2})
    for (const auto& [p, k] : f->factors)
      if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
  // Phi(x_i) = p^{m_i} q with m_1 >= 0, m_2 >= 1 for some ordering of the primes.
  auto matches = [](const FactorizationResult& f, const mpz_class& p, const mpz_class* q) {
    for (const auto& [r, k] : f.factors) {
      if (q && r == *q) {
        if (k != 1) return false;
      } else if (r != p) {
        return false;
      }
    }
    return q == nullptr || f.factors.count(*q) == 1;
  };
  mpz_class p, q;
  if (primes.size() == 2 && f1.complete() && f2.complete()) {
    for (int swap = 0; swap < 2 && !out.common_pq; ++swap) {
      const mpz_class& qq = primes[swap];
      const mpz_class& pp = primes[1 - swap];
      if (matches(f1, pp, &qq) && matches(f2, pp, &qq) && f2.factors.count(pp)) {
        out.common_pq = true;
        p = pp;
        q = qq;
      }
    }
  }
  if (!out.common_pq) {
    out.detail = "dependent; values do not share a p^m q shape";
    return out;
  }
  out.conclusion_checked = true;
  const unsigned long r = k2 / k1;
  const bool r1_one = k1 == 1;
  const bool r_prime = k2 % k1 == 0 && is_small_prime(r);
  bool tail = false;
  if (r1_one && r_prime) {
    const mpz_class phi_rl = eval_phi(r * ell, x1);
    mpz_class rest = phi_rl;
    mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
    tail = rest == 1 && phi_rl > 1 && eval_phi(ell, x1) == q;
  }
  out.conclusion_holds = r1_one && r_prime && tail;
  out.detail = "p=" + p.get_str() + " q=" + q.get_str() + (out.conclusion_holds ? "; conclusion holds" : "; conclusion fails");
  return out;
}

// ---------------------------------------------------------------------------
// escalation

EscalationResult escalation_check(unsigned long ell, const mpz_class& x1, const mpz_class& p,
                                  const mpz_class& q, const mpz_class& limit) {
  EscalationResult out;
  out.limit = limit;
  const mpz_class s = std::min(p, q);
  const mpz_class t = std::max(p, q);
  if (mpz_fdiv_ui(s.get_mpz_t(), ell) != 1 || mpz_fdiv_ui(t.get_mpz_t(), ell) != 1)
    throw std::invalid_argument("escalation_check: primes must be 1 mod l");

  // Primitive l-th root of unity modulo s.
  const mpz_class cof = (s - 1) / ell;
  mpz_class zeta;
  for (unsigned long g = 2;; ++g) {
    mpz_class gg = g;
    mpz_powm(zeta.get_mpz_t(), gg.get_mpz_t(), cof.get_mpz_t(), s.get_mpz_t());
    if (zeta != 1) break;
  }
  const mpz_class ell_z = ell;
  mpz_class root = 1;
  for (unsigned long i = 1; i < ell; ++i) {
    root = (root * zeta) % s;
    // first lift of this residue strictly above x1
    mpz_class x = root;
    if (x <= x1) {
      mpz_class k = (x1 - x) / s + 1;
      x += k * s;
    }
    for (; x <= limit; x += s) {
      ++out.candidates_checked;
      mpz_class xt = x % t;
      if (xt == 1) continue;
      mpz_class pw;
      mpz_powm(pw.get_mpz_t(), xt.get_mpz_t(), ell_z.get_mpz_t(), t.get_mpz_t());
      if (pw != 1) continue;
      mpz_class v = eval_phi(ell, x);
      const unsigned long ep = mpz_remove(v.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t());
      const unsigned long eq = mpz_remove(v.get_mpz_t(), v.get_mpz_t(), q.get_mpz_t());
      if (v == 1 && ep >= 1 && eq >= 1 && (ep == 1 || eq == 1)) out.second_solutions.push_back(x);
    }
  }
  std::sort(out.second_solutions.begin(), out.second_solutions.end());
  return out;
}

}  // namespace cyclocert
