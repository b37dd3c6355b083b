#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclocert/errors.hpp"

namespace cyclocert {

enum class Primality { composite, probable_prime, proven_prime };
const char* to_string(Primality p);

// Strong-pseudoprime tests to the first 13 prime bases are deterministic below
// this bound; above it the BPSW test gives a probable answer.
extern const mpz_class kDeterministicPrimalityBound;

Primality is_probable_prime(const mpz_class& n);

enum class Certainty { proven, probable };
const char* to_string(Certainty c);

// Append-only factorization cache. One record per line:
//   n_decimal<TAB>p1^e1,p2^e2,...<TAB>certainty
class FactorCache {
 public:
  FactorCache() = default;
  explicit FactorCache(std::string path);

  struct Entry {
    std::map<mpz_class, unsigned long> factors;
    Certainty certainty = Certainty::proven;
  };

  std::optional<Entry> lookup(const mpz_class& n) const;
  void store(const mpz_class& n, const Entry& e);
  std::size_t size() const;
  const std::string& path() const { return path_; }

  static std::string format_record(const mpz_class& n, const Entry& e);
  static std::optional<std::pair<mpz_class, Entry>> parse_record(const std::string& line);

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<mpz_class, Entry> entries_;
};

struct FactorOptions {
  // Restrict trial division to 1 (mod 2l) and l itself; valid for values of Phi_l.
  std::optional<unsigned long> hint_ell;
  // One tick is one modular multiplication (trial divisions count one each).
  std::uint64_t budget_ticks = 4'000'000'000ULL;
  std::uint64_t trial_bound = 10'000'000ULL;
  FactorCache* cache = nullptr;
  // Stop as soon as the number is known to have at least this many distinct
  // prime factors (0 = factor completely).
  unsigned stop_at_distinct = 0;
};

struct BudgetCounters {
  std::uint64_t trial_divisions = 0;
  std::uint64_t pm1_mulmods = 0;
  std::uint64_t rho_mulmods = 0;
  std::uint64_t total() const { return trial_divisions + pm1_mulmods + rho_mulmods; }
};

struct FactorizationResult {
  mpz_class n;
  std::map<mpz_class, unsigned long> factors;  // primes found so far
  // Unfactored composite cofactors (empty when complete), with multiplicity.
  std::vector<std::pair<mpz_class, unsigned long>> cofactors;
  Certainty certainty = Certainty::proven;
  BudgetCounters spent;
  bool from_cache = false;

  bool complete() const { return cofactors.empty(); }
  // Lower bound on the number of distinct prime factors of n.
  unsigned distinct_lower_bound() const;
  std::string to_string() const;  // "p1^e1 * p2 * ..."
};

class FactorizationBudgetExceeded : public Error {
 public:
  explicit FactorizationBudgetExceeded(FactorizationResult partial);
  const FactorizationResult& partial() const { return partial_; }

 private:
  FactorizationResult partial_;
};

// Complete factorization of n >= 1 (or an early stop per opts.stop_at_distinct).
// The product of the result is re-multiplied and checked against n.
FactorizationResult factorize(const mpz_class& n, const FactorOptions& opts = {});

enum class Shape { two_prime_pq, prime, other };
const char* to_string(Shape s);

struct SolutionRecord {
  unsigned long ell = 0;
  mpz_class x;
  unsigned long m = 0;
  mpz_class p;  // prime carrying the exponent m
  mpz_class q;  // prime to the first power
  Shape shape = Shape::other;
};

struct ShapeClassification {
  Shape shape = Shape::other;
  FactorizationResult factorization;
  // two_prime_pq only: one record, or both orderings when both exponents are 1.
  std::vector<SolutionRecord> records;
  std::string reason;
};

ShapeClassification classify_phi_shape(unsigned long ell, const mpz_class& x, const FactorOptions& opts = {});

struct SearchFailure {
  mpz_class x;
  std::string message;
};

struct SearchResult {
  std::vector<SolutionRecord> records;  // ascending x, then p
  std::vector<SearchFailure> failures;  // budget exhaustion per x
  std::vector<SearchFailure> rejected;  // x whose value has another shape, with the reason
  std::vector<mpz_class> distinct_x() const;
  std::optional<mpz_class> min_prime() const;
  std::optional<mpz_class> max_prime() const;
};

// All x in [x_min, x_max] with Phi_l(x) = p^m q, p != q, p = q = 1 (mod l), m >= 1.
SearchResult search_solutions(unsigned long ell, const mpz_class& x_min, const mpz_class& x_max,
                              const std::optional<std::pair<mpz_class, mpz_class>>& filter = std::nullopt,
                              const FactorOptions& opts = {}, unsigned jobs = 1);

// Multiplicative (in)dependence of x1 < x2, and the conclusion of the
// dependent-pair lemma when both values have shape p^m q for a common (p, q).
struct DependentStructure {
  bool dependent = false;
  mpz_class base;  // y with x1 = y^r1, x2 = y^r2
  unsigned long r1 = 0;
  unsigned long r2 = 0;
  bool common_pq = false;       // both Phi values are p^{m_i} q for the same (p, q)
  bool conclusion_checked = false;
  bool conclusion_holds = false;  // r1 = 1, r prime, Phi_{rl}(x1) = p^{m2}, Phi_l(x1) = q
  std::string detail;
};

DependentStructure dependent_structure(unsigned long ell, const mpz_class& x1, const mpz_class& x2,
                                       const FactorOptions& opts = {});

// Searches x in (x1, limit] for another solution Phi_l(x) = p^m q with the same
// (p, q) in either role. Candidates are the lifts of the roots of Phi_l modulo
// the smaller prime.
struct EscalationResult {
  mpz_class limit;
  std::uint64_t candidates_checked = 0;
  std::vector<mpz_class> second_solutions;
};

EscalationResult escalation_check(unsigned long ell, const mpz_class& x1, const mpz_class& p,
                                  const mpz_class& q, const mpz_class& limit);

// Integer root: returns (base, k) with n = base^k and k maximal.
std::pair<mpz_class, unsigned long> perfect_power(const mpz_class& n);

std::vector<unsigned long> primes_up_to(unsigned long n);
bool is_small_prime(unsigned long n);

}  // namespace cyclocert
