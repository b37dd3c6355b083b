#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cyclocert/certifier.hpp"
#include "cyclocert/factorint.hpp"
#include "cyclocert/interval.hpp"
#include "cyclocert/linforms.hpp"
#include "cyclocert/quadfield.hpp"

namespace cyclocert {

enum class OutputFormat { json, tsv };
const char* to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

enum ExitCode : int { kExitOk = 0, kExitNotCertified = 1, kExitInputError = 2, kExitBudget = 3 };

struct RunConfig {
  std::uint64_t budget = FactorOptions{}.budget_ticks;
  std::uint64_t trial_bound = FactorOptions{}.trial_bound;
  long precision_bits = 192;
  unsigned jobs = 1;
  std::string cache_path;
  OutputFormat format = OutputFormat::json;

  void validate() const;  // throws std::invalid_argument
  // Defaults overridden by CYCLOCERT_BUDGET, CYCLOCERT_TRIAL_BOUND,
  // CYCLOCERT_PRECISION_BITS, CYCLOCERT_JOBS, CYCLOCERT_CACHE, CYCLOCERT_FORMAT.
  static RunConfig from_env();
};

// a^b-1 | a^b+1 | phi(l,x) | decimal, whitespace ignored.
mpz_class parse_expression(const std::string& text);
// "A..B" with A <= B.
std::pair<unsigned long, unsigned long> parse_range(const std::string& text);

using Json = nlohmann::json;

Json to_json(const Interval& v);
Json to_json(const QuadElement& v);
Json to_json(const QuadraticField& f);
Json to_json(const FactorizationResult& r);
Json to_json(const SolutionRecord& r);
Json to_json(const SearchResult& r);
Json to_json(const BoundReport& r);
Json to_json(const GapChain& g);
Json to_json(const CertificateReport& r);
Json to_json(const OPNBound& b);

// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const Json& j);

struct CommandOutput {
  int exit_code = kExitOk;
  Json report;
  std::vector<std::vector<std::string>> rows;  // tsv rendering
};

std::string render(const CommandOutput& out, OutputFormat format);

CommandOutput cmd_field(unsigned long ell, const RunConfig& cfg);
CommandOutput cmd_search(unsigned long ell, const mpz_class& x_min, const mpz_class& x_max,
                         const std::optional<std::pair<mpz_class, mpz_class>>& pq, const RunConfig& cfg);
CommandOutput cmd_certify(const std::vector<unsigned long>& ells, const RunConfig& cfg);
CommandOutput cmd_factor(const std::string& expression, const RunConfig& cfg);
CommandOutput cmd_bound(unsigned long ell, const mpz_class& p, const mpz_class& q, const RunConfig& cfg);
CommandOutput cmd_opn(unsigned long beta, const RunConfig& cfg);

// Full command line; writes the report to stdout and errors to stderr.
int run_cli(int argc, char** argv);

}  // namespace cyclocert
