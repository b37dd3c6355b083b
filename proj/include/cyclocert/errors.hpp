#pragma once

#include <stdexcept>
#include <string>

namespace cyclocert {

// Base of every error raised by the library; `kind()` is the stable name used in
// CLI output and JSON reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct NotPrime : Error {
  explicit NotPrime(const std::string& w) : Error("NotPrime", w) {}
};

struct BelowRange : Error {
  explicit BelowRange(const std::string& w) : Error("BelowRange", w) {}
};

struct NonSplitPrime : Error {
  explicit NonSplitPrime(const std::string& w) : Error("NonSplitPrime", w) {}
};

struct NoIntegerRepresentation : Error {
  explicit NoIntegerRepresentation(const std::string& w) : Error("NoIntegerRepresentation", w) {}
};

struct InvalidInstance : Error {
  explicit InvalidInstance(const std::string& w) : Error("InvalidInstance", w) {}
};

struct DomainTooSmall : Error {
  explicit DomainTooSmall(const std::string& w) : Error("DomainTooSmall", w) {}
};

// Internal consistency failure; signals a bug rather than bad input.
struct ConstructionFailure : Error {
  explicit ConstructionFailure(const std::string& w) : Error("ConstructionFailure", w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error("ParseError", w) {}
};

}  // namespace cyclocert
