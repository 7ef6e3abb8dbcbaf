#pragma once

#include <stdexcept>
#include <string>

namespace fairbroker {

// Precondition or invariant violated by a caller-supplied value.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// No non-bottlenecked supplier can take the request.
class UnsatisfiableError : public std::runtime_error {
 public:
  explicit UnsatisfiableError(const std::string& what) : std::runtime_error(what) {}
};

// Probability estimation attempted over an empty ledger.
class NoSamplesError : public std::runtime_error {
 public:
  explicit NoSamplesError(const std::string& what) : std::runtime_error(what) {}
};

// Every probe of an epoch was rejected by the broker.
class EpochAbortedError : public std::runtime_error {
 public:
  explicit EpochAbortedError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairbroker
