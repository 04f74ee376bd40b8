#pragma once

#include <stdexcept>
#include <string>

namespace chns {

/// Invalid or inconsistent user configuration (bad keys, out-of-range depth, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (size mismatch, bad level jump).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A data structure invariant does not hold (e.g. unbalanced tree handed to the node table).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A linear or nonlinear solve failed to converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::string block, const std::string& what)
      : std::runtime_error(block + ": " + what), block_(std::move(block)) {}

  const std::string& block() const noexcept { return block_; }

 private:
  std::string block_;
};

/// File-system failure; the message carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CHNS_REQUIRE(cond, ExcType, msg) \
  do {                                   \
    if (!(cond)) throw ExcType(msg);     \
  } while (false)

}  // namespace chns
