#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgi {

// Mismatched vector lengths or tensor shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Out-of-range scalar argument (negative epsilon, delta outside (0,1), ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The weighted-best group is not unique.
class NonUniqueOptimumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampling ran out of attempts.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A named state invariant did not hold.
class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(std::string name, const std::string& detail)
      : std::logic_error(name + ": " + detail), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// An algorithm hit its round limit. Carries the state reached so far.
class BudgetExhaustedError : public std::runtime_error {
 public:
  struct PartialState {
    std::uint64_t total_pulls = 0;
    std::uint64_t rounds = 0;
    std::vector<std::size_t> active_groups;
    std::vector<std::size_t> accepted_groups;
  };

  BudgetExhaustedError(const std::string& what, PartialState state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const PartialState& state() const noexcept { return state_; }

 private:
  PartialState state_;
};

// Short machine-readable name for an exception thrown by this library.
std::string error_kind(const std::exception& e);

}  // namespace bgi
