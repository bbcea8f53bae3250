#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chaoswave {

// Precondition violated by the caller (bad shape, bad length, bad range).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Object used in a state that does not support the operation.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed file contents. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// A numerical recurrence left its admissible range (ODE blow-up, non-finite loss).
class NumericalDivergence : public std::runtime_error {
 public:
  NumericalDivergence(const std::string& what, std::uint64_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

}  // namespace chaoswave
