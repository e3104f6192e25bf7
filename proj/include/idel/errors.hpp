#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace idel {

/// Malformed textual input (concepts, formulas, documents). Carries the
/// byte offset of the offending token when one is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  explicit ParseError(const std::string& what)
      : std::runtime_error(what), position_(npos) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A conditional quantity whose conditioning event has zero mass.
class UndefinedConditional : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Enumeration larger than the configured cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Simplex failure (iteration cap, unbounded, infeasible).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lower bound on realization-plan entries makes the LP infeasible.
class InfeasibleEpsilon : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Requested computation has no supported construction.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace idel
