#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace farkas_balance {

/** Base class of every error thrown by this library. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/** Two values living on different Z_p were combined. */
class ModulusMismatch : public Error {
 public:
  using Error::Error;
};

/** A distinguished place was congruent to 0 mod p. */
class ZeroPlace : public Error {
 public:
  using Error::Error;
};

/** A function value left its required range (e.g. g outside [0,1]). */
class RangeViolation : public Error {
 public:
  using Error::Error;
};

/** A real inverse transform was demanded but conjugate symmetry fails. */
class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/** Column deletions exhausted the matrix before the budget was spent. */
class EmptyMatrix : public Error {
 public:
  using Error::Error;
};

/** Two collected coefficient vectors touch the same column. */
class DisjointnessViolation : public Error {
 public:
  using Error::Error;
};

/** Neither hull membership nor strict separation is certifiable at the
 *  configured tolerances. */
class NumericalAmbiguity : public Error {
 public:
  using Error::Error;
};

/** The separation program's optimum is not strictly positive. */
class NoStrictSeparation : public Error {
 public:
  using Error::Error;
};

/** Caratheodory reduction left a residual beyond its guaranteed bound. */
class ResidualBlowup : public Error {
 public:
  using Error::Error;
};

/** A candidate minorant violates the required sign pattern. */
class SignPatternViolation : public Error {
 public:
  using Error::Error;
};

/** Instance exceeds a size guard (dense oracle only). */
class TooLarge : public Error {
 public:
  using Error::Error;
};

/** Instance file failed schema validation; one message per violation. */
class InstanceValidationError : public Error {
 public:
  explicit InstanceValidationError(std::vector<std::string> violations)
      : Error(violations.empty() ? std::string("invalid instance")
                                 : violations.front() +
                                       (violations.size() > 1 ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                                              : std::string())),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace farkas_balance
