#ifndef BIH_ERRORS_HPP
#define BIH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bih {

/// Model functions violate the structural assumptions (U(1)=0, U'>0, G>0, ...).
struct ConstraintViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a model function.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A field contains NaN/Inf where finite values are required.
struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A monotone iterate left the [sub, super] bracket by more than the slack.
struct BracketViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Could not assemble an admissible sub/supersolution pair.
struct BracketAssemblyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MaxIterations : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The constant-c search schedule was exhausted without an admissible c.
struct SearchExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Successive regularization rungs differ by more than the rung tolerance.
struct LadderStall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 8*pi*G_N*N >= 1: the string existence hypothesis fails.
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bih

#endif
