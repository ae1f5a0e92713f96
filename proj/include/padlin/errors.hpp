#pragma once

#include <stdexcept>
#include <string>

namespace padlin {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input (malformed system, k < 1, composite p where a prime is required).
struct InvalidInput : Error { using Error::Error; };

// A documented precondition of an operation does not hold.
struct PreconditionViolated : Error { using Error::Error; };

// A transform step is malformed (zero multiplier/scale) or does not produce
// integer coefficients.
struct InvalidTransform : Error { using Error::Error; };

// A bounded search ran out of its state budget.
struct BudgetExceeded : Error { using Error::Error; };

// "Cannot happen" per the underlying case analysis; a bug signal.
struct InternalError : Error { using Error::Error; };

// A contraction rule asserted a niveau/parity gain that the recomputed
// coefficients do not show; a bug signal.
struct RuleViolation : Error { using Error::Error; };

// The arithmetic context lacks the exponent tau (k is not p^tau * (p-1)).
struct ContextNotApplicable : Error { using Error::Error; };

// An engine was invoked outside its dispatch domain.
struct NotApplicable : Error { using Error::Error; };

} // namespace padlin
