#pragma once

#include <optional>
#include <vector>

#include "padlin/transform.hpp"

namespace padlin::normalize {

// Zero coefficients replaced by p^exponent.  Not an equivalence move: the
// certificate layer re-checks emitted witnesses against the raw input, which
// is sound because the systems agree mod p^exponent >= p^gamma.
struct Perturbation {
    long exponent = 0;
    std::vector<long> a_indices;
    std::vector<long> b_indices;
};

DiagLinSystem apply_perturbation(const DiagLinSystem& sys, const Int& p, const Perturbation& pert);

struct PreconditionResult {
    DiagLinSystem system;
    Transcript transcript; // from the (perturbed) input
    std::optional<Perturbation> perturbation;
};

// All coefficients nonzero (zeros perturbed to p^n) and the linear equation
// has unit content in p.  Throws InvalidInput when the linear form vanishes
// identically.
PreconditionResult precondition(const DiagLinSystem& sys, const PadicContext& ctx, long precision_hint = 12);

struct ConditioningReport {
    DiagLinSystem system;
    Transcript transcript; // from the preconditioned system
    long shift = 0;
    std::vector<long> upsilon_after;
    std::optional<long> perturbation_exponent;
};

// Reduces every nu_i below k and realizes the cyclic shift after which the
// prefix sums of upsilon dominate (j+1)s/k; re-clears the linear equation.
ConditioningReport condition(const DiagLinSystem& preconditioned, const PadicContext& ctx);

// Exact check of the coefficient-distribution inequality plus existence of a
// unit linear coefficient.
bool is_conditioned(const DiagLinSystem& sys, const PadicContext& ctx);

} // namespace padlin::normalize
