#pragma once

#include "padlin/certificate.hpp"
#include "padlin/engine_contract.hpp"

namespace padlin::driver {

struct SolveOptions {
    long precision = 10;            // demo precision M
    unsigned long budget = 10000000;
    std::string engine = "auto";    // auto | contract | pm1 | ppm1 | pow2
};

// Full pipeline: trivial shortcuts, precondition, condition, dispatch,
// engine, certificate assembly, and internal verification.
Certificate solve(const DiagLinSystem& sys, const Int& p, unsigned long k, const SolveOptions& opts = {});

// Re-checks a certificate against the original input (see
// verify_certificate); total, never throws.
VerifyResult verify(const Certificate& cert, const DiagLinSystem& original, long M = 10);

// Builds the k^2+1-variable sharpness example for k = p-1 (p >= 5) and
// produces its verified insolubility descent; also runs solve on it and
// asserts no solution-kind certificate comes back.
Certificate verify_counterexample(const Int& p, const SolveOptions& opts = {});

// The sharpness system itself: blocks of p-power coefficients plus one
// linear coupling.
DiagLinSystem counterexample_system(const Int& p);

} // namespace padlin::driver
