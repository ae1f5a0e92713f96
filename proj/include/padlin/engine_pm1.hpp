#pragma once

#include "padlin/combinat.hpp"
#include "padlin/engine_common.hpp"

namespace padlin::pm1 {

// Fully normalized obstruction shape for k = p-1, in canonical variable
// order: positions 0,1 carry the header pair (p | a0+a1 != 0, b = (1,-1)),
// positions 2..k+1 the remaining niveau-0 variables (a == 1 mod p), and
// block j (1 <= j <= k-1) sits at positions jk+2..jk+k+1 with a == c_j p^j.
struct CriticalProfile {
    DiagLinSystem system;
    PadicContext ctx;
    long theta = 0;                // v_p(a0 + a1)
    std::vector<Int> block_class;  // c_j for j = 1..k-1 (index j-1)
};

// Positions of block j in the canonical layout (j = 0 gives the tail).
std::vector<long> profile_block(const PadicContext& ctx, long j);

// Header values x1, x2 and c' with a1 x1^k + a2 x2^k = p^l c' (c' == c mod p)
// and x1 - x2 = p^l d.  Requires p not dividing c d and 1 <= l < theta.
struct HeaderPair {
    Int x1, x2, cprime;
};
HeaderPair make_header_pair(const Int& a1, const Int& a2, const Int& c, const Int& d, long l,
                            const PadicContext& ctx);

// Standalone solvers for the two auxiliary shapes met by the critical-system
// analysis; both return a full solution vector of the assembled system
//   a1 x1^k + a2 x2^k + p^beta (c.y^k) [+ p^(beta+1) e z^k] = 0
//   x1 - x2 + p^beta (d.y) [+ p^beta f z] = 0
// with degree residual valuation >= M and the linear part exactly zero.
hensel::LiftedSolution solve_aux_b(const Int& a1, const Int& a2, const std::vector<Int>& c,
                                   const std::vector<Int>& d, const Int& e, const Int& f, long beta,
                                   const PadicContext& ctx, long M);
hensel::LiftedSolution solve_aux_bprime(const Int& a1, const Int& a2, const std::vector<Int>& c,
                                        const std::vector<Int>& d, long beta, const PadicContext& ctx, long M);

struct ReduceResult {
    bool solved = false;
    EngineOutcome outcome; // when solved (or exact shortcut)
    std::optional<CriticalProfile> profile;
    Transcript to_critical; // input -> canonical critical system
};

// The reduction ladder: level-0 shortcut, large-niveau-0 shortcut, block
// rotation, shape forcing, and header normalization.  Either solves the
// conditioned system outright or certifies the critical profile.
ReduceResult reduce_to_critical(const DiagLinSystem& sys, const PadicContext& ctx);

// Branch-instrumented solver for critical systems; `branch` on the outcome
// names which route fired.
EngineOutcome solve_critical(const CriticalProfile& profile, const Transcript& prefix);

// Full engine: conditioned system, k = p-1, p >= 5, s >= k^2 + 2.
EngineOutcome solve(const DiagLinSystem& sys, const PadicContext& ctx);

} // namespace padlin::pm1
