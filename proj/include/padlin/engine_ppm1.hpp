#pragma once

#include "padlin/combinat.hpp"
#include "padlin/engine_common.hpp"

namespace padlin::ppm1 {

// Unit coefficients for the mod-p^2 pair: u degree coefficients c, the first
// t of which carry unit linear coefficients d.
struct ModP2Instance {
    std::vector<Int> c;
    std::vector<Int> d; // size t <= c.size(), all units
    PadicContext ctx;
};

struct ModP2Solution {
    std::vector<Int> x;
    long pivot_i = -1, pivot_j = -1;
};

// Non-singular solution of
//   sum c_i x_i^k == 0 mod p^2,  sum_{i<t} d_i x_i == 0 mod p
// for u >= p^2 + 2, k = p(p-1).
ModP2Solution solve_mod_p2(const ModP2Instance& inst);

// The p = 3 exceptional shape: nine unit sextic coefficients plus three
// unit-coefficient carry variables.  Solves
//   sum a_i x_i^6 + 3 sum c_j y_j^6 == 0 mod 9,
//   sum b_i x_i + sum d_j y_j == 0 mod 3
// with not all x_i divisible by 3.
struct P3Exceptional {
    std::vector<Int> x; // 9 values
    std::vector<Int> y; // 3 values
};
P3Exceptional solve_p3_exceptional(const std::vector<Int>& a, const std::vector<Int>& b,
                                   const std::vector<Int>& c, const std::vector<Int>& d);

EngineOutcome solve_typeA(const DiagLinSystem& sys, const PadicContext& ctx);
EngineOutcome solve_typeB(const DiagLinSystem& sys, const PadicContext& ctx);

// Dispatches on the system type; requires a conditioned system with
// k = p(p-1), p odd, s >= k^2 + 2.
EngineOutcome solve(const DiagLinSystem& sys, const PadicContext& ctx);

} // namespace padlin::ppm1
