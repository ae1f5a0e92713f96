#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "padlin/system.hpp"

namespace padlin::oracle {

struct CongruenceQuery {
    DiagLinSystem sys;
    PadicContext ctx;
    long modulus_exponent = 1;       // gamma' for the degree congruence
    unsigned long budget = 10000000; // maximum enumeration states
};

struct OracleReport {
    bool found = false;
    std::optional<std::vector<Int>> witness; // residues in [0, p^gamma')
    std::optional<std::pair<long, long>> nonsingular_pivot;
    bool exhausted = false; // query fully decided (found, or full space covered)
    unsigned long states = 0;
};

// Decides existence of a non-singular solution of
//   A(x) == 0 mod p^gamma',  B(x) == 0 mod p.
// When k = p^tau(p-1) and gamma' <= gamma, x^k collapses to a support
// indicator mod p^gamma', so the scan runs over 2^s supports with an exact
// per-support satisfiability analysis.  Otherwise falls back to full value
// enumeration (budget permitting).
OracleReport find_nonsingular(const CongruenceQuery& query);

// Plain full enumeration over [0, p^gamma')^s; requires the value space to
// fit in the budget.  Test-support ground truth for the support scan.
bool find_nonsingular_naive(const CongruenceQuery& query);

struct OracleSolution {
    std::vector<long> support;
    std::vector<Int> values; // lex-least representative
};

// Every solution of the congruence pair up to unit-collapse equivalence, in
// deterministic order (supports by increasing bitmask, lex-least values).
std::vector<OracleSolution> enumerate_solutions(const CongruenceQuery& query);

struct GammaStarReport {
    long value = 0;      // gamma*(k, p^l), or the best lower bound when truncated
    bool exhausted = false;
    std::vector<Int> hardest_tuple; // an insoluble tuple at value-1 (when known)
    unsigned long states = 0;
};

// Smallest t such that every tuple of t units mod p^l gives
// c_1 x_1^k + ... + c_t x_t^k == 0 mod p^l a solution with some unit x_i.
// Exact double enumeration: coefficient tuples up to unit scaling and k-th
// power cosets, solution space via reachability over residues.
GammaStarReport gamma_star_bruteforce(unsigned long k, const Int& p, unsigned long l,
                                      unsigned long budget = 50000000);

} // namespace padlin::oracle
