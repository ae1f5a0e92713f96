#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "padlin/context.hpp"

namespace padlin::combinat {

// Subset of indices (0-based) containing 0 whose entries sum to 0 mod q.
// Entries must be units mod q and there must be at least q of them.
// Constructive: sumset layers {0, c_j} with reachability back-pointers.
std::vector<long> zero_subset_sum(const std::vector<Int>& c, const Int& q);

// Subset (possibly empty for target 0) with sum congruent to target mod q.
// Entries must be units mod q; any target is reachable once the list has at
// least q-1 entries.  Returns nullopt when the target is unreachable.
std::optional<std::vector<long>> subset_sum_target(const std::vector<Int>& c, const Int& q, const Int& target);

struct FpSolution {
    enum Kind { Solved, AllEqual, NoSolution, CriticalShape } kind = NoSolution;
    // Solved: values (length of the input, plus one trailing slot when a free
    // linear slot was supplied) and a pivot index pair with unit Jacobian
    // minor for pair solves.
    std::vector<Int> values;
    std::optional<std::pair<long, long>> pivot;
    // CriticalShape: indices sorted so positions 0,1 carry the (a, -a) header
    // with nonzero linear coefficients and the tail is constant a'.
    std::vector<long> perm;
    Int crit_a, crit_aprime, crit_b1, crit_b2;
};

// Solves sum a_j x_j^k == 0 mod p over F_p for unit coefficients, where
// x^k collapses to an indicator (k a multiple of p-1, p odd).  With >= p
// entries a solution with x_0 = 1 always exists; with exactly p-1 entries
// failure certifies that all a_j are congruent.
FpSolution solve_unit_diagonal_mod_p(const std::vector<Int>& a, const PadicContext& ctx);

// Optional extra variable appearing only in the linear form, with unit
// coefficient c; its value is appended to FpSolution::values.
struct FreeSlot {
    Int c;
};

// Non-singular solutions of the pair sum a_j x_j^k == sum b_j x_j == 0 over
// F_p (p >= 5, a_j units).  With >= p+2 entries and some b_j nonzero this
// always solves; with exactly p+1 entries the only obstruction is the
// critical coefficient shape, which is returned explicitly.
FpSolution solve_unit_pair_mod_p(const std::vector<Int>& a, const std::vector<Int>& b,
                                 const PadicContext& ctx, std::optional<FreeSlot> slot = std::nullopt);

// Nonempty index set J with sum_{j in J} a_j == sum_{j in J} b_j == 0 mod 3.
// Guaranteed for length >= 5 (Davenport constant of (Z/3)^2).
std::vector<long> olson_zero_sum(const std::vector<std::pair<Int, Int>>& pairs);

struct NonzeroPair {
    long i = 0, j = 0;
    int count = 0;     // number of unordered pairs with unit sum
    bool exceptional = false; // exactly one such pair (a1 = a2 = -a3 shape)
};

// Among three units mod p (p >= 3) some pair has a_i + a_j != 0; reports one
// and whether the configuration is the single-pair exceptional case.
NonzeroPair pair_with_nonzero_sum(const std::array<Int, 3>& a, const Int& p);

} // namespace padlin::combinat
