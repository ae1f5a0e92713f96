#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padlin/system.hpp"

namespace padlin::hensel {

// Finite certificate of solubility: residues mod p^gamma solving
//   A(x) == 0 mod p^gamma,  B(x) == 0 mod p,
// with a pivot pair (i, j) whose Jacobian minor
//   b_i a_j x_j^(k-1) - b_j a_i x_i^(k-1)
// is a unit mod p.
struct HenselWitness {
    DiagLinSystem system;
    PadicContext ctx;
    std::vector<Int> x;
    long pivot_i = -1;
    long pivot_j = -1;
};

struct CheckResult {
    bool ok = false;
    std::string failure; // names the first failed condition
};

CheckResult check_witness(const HenselWitness& w);

// Record of one two-variable lift: the eliminating polynomial, the refined
// root sequence, and the derivative valuation (equal to tau).
struct HenselTrace {
    std::vector<Int> phi;
    std::vector<Int> xi;  // xi_gamma, xi_{gamma+1}, ...
    long start_level = 0; // = gamma
    long deriv_val = 0;
    bool swapped = false; // roles of the two indices were exchanged
};

struct PairLift {
    Rat y1, y2; // y2 (pre-swap orientation restored) is a p-adic unit
    HenselTrace trace;
};

// Two-variable lift: from integers with
//   a1 x1^k + a2 x2^k == A mod p^gamma,  b1 x1 + b2 x2 = B (exactly),
// and unit minor b1 a2 x2^(k-1) - b2 a1 x1^(k-1), produces y1, y2 with
//   v_p(a1 y1^k + a2 y2^k - A) >= M and b1 y1 + b2 y2 = B exactly.
PairLift lift_pair(const Int& a1, const Int& a2, const Int& b1, const Int& b2, const Int& A, const Int& B,
                   const Int& x1, const Int& x2, const PadicContext& ctx, long M);

struct LiftedSolution {
    std::vector<Rat> x;
    long unit_index = -1; // coordinate certified to be a p-adic unit
};

// Freezes all coordinates of the witness except the pivot pair, performs the
// gcd normalization and linear correction, and lifts the pair.  The result
// satisfies v_p(A(x)) >= M with B(x) = 0 exactly, and x[unit_index] is a
// unit.
LiftedSolution solve_from_witness(const HenselWitness& w, long M);

// Newton iteration for one polynomial root: requires
// v_p(f(x0)) > 2 v_p(f'(x0)); returns x == x0 with v_p(f(x)) >= M,
// reduced mod p^M.
Int classic_hensel(const std::vector<Int>& f, const Int& x0, const Int& p, long M);

// Certificate for solutions assembled from one polynomial root: coordinates
// are frozen integers except var_x (value X) and optionally mirror
// (value X + offset).  The defining identities, checked by verifiers:
//   A(v(X)) == p^theta_scale * poly(X)   (as polynomials in X)
//   B(v(X)) == 0                         (identically)
// together with the Newton criterion v_p(poly(point)) > 2 v_p(poly'(point)).
struct PolyRootWitness {
    DiagLinSystem system;
    PadicContext ctx;
    std::vector<std::pair<long, Int>> frozen;
    long var_x = -1;
    std::optional<std::pair<long, Int>> mirror; // (index, offset)
    std::vector<Int> poly;
    long theta_scale = 0;
    Int point;
};

CheckResult check_poly_root_witness(const PolyRootWitness& w);

// Assembles the full solution vector of w.system at precision M (root refined
// by Newton, frozen coordinates exact).
LiftedSolution lift_poly_root(const PolyRootWitness& w, long M);

} // namespace padlin::hensel
