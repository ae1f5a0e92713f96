#pragma once

#include <optional>

#include "padlin/hensel.hpp"
#include "padlin/transform.hpp"

namespace padlin::contract_engine {

// Single diagonal equation sum c_l y_l^k = 0 obtained by eliminating the
// linear form.
struct DiagonalEquation {
    std::vector<Int> c;
    unsigned long k = 0;
    Int p;
};

// Pairs variables so the linear form vanishes identically on the image and
// sums the induced degree coefficients.  The transcript maps the diagonal
// variables back into the source system.
std::pair<DiagonalEquation, Transcript> contract_linear(const DiagLinSystem& sys, const PadicContext& ctx);

struct DiagonalOutcome {
    enum Status { ExactSolution, Lifted, Unresolved } status = Unresolved;
    std::vector<Rat> x;               // solution of the diagonal equation
    long unit_index = -1;             // Lifted: coordinate with valuation 0
    std::optional<hensel::PolyRootWitness> witness; // Lifted
    // Steps from the (b == 0) system of the input equation to the witness
    // system (valuation reduction and niveau rotations).
    std::vector<TransformStep> steps;
    std::string detail;
};

// The input equation as a homogeneous system with zero linear form.
DiagLinSystem diagonal_as_system(const DiagonalEquation& eq);

// Best-effort solver for one diagonal equation over Q_p: exact small-height
// shortcuts, then a complete residue-reachability search mod p^gamma' for a
// point with a Newton-liftable unit pivot.
DiagonalOutcome solve_diagonal(const DiagonalEquation& eq, long M, unsigned long budget);

enum class EngineTag { Pow2, Pm1, Ppm1, Contract };

struct Dispatch {
    EngineTag tag = EngineTag::Contract;
    bool odd_degree_out_of_scope = false;
    std::string coverage; // which contraction bound covers (k, p), when any
};

Dispatch dispatch_case(const PadicContext& ctx);

} // namespace padlin::contract_engine
