#pragma once

#include "padlin/engine_common.hpp"

namespace padlin::pow2 {

// A merged variable class: members are original indices forced equal; the
// class coefficients are the exact sums.  Niveau/parity are always views of
// c and d, never cached.
struct ContractionClass {
    std::vector<long> members;
    Int c, d;
    bool primary = false;
    bool alive = true;

    long niveau(const Int& p) const { return vp(c, p); }
    bool even() const { return divides(Int(2), d); }
};

struct ContractionState {
    DiagLinSystem sys;
    PadicContext ctx;
    std::vector<ContractionClass> classes;
    std::vector<long> zeroed; // original indices forced to 0 by drops
    unsigned long merges = 0;
};

ContractionState seed_state(const DiagLinSystem& sys, const PadicContext& ctx, long max_niveau,
                            const std::vector<long>& skip = {});

// Merge two classes (exact sums recomputed); returns the surviving id.
long merge(ContractionState& st, long id1, long id2);
// Zero out a class: its members go to the zeroed set.
void drop(ContractionState& st, long id);

// Executable contraction principles.  Each consumes classes from `ids` and
// returns the id of the produced primary even class, asserting the promised
// niveau on the exact coefficients (RuleViolation otherwise).
//
// 2^l classes, even, at niveau nu (secondaries exact), at least one primary.
long contract_even_same_niveau(ContractionState& st, std::vector<long> ids, long nu, long l);
// 2^(l+1) classes: primaries at niveau >= nu, even secondaries at exact
// niveaux nu..nu+l, at least 2^l primary.
long contract_even_spread(ContractionState& st, std::vector<long> ids, long nu, long l);
// 2^l + 2 classes at niveau nu (any secondary parity), at least two primary.
long contract_mixed_same_niveau(ContractionState& st, std::vector<long> ids, long nu, long l);
// 2^(l+1) + 2 classes: primaries at nu, secondaries at nu..nu+l-1, at least
// 2^l primary.
long contract_mixed_spread(ContractionState& st, std::vector<long> ids, long nu, long l);

// Full schedules.  Both produce a primary even class at niveau tau+2 and
// realize it as a witness.  `NeedsCycling` is reported for the k = 4 type-B
// corner where every niveau-3 variable is odd.
struct ScheduleResult {
    enum Status { Done, NeedsCycling } status = Done;
    EngineOutcome outcome;
};

ScheduleResult schedule(const DiagLinSystem& sys, const PadicContext& ctx);

// The k = 4 escape route: rotate the niveau blocks by the equivalence
// x -> (2x0, 2x1, 2x2, x3), A -> A/8, and contract the rotated system.
EngineOutcome cycling_solve(const DiagLinSystem& sys, const PadicContext& ctx);

// Engine entry: conditioned, p = 2, k in {4, 8, 16, 32}, s >= k^2 + 2.
EngineOutcome solve(const DiagLinSystem& sys, const PadicContext& ctx);

} // namespace padlin::pow2
