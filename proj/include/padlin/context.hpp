#pragma once

#include <optional>

#include "padlin/int_util.hpp"

namespace padlin {

// The arithmetic frame shared by all congruence work: a prime p, a degree k,
// and, when k = p^tau * (p-1), the exponent tau together with the congruence
// exponent gamma (tau+1 for odd p, tau+2 for p = 2).  d = gcd(k, p-1) and k0
// is the p-free, d-free part of k.
struct PadicContext {
    Int p;
    unsigned long k = 0;
    std::optional<long> tau;
    long gamma = 0; // meaningful iff tau is set
    Int d;
    Int k0;

    bool has_collapse() const { return tau.has_value(); }
    // p^gamma; requires tau.
    Int gamma_modulus() const;
};

PadicContext make_context(const Int& p, unsigned long k);

// x^k mod p^gamma.  Also certifies the unit-power collapse: the result is 1
// when p does not divide x and 0 otherwise.  Requires tau.
Int kth_power_residue(const Int& x, const PadicContext& ctx);

} // namespace padlin
