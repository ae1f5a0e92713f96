#pragma once

#include <gmpxx.h>
#include <limits>
#include <vector>

#include "padlin/errors.hpp"

namespace padlin {

using Int = mpz_class;
using Rat = mpq_class;

// Valuations are longs with an infinity sentinel (v_p(0) = oo).  The sentinel
// is far below overflow range so that sums like val + k stay representable.
inline constexpr long kValInf = std::numeric_limits<long>::max() / 4;

// Exact exponent e with p^e || n; kValInf for n = 0.
long vp(const Int& n, const Int& p);

// n / p^vp(n) for n != 0.
Int unit_part(const Int& n, const Int& p);

// v_p of a rational (num minus den valuation); kValInf for 0.
long vp_rat(const Rat& r, const Int& p);

Int pow_ui(const Int& base, unsigned long e);
Rat pow_rat_ui(const Rat& base, unsigned long e);

// Least non-negative residue.
Int mod_pos(const Int& a, const Int& m);

Int modpow(const Int& base, const Int& e, const Int& m);

// Inverse mod m; throws InvalidInput when gcd(a, m) != 1.
Int invmod(const Int& a, const Int& m);

inline bool divides(const Int& d, const Int& n) { return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0; }

// Exact division; throws InternalError when not divisible.
Int divexact(const Int& n, const Int& d);

bool is_probable_prime(const Int& p);

// Evaluates sum_i coeffs[i] * x^i exactly.
Int poly_eval(const std::vector<Int>& coeffs, const Int& x);
std::vector<Int> poly_derivative(const std::vector<Int>& coeffs);

} // namespace padlin
