#include "padlin/int_util.hpp"

namespace padlin {

long vp(const Int& n, const Int& p) {
    if (n == 0) return kValInf;
    Int r;
    return (long)mpz_remove(r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
}

Int unit_part(const Int& n, const Int& p) {
    if (n == 0) throw InvalidInput("unit_part of zero");
    Int r;
    mpz_remove(r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    return r;
}

long vp_rat(const Rat& r, const Int& p) {
    if (r == 0) return kValInf;
    return vp(r.get_num(), p) - vp(r.get_den(), p);
}

Int pow_ui(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Rat pow_rat_ui(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(base.get_mpq_t()), e);
    mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(base.get_mpq_t()), e);
    r.canonicalize();
    return r;
}

Int mod_pos(const Int& a, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int modpow(const Int& base, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int invmod(const Int& a, const Int& m) {
    Int r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
        throw InvalidInput("invmod: not invertible");
    return r;
}

Int divexact(const Int& n, const Int& d) {
    if (d == 0 || !divides(d, n)) throw InternalError("divexact: not divisible");
    Int r;
    mpz_divexact(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return r;
}

bool is_probable_prime(const Int& p) {
    return mpz_probab_prime_p(p.get_mpz_t(), 30) != 0;
}

Int poly_eval(const std::vector<Int>& coeffs, const Int& x) {
    Int acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<Int> poly_derivative(const std::vector<Int>& coeffs) {
    std::vector<Int> d;
    for (size_t i = 1; i < coeffs.size(); ++i) d.push_back(Int((long)i) * coeffs[i]);
    if (d.empty()) d.push_back(0);
    return d;
}

} // namespace padlin
