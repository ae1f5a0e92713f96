#include "padlin/context.hpp"

namespace padlin {

Int PadicContext::gamma_modulus() const {
    if (!tau) throw ContextNotApplicable("gamma undefined: k is not p^tau*(p-1)");
    return pow_ui(p, (unsigned long)gamma);
}

PadicContext make_context(const Int& p, unsigned long k) {
    if (p < 2 || !is_probable_prime(p)) throw InvalidInput("p must be prime");
    if (k < 1) throw InvalidInput("k must be positive");
    PadicContext ctx;
    ctx.p = p;
    ctx.k = k;

    Int kz((unsigned long)k);
    Int pm1 = p - 1;
    mpz_gcd(ctx.d.get_mpz_t(), kz.get_mpz_t(), pm1.get_mpz_t());

    // tau exists iff k / (p-1) is a power of p.
    if (divides(pm1, kz)) {
        Int q = divexact(kz, pm1);
        long t = vp(q, p);
        if (t < kValInf && pow_ui(p, (unsigned long)t) == q) {
            ctx.tau = t;
            ctx.gamma = (p == 2) ? t + 2 : t + 1;
        }
    }

    long vk = vp(kz, p);
    ctx.k0 = divexact(kz, pow_ui(p, (unsigned long)vk) * ctx.d);
    return ctx;
}

Int kth_power_residue(const Int& x, const PadicContext& ctx) {
    if (!ctx.tau) throw ContextNotApplicable("kth_power_residue needs k = p^tau*(p-1)");
    Int m = ctx.gamma_modulus();
    Int r = modpow(mod_pos(x, m), Int(ctx.k), m);
    // Collapse law: for k = p^tau*(p-1) the group of units mod p^gamma has
    // exponent dividing k, and k >= gamma kills multiples of p.
    Int expected = divides(ctx.p, x) ? Int(0) : Int(1);
    if (r != expected) throw InternalError("unit-power collapse failed");
    return r;
}

} // namespace padlin
