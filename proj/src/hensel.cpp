#include "padlin/hensel.hpp"

#include <algorithm>

namespace padlin::hensel {

namespace {

Int witness_minor(const DiagLinSystem& sys, const std::vector<Int>& x, long i, long j, unsigned long k) {
    return sys.b[i] * sys.a[j] * pow_ui(x[j], k - 1) - sys.b[j] * sys.a[i] * pow_ui(x[i], k - 1);
}

// Binomial expansion of a1*(B - b2 t)^k + a2*b1^k*t^k - A*b1^k.
std::vector<Int> build_phi(const Int& a1, const Int& a2, const Int& b1, const Int& b2, const Int& A,
                           const Int& B, unsigned long k) {
    std::vector<Int> phi(k + 1, Int(0));
    Int binom = 1;
    for (unsigned long j = 0; j <= k; ++j) {
        // coefficient of t^j in (B - b2 t)^k
        phi[j] += a1 * binom * pow_ui(B, k - j) * pow_ui(-b2, j);
        binom = binom * Int((unsigned long)(k - j)) / Int((unsigned long)(j + 1));
    }
    phi[k] += a2 * pow_ui(b1, k);
    phi[0] -= A * pow_ui(b1, k);
    return phi;
}

} // namespace

CheckResult check_witness(const HenselWitness& w) {
    CheckResult res;
    const PadicContext& ctx = w.ctx;
    if (!ctx.tau) {
        res.failure = "context has no gamma";
        return res;
    }
    if ((long)w.x.size() != w.system.s()) {
        res.failure = "dimension mismatch";
        return res;
    }
    if (w.pivot_i < 0 || w.pivot_j < 0 || w.pivot_i >= w.system.s() || w.pivot_j >= w.system.s() ||
        w.pivot_i == w.pivot_j) {
        res.failure = "bad pivot indices";
        return res;
    }
    Int pg = ctx.gamma_modulus();
    if (mod_pos(eval_a(w.system, w.x, ctx.k), pg) != 0) {
        res.failure = "degree congruence (mod p^gamma) failed";
        return res;
    }
    if (mod_pos(eval_b(w.system, w.x), ctx.p) != 0) {
        res.failure = "linear congruence (mod p) failed";
        return res;
    }
    if (divides(ctx.p, witness_minor(w.system, w.x, w.pivot_i, w.pivot_j, ctx.k))) {
        res.failure = "pivot minor vanishes mod p";
        return res;
    }
    res.ok = true;
    return res;
}

PairLift lift_pair(const Int& a1_in, const Int& a2_in, const Int& b1_in, const Int& b2_in, const Int& A_in,
                   const Int& B_in, const Int& x1_in, const Int& x2_in, const PadicContext& ctx, long M) {
    if (!ctx.tau) throw ContextNotApplicable("lift_pair needs k = p^tau*(p-1)");
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    long tau = *ctx.tau;
    Int pg = ctx.gamma_modulus();

    if (mod_pos(a1_in * pow_ui(x1_in, k) + a2_in * pow_ui(x2_in, k) - A_in, pg) != 0)
        throw PreconditionViolated("lift_pair: degree congruence fails");
    if (b1_in * x1_in + b2_in * x2_in != B_in) throw PreconditionViolated("lift_pair: linear equation not exact");
    Int minor = b1_in * a2_in * pow_ui(x2_in, k - 1) - b2_in * a1_in * pow_ui(x1_in, k - 1);
    if (divides(p, minor)) throw PreconditionViolated("lift_pair: pivot minor vanishes");

    // Arrange p not dividing b1 * a2 * x2 by swapping the two slots if needed.
    bool swapped = false;
    Int a1 = a1_in, a2 = a2_in, b1 = b1_in, b2 = b2_in, x1 = x1_in, x2 = x2_in;
    if (divides(p, b1 * a2 * x2)) {
        std::swap(a1, a2);
        std::swap(b1, b2);
        std::swap(x1, x2);
        swapped = true;
        if (divides(p, b1 * a2 * x2)) throw InternalError("unit minor but both orientations degenerate");
    }

    HenselTrace trace;
    trace.swapped = swapped;
    trace.start_level = ctx.gamma;
    trace.phi = build_phi(a1, a2, b1, b2, A_in, B_in, k);
    std::vector<Int> dphi = poly_derivative(trace.phi);

    Int xi = mod_pos(x2, pg);
    if (vp(poly_eval(trace.phi, xi), p) < ctx.gamma) throw InternalError("phi(x2) not divisible by p^gamma");
    long dval = vp(poly_eval(dphi, xi), p);
    if (dval != tau) throw InternalError("phi'(x2) valuation differs from tau");
    trace.deriv_val = dval;
    trace.xi.push_back(xi);

    long target = M + tau; // one refined root per level gamma..target
    Int pl = pg;
    for (long l = ctx.gamma; l < target; ++l) {
        // xi_{l+1} = xi_l + p^(l-tau) h with h the unique residue killing the
        // next digit of phi.
        Int phival = poly_eval(trace.phi, xi);
        Int u = divexact(phival, pl);
        Int dunit = divexact(poly_eval(dphi, xi), pow_ui(p, (unsigned long)tau));
        Int h = mod_pos(-u * invmod(mod_pos(dunit, p), p), p);
        xi += pow_ui(p, (unsigned long)(l - tau)) * h;
        pl *= p;
        xi = mod_pos(xi, pl * pow_ui(p, (unsigned long)tau));
        if (vp(poly_eval(trace.phi, xi), p) < l + 1) throw InternalError("lift level failed");
        trace.xi.push_back(xi);
    }

    PairLift out;
    out.trace = trace;
    Rat y2(xi);
    Rat y1 = (Rat(B_in) - Rat(b2) * y2) / Rat(b1);
    if (swapped) std::swap(y1, y2);
    out.y1 = y1;
    out.y2 = y2;

    // Residual checks on the exact rationals.
    Rat resid = Rat(a1_in) * pow_rat_ui(out.y1, k) + Rat(a2_in) * pow_rat_ui(out.y2, k) - Rat(A_in);
    if (resid != 0 && vp_rat(resid, p) < M) throw InternalError("lift_pair: residual too small");
    if (Rat(b1_in) * out.y1 + Rat(b2_in) * out.y2 != Rat(B_in)) throw InternalError("lift_pair: linear broke");
    return out;
}

LiftedSolution solve_from_witness(const HenselWitness& w, long M) {
    CheckResult chk = check_witness(w);
    if (!chk.ok) throw PreconditionViolated("solve_from_witness: " + chk.failure);
    const PadicContext& ctx = w.ctx;
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    long s = w.system.s();

    long i = w.pivot_i, j = w.pivot_j;
    // Arrange p not dividing b_i * a_j * x_j (the minor guarantees one
    // orientation works).
    if (divides(p, w.system.b[i] * w.system.a[j] * w.x[j])) std::swap(i, j);
    if (divides(p, w.system.b[i] * w.system.a[j] * w.x[j]))
        throw InternalError("witness pivot degenerate in both orientations");

    // Constants seen by the pair after freezing the tail.
    Int A = -w.system.const_a, B = -w.system.const_b;
    for (long l = 0; l < s; ++l) {
        if (l == i || l == j) continue;
        A -= w.system.a[l] * pow_ui(w.x[l], k);
        B -= w.system.b[l] * w.x[l];
    }

    Int a1 = w.system.a[i], a2 = w.system.a[j], b1 = w.system.b[i], b2 = w.system.b[j];
    Int x1 = w.x[i], x2 = w.x[j];

    // gcd normalization: q = (b1; b2) is prime to p.
    Int q;
    mpz_gcd(q.get_mpz_t(), b1.get_mpz_t(), b2.get_mpz_t());
    if (q == 0) throw InternalError("both pivot linear coefficients vanish");
    Int bp1 = divexact(b1, q), bp2 = divexact(b2, q);
    Int z1 = q * x1, z2 = q * x2;
    Int Aq = A * pow_ui(q, k);

    // Correction to make the linear equation exact: w_t = z_t + p u_t.
    Int lin = bp1 * z1 + bp2 * z2 - B;
    if (!divides(p, lin)) throw InternalError("linear congruence failed after gcd normalization");
    Int c = divexact(-lin, p);
    Int g, u1, u2;
    mpz_gcdext(g.get_mpz_t(), u1.get_mpz_t(), u2.get_mpz_t(), bp1.get_mpz_t(), bp2.get_mpz_t());
    if (g != 1 && g != -1) throw InternalError("reduced linear coefficients not coprime");
    u1 = u1 * c / g;
    u2 = u2 * c / g;
    Int w1 = z1 + p * u1, w2 = z2 + p * u2;
    if (bp1 * w1 + bp2 * w2 != B) throw InternalError("linear correction failed");

    // The correction must not disturb the degree congruence mod p^gamma.
    Int pg = ctx.gamma_modulus();
    if (mod_pos(pow_ui(w1, k) - pow_ui(z1, k), pg) != 0 || mod_pos(pow_ui(w2, k) - pow_ui(z2, k), pg) != 0)
        throw InternalError("k-th powers moved mod p^gamma under the linear correction");

    PairLift lift = lift_pair(a1, a2, bp1, bp2, Aq, B, w1, w2, ctx, M + (long)k * vp(q, p) + 1);

    LiftedSolution out;
    out.x.resize(s);
    for (long l = 0; l < s; ++l) out.x[l] = Rat(w.x[l]);
    out.x[i] = lift.y1 / Rat(q);
    out.x[j] = lift.y2 / Rat(q);
    // y2 is a unit and q is prime to p.
    out.unit_index = j;
    if (vp_rat(out.x[j], p) != 0) throw InternalError("lifted coordinate is not a unit");

    Rat ra = eval_a_rat(w.system, out.x, k);
    Rat rb = eval_b_rat(w.system, out.x);
    if (ra != 0 && vp_rat(ra, p) < M) throw InternalError("lifted solution: degree residual too small");
    if (rb != 0) throw InternalError("lifted solution: linear not exact");
    return out;
}

Int classic_hensel(const std::vector<Int>& f, const Int& x0, const Int& p, long M) {
    if (M < 1) throw InvalidInput("precision must be >= 1");
    std::vector<Int> df = poly_derivative(f);
    long e = vp(poly_eval(df, x0), p);
    long v0 = vp(poly_eval(f, x0), p);
    if (e >= kValInf || v0 <= 2 * e) throw PreconditionViolated("classic_hensel: v(f) > 2 v(f') required");

    long W = M + 2 * e + 2;
    Int pW = pow_ui(p, (unsigned long)W);
    Int x = mod_pos(x0, pW);
    long prev = v0;
    for (int iter = 0; iter < 200; ++iter) {
        Int fx = poly_eval(f, x);
        long v = vp(fx, p);
        if (v >= W || v >= M + e) break;
        // Newton step: x -= f(x) / f'(x), computed exactly in Z_p.
        Int dfx = poly_eval(df, x);
        if (vp(dfx, p) != e) throw InternalError("derivative valuation drifted");
        Int dunit = divexact(dfx, pow_ui(p, (unsigned long)e));
        Int num = divexact(fx, pow_ui(p, (unsigned long)e));
        Int delta = mod_pos(num * invmod(mod_pos(dunit, pW), pW), pW);
        x = mod_pos(x - delta, pW);
        long vn = vp(poly_eval(f, x), p);
        if (vn < std::min((long)W, 2 * (v - e)))
            throw InternalError("classic_hensel: residual did not double");
        prev = vn;
        (void)prev;
    }
    if (vp(poly_eval(f, x), p) < std::min(W, M)) throw InternalError("classic_hensel did not converge");
    return mod_pos(x, pow_ui(p, (unsigned long)M));
}

CheckResult check_poly_root_witness(const PolyRootWitness& w) {
    CheckResult res;
    const DiagLinSystem& sys = w.system;
    const Int& p = w.ctx.p;
    unsigned long k = w.ctx.k;
    long s = sys.s();
    if (w.var_x < 0 || w.var_x >= s) {
        res.failure = "bad root variable index";
        return res;
    }

    // Coordinate polynomials in X: frozen values are constants, var_x is X,
    // mirror is X + offset.
    std::vector<bool> used(s, false);
    used[w.var_x] = true;
    if (w.mirror) {
        if (w.mirror->first < 0 || w.mirror->first >= s || w.mirror->first == w.var_x) {
            res.failure = "bad mirror index";
            return res;
        }
        used[w.mirror->first] = true;
    }
    std::vector<Int> frozen_vals(s, Int(0));
    for (auto& [idx, val] : w.frozen) {
        if (idx < 0 || idx >= s || used[idx]) {
            res.failure = "bad frozen index";
            return res;
        }
        used[idx] = true;
        frozen_vals[idx] = val;
    }

    // A(v(X)) as a polynomial in X.
    std::vector<Int> apoly(k + 1, Int(0));
    apoly[0] = sys.const_a;
    Int blin = 0, bconst = sys.const_b;
    for (long i = 0; i < s; ++i) {
        if (i == w.var_x) {
            apoly[k] += sys.a[i];
            blin += sys.b[i];
        } else if (w.mirror && i == w.mirror->first) {
            const Int& h = w.mirror->second;
            Int binom = 1;
            for (unsigned long j = 0; j <= k; ++j) {
                apoly[k - j] += sys.a[i] * binom * pow_ui(h, j); // coeff of X^(k-j)
                binom = binom * Int((unsigned long)(k - j)) / Int((unsigned long)(j + 1));
            }
            blin += sys.b[i];
            bconst += sys.b[i] * h;
        } else {
            apoly[0] += sys.a[i] * pow_ui(frozen_vals[i], k);
            bconst += sys.b[i] * frozen_vals[i];
        }
    }
    if (blin != 0 || bconst != 0) {
        res.failure = "linear form does not vanish identically";
        return res;
    }
    Int scale = pow_ui(p, (unsigned long)w.theta_scale);
    if (w.poly.size() != apoly.size()) {
        res.failure = "polynomial degree mismatch";
        return res;
    }
    for (size_t j = 0; j < apoly.size(); ++j)
        if (apoly[j] != scale * w.poly[j]) {
            res.failure = "degree form does not match p^theta * poly";
            return res;
        }
    std::vector<Int> dpoly = poly_derivative(w.poly);
    long e = vp(poly_eval(dpoly, w.point), p);
    long v = vp(poly_eval(w.poly, w.point), p);
    if (e >= kValInf || v <= 2 * e) {
        res.failure = "Newton criterion fails at the recorded point";
        return res;
    }
    res.ok = true;
    return res;
}

LiftedSolution lift_poly_root(const PolyRootWitness& w, long M) {
    CheckResult chk = check_poly_root_witness(w);
    if (!chk.ok) throw PreconditionViolated("lift_poly_root: " + chk.failure);
    const Int& p = w.ctx.p;
    Int root = classic_hensel(w.poly, w.point, p, M + w.theta_scale + 1);

    LiftedSolution out;
    out.x.assign(w.system.s(), Rat(0));
    for (auto& [idx, val] : w.frozen) out.x[idx] = Rat(val);
    out.x[w.var_x] = Rat(root);
    if (w.mirror) out.x[w.mirror->first] = Rat(root + w.mirror->second);
    out.unit_index = -1;
    for (long i = 0; i < w.system.s(); ++i)
        if (out.x[i] != 0 && vp_rat(out.x[i], p) == 0) {
            out.unit_index = i;
            break;
        }
    if (out.unit_index < 0) throw InternalError("poly-root solution has no unit coordinate");

    Rat ra = eval_a_rat(w.system, out.x, w.ctx.k);
    if (ra != 0 && vp_rat(ra, p) < M) throw InternalError("poly-root lift: degree residual too small");
    Rat rb = eval_b_rat(w.system, out.x);
    if (rb != 0) throw InternalError("poly-root lift: linear not exactly zero");
    return out;
}

} // namespace padlin::hensel
