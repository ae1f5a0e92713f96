#include "padlin/normalize.hpp"

#include <algorithm>

namespace padlin::normalize {

DiagLinSystem apply_perturbation(const DiagLinSystem& sys, const Int& p, const Perturbation& pert) {
    DiagLinSystem out = sys;
    Int pn = pow_ui(p, (unsigned long)pert.exponent);
    for (long i : pert.a_indices) {
        if (out.a[i] != 0) throw InvalidInput("perturbation targets a nonzero degree coefficient");
        out.a[i] = pn;
    }
    for (long i : pert.b_indices) {
        if (out.b[i] != 0) throw InvalidInput("perturbation targets a nonzero linear coefficient");
        out.b[i] = pn;
    }
    return out;
}

PreconditionResult precondition(const DiagLinSystem& sys, const PadicContext& ctx, long precision_hint) {
    if (!sys.homogeneous()) throw InvalidInput("precondition expects a homogeneous system");
    bool all_b_zero = std::all_of(sys.b.begin(), sys.b.end(), [](const Int& x) { return x == 0; });
    if (all_b_zero) throw InvalidInput("linear form vanishes identically");

    PreconditionResult res;
    long s = sys.s();

    long max_nu = 0;
    bool any_zero = false;
    for (long i = 0; i < s; ++i) {
        if (sys.a[i] == 0 || sys.b[i] == 0) any_zero = true;
        long nu = vp(sys.a[i], ctx.p);
        if (nu < kValInf) max_nu = std::max(max_nu, nu);
    }

    DiagLinSystem cur = sys;
    if (any_zero) {
        Perturbation pert;
        long gamma_floor = ctx.tau ? ctx.gamma : (2 * vp(Int(ctx.k), ctx.p) + 1);
        pert.exponent = gamma_floor + (long)ctx.k * (2 + max_nu) + std::max(precision_hint, 0L);
        for (long i = 0; i < s; ++i) {
            if (sys.a[i] == 0) pert.a_indices.push_back(i);
            if (sys.b[i] == 0) pert.b_indices.push_back(i);
        }
        cur = apply_perturbation(sys, ctx.p, pert);
        res.perturbation = pert;
    }

    res.transcript.source = cur;

    // Cancel the p-content of the linear equation.
    long bmin = kValInf;
    for (long i = 0; i < s; ++i) bmin = std::min(bmin, vp(cur.b[i], ctx.p));
    if (bmin > 0) {
        TransformStep st = identity_step(s);
        st.scale_b = Rat(1) / Rat(pow_ui(ctx.p, (unsigned long)bmin));
        st.note = "cancel linear p-content";
        cur = apply_transform(cur, st, ctx.k);
        res.transcript.append(st);
    }
    res.system = cur;
    return res;
}

namespace {

// Smallest cyclic shift after which all prefix sums dominate (j+1)s/k.
long pick_shift(const std::vector<long>& ups, long s, unsigned long k) {
    for (long shift = 0; shift < (long)k; ++shift) {
        bool ok = true;
        long acc = 0;
        for (long j = 0; j < (long)k && ok; ++j) {
            acc += ups[(shift + j) % (long)k];
            if (acc * (long)k < (j + 1) * s) ok = false;
        }
        if (ok) return shift;
    }
    throw InternalError("no cyclic shift is conditioned");
}

} // namespace

ConditioningReport condition(const DiagLinSystem& sys, const PadicContext& ctx) {
    long s = sys.s();
    for (long i = 0; i < s; ++i)
        if (sys.a[i] == 0 || sys.b[i] == 0) throw PreconditionViolated("condition expects a preconditioned system");

    ConditioningReport rep;
    rep.transcript.source = sys;
    DiagLinSystem cur = sys;
    const Int& p = ctx.p;
    unsigned long k = ctx.k;

    // Reduce every nu_i below k via x_i -> p^(-alpha_i) x_i; the linear
    // equation is rescaled to stay integral.
    std::vector<long> alpha(s, 0);
    long amax = 0;
    for (long i = 0; i < s; ++i) {
        alpha[i] = vp(cur.a[i], p) / (long)k;
        amax = std::max(amax, alpha[i]);
    }
    if (amax > 0) {
        TransformStep st = identity_step(s);
        for (long i = 0; i < s; ++i)
            if (alpha[i] > 0) st.actions[i].mult = Rat(1) / Rat(pow_ui(p, (unsigned long)alpha[i]));
        st.scale_b = Rat(pow_ui(p, (unsigned long)amax));
        st.note = "reduce degree valuations below k";
        cur = apply_transform(cur, st, k);
        rep.transcript.append(st);
    }

    auto clear_b_content = [&]() {
        long bmin = kValInf;
        for (long i = 0; i < s; ++i) bmin = std::min(bmin, vp(cur.b[i], p));
        if (bmin > 0) {
            TransformStep st = identity_step(s);
            st.scale_b = Rat(1) / Rat(pow_ui(p, (unsigned long)bmin));
            st.note = "cancel linear p-content";
            cur = apply_transform(cur, st, k);
            rep.transcript.append(st);
        }
    };
    clear_b_content();

    SystemStats st0 = stats(cur, ctx);
    rep.shift = pick_shift(st0.upsilon, s, k);

    // Realize the shift: each round multiplies the current niveau-0 block by
    // p and divides the degree equation by p.
    for (long round = 0; round < rep.shift; ++round) {
        SystemStats stc = stats(cur, ctx);
        TransformStep st = identity_step(s);
        for (long i = 0; i < s; ++i)
            if (stc.nu[i] == 0) st.actions[i].mult = Rat(p);
        st.scale_a = Rat(1) / Rat(p);
        st.note = "cycle niveau blocks";
        cur = apply_transform(cur, st, k);
        rep.transcript.append(st);
    }
    clear_b_content();

    rep.system = cur;
    rep.upsilon_after = stats(cur, ctx).upsilon;
    if (!is_conditioned(cur, ctx)) throw InternalError("conditioning failed");
    return rep;
}

bool is_conditioned(const DiagLinSystem& sys, const PadicContext& ctx) {
    long s = sys.s();
    bool unit_b = false;
    for (long i = 0; i < s; ++i)
        if (!divides(ctx.p, sys.b[i])) unit_b = true;
    if (!unit_b) return false;
    for (long j = 1; j <= (long)ctx.k; ++j) {
        Int pj = pow_ui(ctx.p, (unsigned long)j);
        long cnt = 0;
        for (long i = 0; i < s; ++i)
            if (!divides(pj, sys.a[i])) cnt += 1;
        if (cnt * (long)ctx.k < j * s) return false;
    }
    return true;
}

} // namespace padlin::normalize
