#include "padlin/engine_pm1.hpp"

#include <algorithm>

#include "padlin/normalize.hpp"

namespace padlin::pm1 {

namespace {

Int minor_of(const DiagLinSystem& sys, const std::vector<Int>& x, long i, long j, unsigned long k) {
    return sys.b[i] * sys.a[j] * pow_ui(x[j], k - 1) - sys.b[j] * sys.a[i] * pow_ui(x[i], k - 1);
}

hensel::HenselWitness checked_witness(const DiagLinSystem& sys, const PadicContext& ctx, std::vector<Int> x,
                                      long pi, long pj) {
    hensel::HenselWitness w;
    w.system = sys;
    w.ctx = ctx;
    Int pg = ctx.gamma_modulus();
    for (auto& v : x) v = mod_pos(v, pg);
    w.x = std::move(x);
    w.pivot_i = pi;
    w.pivot_j = pj;
    auto chk = hensel::check_witness(w);
    if (!chk.ok) throw InternalError("bad witness in k=p-1 engine: " + chk.failure);
    return w;
}

// Witness + the single transform step (from a base system) that reaches the
// witness's affine system.
struct AffineBranch {
    TransformStep step;
    hensel::HenselWitness witness;
};

// Carry-block route: base system restricted to header, one all-high block at
// exact A-level beta, and one low carry variable z at level beta
// (a_z = p^(beta+1) e, b_z = p^beta f with f a unit).
AffineBranch branch_carry_block(const DiagLinSystem& S, const PadicContext& ctx, const std::vector<long>& block,
                                long zpos, long beta, long theta) {
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    if (beta < 1 || beta >= theta) throw PreconditionViolated("carry-block route needs 1 <= beta < theta");
    Int pb = pow_ui(p, (unsigned long)beta);

    std::vector<Int> c, d;
    for (long pos : block) {
        c.push_back(divexact(S.a[pos], pb));
        d.push_back(divexact(S.b[pos], pb));
    }
    Int e = divexact(S.a[zpos], pb * p);
    Int f = divexact(S.b[zpos], pb);
    if (divides(p, c[0]) || divides(p, f)) throw PreconditionViolated("carry-block route: c1 or f not a unit");
    for (size_t i = 1; i < c.size(); ++i)
        if (mod_pos(c[i] - c[0], p) != 0) throw PreconditionViolated("block classes differ");

    HeaderPair hp = make_header_pair(S.a[0], S.a[1], -Int(k) * c[0], Int(1), beta, ctx);

    TransformStep st;
    st.actions.resize(S.s());
    st.new_size = (long)block.size() + 1;
    st.actions[0] = {VarAction::Freeze, -1, Rat(1), Rat(hp.x1)};
    st.actions[1] = {VarAction::Freeze, -1, Rat(1), Rat(hp.x2)};
    for (long t = 0; t < (long)block.size(); ++t) st.actions[block[t]] = {VarAction::Map, t, Rat(1), Rat(0)};
    st.actions[zpos] = {VarAction::Map, (long)block.size(), Rat(1), Rat(0)};
    st.scale_a = Rat(1) / Rat(pb);
    st.scale_b = Rat(1) / Rat(pb);
    st.note = "carry-block reduction";

    DiagLinSystem D = apply_transform(S, st, k);
    // D: a = (c_1..c_k, p e), b = (d_1..d_k, f), const = (c', 1).
    if (D.const_a != hp.cprime || D.const_b != 1) throw InternalError("carry-block constants broke");

    long kk = (long)block.size();
    std::vector<Int> x(kk + 1, Int(1));
    Int lin = D.const_b;
    for (long t = 0; t < kk; ++t) lin += D.b[t];
    x[kk] = mod_pos(-lin * invmod(mod_pos(f, p), p), p);

    AffineBranch out;
    out.step = st;
    out.witness = checked_witness(D, ctx, x, kk - 1, kk);
    return out;
}

// Block-only route (beta < theta): the u-trick freezes the header against
// the first two block entries.
AffineBranch branch_block_only(const DiagLinSystem& S, const PadicContext& ctx, const std::vector<long>& block,
                               long beta, long theta) {
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    if (beta < 1 || beta >= theta) throw PreconditionViolated("block-only route needs 1 <= beta < theta");
    Int pb = pow_ui(p, (unsigned long)beta);

    std::vector<Int> c, d;
    for (long pos : block) {
        c.push_back(divexact(S.a[pos], pb));
        d.push_back(divexact(S.b[pos], pb));
    }
    if (divides(p, c[0]) || divides(p, d[0])) throw PreconditionViolated("block-only route: c1 or d1 not a unit");
    for (size_t i = 1; i < c.size(); ++i)
        if (mod_pos(c[i] - c[0], p) != 0) throw PreconditionViolated("block classes differ");

    long m = (d[1] == 0) ? kValInf : vp(d[1], p);
    Int u = (m == 0) ? Int(0) : (m >= kValInf ? Int(1) : Int(1) - pow_ui(p, (unsigned long)m));
    Int cc = -c[0] - pow_ui(u, k) * c[1];
    Int dd = -d[0];
    if (divides(p, cc) || divides(p, dd)) throw InternalError("u-trick produced a non-unit target");
    HeaderPair hp = make_header_pair(S.a[0], S.a[1], cc, dd, beta, ctx);

    TransformStep st;
    st.actions.resize(S.s());
    st.new_size = 2;
    st.actions[0] = {VarAction::Freeze, -1, Rat(1), Rat(hp.x1)};
    st.actions[1] = {VarAction::Freeze, -1, Rat(1), Rat(hp.x2)};
    st.actions[block[0]] = {VarAction::Map, 0, Rat(1), Rat(0)};
    st.actions[block[1]] = {VarAction::Map, 1, Rat(1), Rat(0)};
    st.scale_a = Rat(1) / Rat(pb);
    st.scale_b = Rat(1) / Rat(pb);
    st.note = "block-only reduction";

    DiagLinSystem D = apply_transform(S, st, k);
    if (D.const_a != hp.cprime || D.const_b != dd) throw InternalError("block-only constants broke");

    std::vector<Int> x{Int(1), u};
    AffineBranch out;
    out.step = st;
    out.witness = checked_witness(D, ctx, x, 0, 1);
    return out;
}

// Block-at-theta route: the four-case analysis on (alpha, i0).  The block
// coefficients are normalized to the class 1 by an equation scale.
AffineBranch branch_block_at_theta(const DiagLinSystem& S, const PadicContext& ctx, std::vector<long> block,
                                   long theta, std::string* case_tag) {
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    Int pt = pow_ui(p, (unsigned long)theta);

    // Unit-d members first.
    std::stable_sort(block.begin(), block.end(), [&](long i, long j) {
        return (divides(p, divexact(S.b[i], pt)) ? 1 : 0) < (divides(p, divexact(S.b[j], pt)) ? 1 : 0);
    });
    std::vector<Int> c, d;
    for (long pos : block) {
        c.push_back(divexact(S.a[pos], pt));
        d.push_back(divexact(S.b[pos], pt));
    }
    long i0 = 0;
    while (i0 < (long)d.size() && !divides(p, d[i0])) ++i0;
    if (i0 == 0) throw PreconditionViolated("block-at-theta: no unit d");
    if (divides(p, c[0])) throw PreconditionViolated("block-at-theta: c1 not a unit");
    for (size_t i = 1; i < c.size(); ++i)
        if (mod_pos(c[i] - c[0], p) != 0) throw PreconditionViolated("block classes differ");

    Int cnorm = invmod(mod_pos(c[0], p), p);
    Int a1s = cnorm * S.a[0], a2s = cnorm * S.a[1];
    Int aprime = divexact(a1s + a2s, pt);
    Int alpha = mod_pos(-aprime, p);
    if (alpha == 0) throw InternalError("a' became divisible by p");

    TransformStep st;
    st.actions.resize(S.s());
    st.note = "block-at-theta reduction";
    st.scale_a = Rat(cnorm) / Rat(pt);
    st.scale_b = Rat(1) / Rat(pt);

    auto freeze_header = [&](const Int& x1, const Int& x2) {
        st.actions[0] = {VarAction::Freeze, -1, Rat(1), Rat(x1)};
        st.actions[1] = {VarAction::Freeze, -1, Rat(1), Rat(x2)};
    };
    auto keep = [&](long count) {
        st.new_size = count;
        for (long t = 0; t < count; ++t) st.actions[block[t]] = {VarAction::Map, t, Rat(1), Rat(0)};
    };

    AffineBranch out;
    long alpha_l = (long)alpha.get_ui();
    if (alpha >= 2 && i0 >= 2) {
        *case_tag = "i";
        freeze_header(Int(1), Int(1));
        keep(alpha_l);
        DiagLinSystem D = apply_transform(S, st, k);
        if (D.const_a != aprime || D.const_b != 0) throw InternalError("case (i) constants broke");
        // all-unit values with vanishing linear part on the first alpha slots
        std::vector<Int> x(st.new_size, Int(0));
        Int rest = 0;
        for (long t = 2; t < alpha_l; ++t) {
            x[t] = 1;
            rest += D.b[t];
        }
        Int d2inv = invmod(mod_pos(D.b[1], p), p);
        bool done = false;
        for (Int x1 = 1; x1 < p && !done; ++x1) {
            Int x2 = mod_pos(-(rest + D.b[0] * x1) * d2inv, p);
            if (x2 == 0) continue;
            x[0] = x1;
            x[1] = x2;
            done = true;
        }
        if (!done) throw InternalError("case (i): no unit pair for the linear form");
        // pivot: indices with distinct d*z values exist since alpha < p
        long pi = -1, pj = -1;
        for (long i = 0; i < alpha_l && pi < 0; ++i)
            for (long j = i + 1; j < alpha_l; ++j)
                if (!divides(p, minor_of(D, x, i, j, k))) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi < 0) throw InternalError("case (i): all minors vanish");
        out.witness = checked_witness(D, ctx, x, pi, pj);
    } else if (alpha == 1 && i0 >= 2) {
        *case_tag = "ii";
        Int dd = mod_pos((-2 - aprime) * invmod(mod_pos(Int(k) * a1s, p), p), p);
        if (dd == 0) throw InternalError("case (ii): correction slope vanished");
        freeze_header(Int(1) + dd * pt, Int(1));
        keep(2);
        DiagLinSystem D = apply_transform(S, st, k);
        if (D.const_b != dd) throw InternalError("case (ii) linear constant broke");
        if (mod_pos(D.const_a + 2, p) != 0) throw InternalError("case (ii) degree constant broke");
        std::vector<Int> x(2);
        x[0] = mod_pos(dd * invmod(mod_pos(D.b[0], p), p), p);
        x[1] = mod_pos(-2 * dd * invmod(mod_pos(D.b[1], p), p), p);
        out.witness = checked_witness(D, ctx, x, 0, 1);
    } else if (i0 == 1 && alpha <= p - 2) {
        *case_tag = "iii";
        freeze_header(Int(1), Int(1));
        keep((long)k);
        DiagLinSystem D = apply_transform(S, st, k);
        if (D.const_a != aprime || D.const_b != 0) throw InternalError("case (iii) constants broke");
        std::vector<Int> x((long)k, Int(0));
        for (long t = 1; t <= alpha_l; ++t) x[t] = 1;
        out.witness = checked_witness(D, ctx, x, 0, 1);
    } else { // i0 == 1, alpha == p-1
        *case_tag = "iv";
        Int dd = mod_pos((-2 - aprime) * invmod(mod_pos(Int(k) * a1s, p), p), p);
        if (dd == 0) throw InternalError("case (iv): correction slope vanished");
        freeze_header(Int(1) + dd * pt, Int(1));
        keep(2);
        DiagLinSystem D = apply_transform(S, st, k);
        if (D.const_b != dd) throw InternalError("case (iv) linear constant broke");
        std::vector<Int> x(2);
        x[0] = mod_pos(-dd * invmod(mod_pos(D.b[0], p), p), p);
        x[1] = 1;
        out.witness = checked_witness(D, ctx, x, 0, 1);
    }
    out.step = st;
    return out;
}

// Header-fold route: freeze a block at p^upsilon * (subset indicator), fold
// x1 = x + h, and lift the resulting one-variable polynomial.
struct FoldBranch {
    TransformStep step;
    hensel::PolyRootWitness witness;
};

FoldBranch branch_header_fold(const DiagLinSystem& S, const PadicContext& ctx, const std::vector<long>& block,
                              long upsilon, long theta) {
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    long r = theta - upsilon * (long)k;
    if (r < 0 || r >= (long)k) throw InternalError("fold: theta decomposition broke");
    Int pr = pow_ui(p, (unsigned long)r);

    TransformStep st;
    st.actions.resize(S.s());
    st.new_size = (long)k + 2;
    st.actions[0] = {VarAction::Map, 0, Rat(1), Rat(0)};
    st.actions[1] = {VarAction::Map, 1, Rat(1), Rat(0)};
    Rat pu(pow_ui(p, (unsigned long)upsilon));
    for (long t = 0; t < (long)block.size(); ++t) st.actions[block[t]] = {VarAction::Map, t + 2, pu, Rat(0)};
    st.note = "header-fold restriction";

    DiagLinSystem D = apply_transform(S, st, k);
    // D: a = (a1, a2, p^theta c_1..c_k), b = (1, -1, p^(theta+1) d_1..d_k).
    Int pt = pow_ui(p, (unsigned long)theta);
    std::vector<Int> c, d;
    for (long t = 2; t < D.s(); ++t) {
        c.push_back(divexact(D.a[t], pt));
        Int bt = D.b[t];
        if (mod_pos(bt, pt * p) != 0) throw InternalError("fold: linear block level too low");
        d.push_back(divexact(bt, pt * p));
    }
    for (const Int& ci : c)
        if (divides(p, ci)) throw InternalError("fold: block class not a unit");

    Int aprime = divexact(D.a[0] + D.a[1], pt);
    // Subset of the block summing to -a' mod p: classes are all equal, so a
    // plain cardinality choice works.
    Int cls = mod_pos(c[0], p);
    long count = (long)mod_pos(-aprime * invmod(cls, p), p).get_ui();
    if (count == 0 || count > (long)k) throw InternalError("fold: bad subset cardinality");
    std::vector<Int> z((long)k, Int(0));
    Int zsum = 0, csum = 0;
    for (long t = 0; t < count; ++t) {
        z[t] = 1;
        zsum += d[t];
        csum += c[t];
    }
    if (mod_pos(csum + aprime, p) != 0) throw InternalError("fold: subset misses the target");
    Int h = -pt * p * zsum;

    hensel::PolyRootWitness w;
    w.system = D;
    w.ctx = ctx;
    w.var_x = 1;
    w.mirror = {std::pair<long, Int>{0, h}};
    for (long t = 0; t < (long)k; ++t) w.frozen.push_back({t + 2, z[t]});
    w.theta_scale = theta;
    w.point = 1;
    // psi = p^-theta (a1 (X+h)^k + a2 X^k) + sum c_i z_i^k.
    std::vector<Int> psi(k + 1, Int(0));
    Int binom = 1;
    for (unsigned long j = 0; j <= k; ++j) {
        psi[k - j] += D.a[0] * binom * pow_ui(h, j);
        binom = binom * Int((unsigned long)(k - j)) / Int((unsigned long)(j + 1));
    }
    psi[k] += D.a[1];
    for (auto& coeff : psi) coeff = divexact(coeff, pt);
    psi[0] += csum;
    w.poly = psi;
    auto chk = hensel::check_poly_root_witness(w);
    if (!chk.ok) throw InternalError("fold witness failed self-check: " + chk.failure);

    FoldBranch out;
    out.step = st;
    out.witness = w;
    return out;
}

EngineOutcome outcome_from_branch(const Transcript& prefix, const AffineBranch& br, const std::string& tag) {
    EngineOutcome out;
    out.status = EngineOutcome::Solved;
    out.transcript = prefix;
    out.transcript.append(br.step);
    out.pair_witness = br.witness;
    out.branch = tag;
    return out;
}

} // namespace

std::vector<long> profile_block(const PadicContext& ctx, long j) {
    long k = (long)ctx.k;
    std::vector<long> out;
    if (j == 0)
        for (long t = 2; t < k + 2; ++t) out.push_back(t);
    else
        for (long t = j * k + 2; t < j * k + k + 2; ++t) out.push_back(t);
    return out;
}

HeaderPair make_header_pair(const Int& a1, const Int& a2, const Int& c, const Int& d, long l,
                            const PadicContext& ctx) {
    const Int& p = ctx.p;
    if (divides(p, c) || divides(p, d)) throw PreconditionViolated("make_header_pair: p | cd");
    long theta = vp(a1 + a2, p);
    if (l < 1 || l >= theta) throw PreconditionViolated("make_header_pair: need 1 <= l < theta");
    if (divides(p, a1) || divides(p, a2)) throw PreconditionViolated("make_header_pair: header not units");
    Int x = mod_pos(Int(ctx.k) * a1 * d * invmod(mod_pos(c, p), p), p);
    HeaderPair hp;
    hp.x2 = x;
    hp.x1 = x + pow_ui(p, (unsigned long)l) * d;
    Int val = a1 * pow_ui(hp.x1, ctx.k) + a2 * pow_ui(hp.x2, ctx.k);
    hp.cprime = divexact(val, pow_ui(p, (unsigned long)l));
    if (mod_pos(hp.cprime - c, p) != 0) throw InternalError("make_header_pair: wrong residue class");
    return hp;
}

namespace {

// Assembles the header-plus-block base system for the standalone aux solvers.
DiagLinSystem build_aux_system(const Int& a1, const Int& a2, const std::vector<Int>& c,
                               const std::vector<Int>& d, const std::optional<std::pair<Int, Int>>& carry,
                               long beta, const PadicContext& ctx) {
    if (c.size() != ctx.k || d.size() != ctx.k) throw PreconditionViolated("aux system needs k block entries");
    Int pb = pow_ui(ctx.p, (unsigned long)beta);
    DiagLinSystem S;
    S.a = {a1, a2};
    S.b = {Int(1), Int(-1)};
    for (size_t i = 0; i < c.size(); ++i) {
        S.a.push_back(pb * c[i]);
        S.b.push_back(pb * d[i]);
    }
    if (carry) {
        S.a.push_back(pb * ctx.p * carry->first);
        S.b.push_back(pb * carry->second);
    }
    return S;
}

hensel::LiftedSolution lift_affine(const DiagLinSystem& base, const Transcript& tr,
                                   const hensel::HenselWitness& w, const PadicContext& ctx, long M) {
    hensel::LiftedSolution inner = hensel::solve_from_witness(w, M + 2 * (long)ctx.k + 4);
    std::vector<Rat> x = tr.pull_back(inner.x);
    hensel::LiftedSolution out;
    out.x = x;
    out.unit_index = -1;
    for (long i = 0; i < base.s(); ++i)
        if (x[i] != 0 && vp_rat(x[i], ctx.p) == 0) {
            out.unit_index = i;
            break;
        }
    Rat ra = eval_a_rat(base, x, ctx.k);
    Rat rb = eval_b_rat(base, x);
    if (ra != 0 && vp_rat(ra, ctx.p) < M) throw InternalError("aux lift: degree residual too small");
    if (rb != 0) throw InternalError("aux lift: linear residual nonzero");
    return out;
}

} // namespace

hensel::LiftedSolution solve_aux_b(const Int& a1, const Int& a2, const std::vector<Int>& c,
                                   const std::vector<Int>& d, const Int& e, const Int& f, long beta,
                                   const PadicContext& ctx, long M) {
    long theta = vp(a1 + a2, ctx.p);
    DiagLinSystem S = build_aux_system(a1, a2, c, d, std::make_pair(e, f), beta, ctx);
    std::vector<long> block;
    for (long t = 2; t < 2 + (long)ctx.k; ++t) block.push_back(t);
    AffineBranch br = branch_carry_block(S, ctx, block, 2 + (long)ctx.k, beta, theta);
    Transcript tr;
    tr.source = S;
    tr.append(br.step);
    return lift_affine(S, tr, br.witness, ctx, M);
}

hensel::LiftedSolution solve_aux_bprime(const Int& a1, const Int& a2, const std::vector<Int>& c,
                                        const std::vector<Int>& d, long beta, const PadicContext& ctx, long M) {
    long theta = vp(a1 + a2, ctx.p);
    DiagLinSystem S = build_aux_system(a1, a2, c, d, std::nullopt, beta, ctx);
    std::vector<long> block;
    for (long t = 2; t < 2 + (long)ctx.k; ++t) block.push_back(t);
    Transcript tr;
    tr.source = S;
    AffineBranch br = (beta < theta) ? branch_block_only(S, ctx, block, beta, theta) : [&] {
        if (beta != theta) throw PreconditionViolated("solve_aux_bprime: beta <= theta required");
        std::string tag;
        return branch_block_at_theta(S, ctx, block, theta, &tag);
    }();
    tr.append(br.step);
    return lift_affine(S, tr, br.witness, ctx, M);
}

ReduceResult reduce_to_critical(const DiagLinSystem& sys, const PadicContext& ctx) {
    const Int& p = ctx.p;
    unsigned long k = ctx.k;
    long s = sys.s();
    if (p < 5 || Int(k) != p - 1) throw NotApplicable("k = p-1 engine needs p >= 5");
    if (Int(s) < Int(k) * Int(k) + 2) throw NotApplicable("too few variables");
    if (!normalize::is_conditioned(sys, ctx)) throw NotApplicable("input not conditioned");

    ReduceResult res;
    res.to_critical.source = sys;
    SystemStats st = stats(sys, ctx);

    std::vector<long> block0;
    for (long i = 0; i < s; ++i)
        if (st.nu[i] == 0) block0.push_back(i);

    // Shortcut: a low variable at level 0 turns the niveau-0 block plus that
    // variable into a freely solvable pair.
    auto low_route = [&](const DiagLinSystem& S, const Transcript& prefix) -> std::optional<EngineOutcome> {
        SystemStats stS = stats(S, ctx);
        std::vector<long> b0;
        long jlow = -1;
        for (long i = 0; i < S.s(); ++i) {
            if (stS.nu[i] == 0) b0.push_back(i);
            if (jlow < 0 && stS.nu[i] >= 1 && stS.mu[i] == 0) jlow = i;
        }
        if (jlow < 0 || Int((long)b0.size()) < p) return std::nullopt;
        std::vector<Int> av;
        for (long i : b0) av.push_back(S.a[i]);
        auto diag = combinat::solve_unit_diagonal_mod_p(av, ctx);
        if (diag.kind != combinat::FpSolution::Solved) throw InternalError("niveau-0 diagonal failed with >= p units");
        std::vector<Int> x(S.s(), Int(0));
        Int lin = 0;
        long unit_j = -1;
        for (size_t t = 0; t < b0.size(); ++t) {
            x[b0[t]] = diag.values[t];
            lin += S.b[b0[t]] * diag.values[t];
            if (unit_j < 0 && diag.values[t] != 0) unit_j = b0[t];
        }
        x[jlow] = mod_pos(-lin * invmod(mod_pos(S.b[jlow], p), p), p);
        EngineOutcome out;
        out.status = EngineOutcome::Solved;
        out.transcript = prefix;
        out.pair_witness = checked_witness(S, ctx, x, unit_j, jlow);
        out.branch = "low-at-level-0";
        return out;
    };

    if (auto got = low_route(sys, res.to_critical)) {
        res.solved = true;
        res.outcome = *got;
        return res;
    }

    // No low variable at level 0 from here on.
    if ((long)block0.size() >= (long)k + 3) {
        std::vector<Int> av, bv;
        for (long i : block0) {
            av.push_back(sys.a[i]);
            bv.push_back(sys.b[i]);
        }
        auto pr = combinat::solve_unit_pair_mod_p(av, bv, ctx);
        if (pr.kind != combinat::FpSolution::Solved)
            throw InternalError("niveau-0 pair with >= p+2 units failed");
        std::vector<Int> x(s, Int(0));
        for (size_t t = 0; t < block0.size(); ++t) x[block0[t]] = pr.values[t];
        EngineOutcome out;
        out.status = EngineOutcome::Solved;
        out.transcript = res.to_critical;
        out.pair_witness = checked_witness(sys, ctx, x, block0[pr.pivot->first], block0[pr.pivot->second]);
        out.branch = "large-niveau-0";
        res.solved = true;
        res.outcome = out;
        return res;
    }

    // Rotation: move block j to niveau 0; the old unit-b variable at niveau 0
    // becomes a low variable there.
    auto rotate_step = [&](long j) {
        SystemStats stc = stats(sys, ctx);
        TransformStep step = identity_step(s);
        for (long i = 0; i < s; ++i)
            if (stc.nu[i] < j) step.actions[i].mult = Rat(p);
        step.scale_a = Rat(1) / Rat(pow_ui(p, (unsigned long)j));
        step.scale_b = Rat(1) / Rat(p);
        step.note = "rotate niveau blocks";
        return step;
    };

    std::vector<long> upsilon = st.upsilon;
    for (long j = 1; j < (long)k; ++j) {
        if (upsilon[j] < (long)k + 1) continue;
        TransformStep step = rotate_step(j);
        Transcript tr = res.to_critical;
        tr.append(step);
        DiagLinSystem Sj = apply_transform(sys, step, k);
        if (auto got = low_route(Sj, tr)) {
            res.solved = true;
            res.outcome = *got;
            return res;
        }
        throw InternalError("rotation produced no low variable at niveau 0");
    }

    // Counts are now forced to the critical shape.
    if ((long)block0.size() != (long)k + 2 || Int(s) != Int(k) * Int(k) + 2)
        throw InternalError("conditioned counts do not match the forced shape");
    for (long j = 1; j < (long)k; ++j)
        if (upsilon[j] != (long)k) throw InternalError("conditioned counts do not match the forced shape");

    // Shape forcing: for each upper block, rotating it to niveau 0 must leave
    // an insoluble block diagonal, otherwise we solve outright.
    for (long j = 1; j < (long)k; ++j) {
        TransformStep step = rotate_step(j);
        Transcript tr = res.to_critical;
        tr.append(step);
        DiagLinSystem Sj = apply_transform(sys, step, k);
        SystemStats stj = stats(Sj, ctx);
        std::vector<long> bj;
        long ilow = -1;
        for (long i = 0; i < s; ++i) {
            if (stj.nu[i] == 0) bj.push_back(i);
            if (ilow < 0 && stj.nu[i] >= 1 && stj.mu[i] == 0) ilow = i;
        }
        if (ilow < 0) throw InternalError("rotation lost the low variable");
        std::vector<Int> av;
        for (long i : bj) av.push_back(Sj.a[i]);
        auto diag = combinat::solve_unit_diagonal_mod_p(av, ctx);
        if (diag.kind == combinat::FpSolution::Solved) {
            std::vector<Int> x(s, Int(0));
            Int lin = 0;
            long unit_j = -1;
            for (size_t t = 0; t < bj.size(); ++t) {
                x[bj[t]] = diag.values[t];
                lin += Sj.b[bj[t]] * diag.values[t];
                if (unit_j < 0 && diag.values[t] != 0) unit_j = bj[t];
            }
            x[ilow] = mod_pos(-lin * invmod(mod_pos(Sj.b[ilow], p), p), p);
            EngineOutcome out;
            out.status = EngineOutcome::Solved;
            out.transcript = tr;
            out.pair_witness = checked_witness(Sj, ctx, x, unit_j, ilow);
            out.branch = "block-shape-breaker";
            res.solved = true;
            res.outcome = out;
            return res;
        }
        if (diag.kind != combinat::FpSolution::AllEqual)
            throw InternalError("block diagonal neither solved nor all-equal");
    }

    // Niveau-0 block: solved outright or the critical coefficient shape.
    std::vector<Int> av, bv;
    for (long i : block0) {
        av.push_back(sys.a[i]);
        bv.push_back(sys.b[i]);
    }
    auto pr = combinat::solve_unit_pair_mod_p(av, bv, ctx);
    if (pr.kind == combinat::FpSolution::Solved) {
        std::vector<Int> x(s, Int(0));
        for (size_t t = 0; t < block0.size(); ++t) x[block0[t]] = pr.values[t];
        EngineOutcome out;
        out.status = EngineOutcome::Solved;
        out.transcript = res.to_critical;
        out.pair_witness = checked_witness(sys, ctx, x, block0[pr.pivot->first], block0[pr.pivot->second]);
        out.branch = "niveau-0-pair";
        res.solved = true;
        res.outcome = out;
        return res;
    }
    if (pr.kind != combinat::FpSolution::CriticalShape) throw InternalError("unexpected niveau-0 outcome");

    // Canonical permutation: header first, then the remaining niveau-0
    // variables, then blocks 1..k-1 in index order.
    std::vector<long> order; // order[t] = old index placed at position t
    order.push_back(block0[pr.perm[0]]);
    order.push_back(block0[pr.perm[1]]);
    for (size_t t = 2; t < pr.perm.size(); ++t) order.push_back(block0[pr.perm[t]]);
    for (long j = 1; j < (long)k; ++j)
        for (long i = 0; i < s; ++i)
            if (st.nu[i] == j) order.push_back(i);
    if ((long)order.size() != s) throw InternalError("canonical order incomplete");
    std::vector<long> new_index_of_old(s);
    for (long t = 0; t < s; ++t) new_index_of_old[order[t]] = t;
    TransformStep perm = permutation_step(new_index_of_old, "canonical critical order");
    DiagLinSystem Sp = apply_transform(sys, perm, k);
    res.to_critical.append(perm);

    // Header normalization: multiply the degree equation by (b1 b2)^k, then
    // substitute x1' = b1 x1, x2' = -b2 x2, and scale the tail class to 1.
    Int b1 = Sp.b[0], b2 = Sp.b[1];
    TransformStep norm = identity_step(s);
    norm.actions[0].mult = Rat(1) / Rat(b1);
    norm.actions[1].mult = Rat(-1) / Rat(b2);
    norm.scale_a = Rat(pow_ui(b1, k) * pow_ui(b2, k));
    norm.note = "header normalization";
    DiagLinSystem Sn = apply_transform(Sp, norm, k);
    res.to_critical.append(norm);

    Int aprime_cls = mod_pos(Sn.a[2], p);
    Int ainv = invmod(aprime_cls, p);
    if (ainv != 1) {
        TransformStep sc = identity_step(s);
        sc.scale_a = Rat(ainv);
        sc.note = "tail class normalization";
        Sn = apply_transform(Sn, sc, k);
        res.to_critical.append(sc);
    }

    if (Sn.b[0] != 1 || Sn.b[1] != -1) throw InternalError("header linear normalization failed");
    if (Sn.a[0] + Sn.a[1] == 0) {
        // Exact rational solution of the normalized system.
        std::vector<Rat> y(s, Rat(0));
        y[0] = 1;
        y[1] = 1;
        EngineOutcome out;
        out.status = EngineOutcome::Solved;
        out.transcript = res.to_critical;
        out.exact = res.to_critical.pull_back(y);
        out.branch = "rational-header";
        res.solved = true;
        res.outcome = out;
        return res;
    }

    CriticalProfile prof;
    prof.system = Sn;
    prof.ctx = ctx;
    prof.theta = vp(Sn.a[0] + Sn.a[1], p);
    if (prof.theta < 1) throw InternalError("header sum is a unit after normalization");
    if (divides(p, Sn.a[0]) || divides(p, Sn.a[1]) || mod_pos(Sn.a[0] + Sn.a[1], p) != 0)
        throw InternalError("header congruence shape broke");
    SystemStats stn = stats(Sn, ctx);
    for (long t = 2; t < (long)k + 2; ++t) {
        if (mod_pos(Sn.a[t] - 1, p) != 0) throw InternalError("tail class is not 1");
        if (stn.mu[t] == 0) throw InternalError("tail linear coefficient is a unit");
    }
    for (long j = 1; j < (long)k; ++j) {
        auto blk = profile_block(ctx, j);
        Int cls = mod_pos(divexact(Sn.a[blk[0]], pow_ui(p, (unsigned long)j)), p);
        for (long pos : blk) {
            if (stn.nu[pos] != j) throw InternalError("block niveau broke under normalization");
            if (mod_pos(divexact(Sn.a[pos], pow_ui(p, (unsigned long)j)) - cls, p) != 0)
                throw InternalError("block class is not constant");
        }
        prof.block_class.push_back(cls);
    }
    for (long i = 0; i < s; ++i)
        if (stn.nu[i] >= 1 && stn.mu[i] == 0) throw InternalError("low variable at level 0 in a critical system");

    res.profile = prof;
    return res;
}

EngineOutcome solve_critical(const CriticalProfile& prof, const Transcript& prefix) {
    const PadicContext& ctx = prof.ctx;
    const Int& p = ctx.p;
    long k = (long)ctx.k;
    const DiagLinSystem& S = prof.system;
    long s = S.s();
    long theta = prof.theta;
    SystemStats st = stats(S, ctx);

    // Low variables (mu < nu) and balanced variables (mu == nu) below theta.
    long low_pos = -1, low_level = kValInf;
    long bal_pos = -1, bal_level = kValInf;
    for (long i = 2; i < s; ++i) {
        if (st.mu[i] < st.nu[i] && st.mu[i] < low_level) {
            low_level = st.mu[i];
            low_pos = i;
        }
        if (st.mu[i] == st.nu[i] && st.mu[i] < bal_level) {
            bal_level = st.mu[i];
            bal_pos = i;
        }
    }
    if (low_pos >= 0 && low_level == 0) throw InternalError("critical profile has a low variable at level 0");

    auto carry_route = [&](long beta, long zpos) {
        // Block at A-level beta must be all high; guaranteed by minimality.
        long j = beta % k;
        auto blk = profile_block(ctx, j);
        for (long pos : blk)
            if (st.nu[pos] != beta || st.mu[pos] < beta) throw InternalError("carry block is not all high");
        AffineBranch br = branch_carry_block(S, ctx, blk, zpos, beta, theta);
        return outcome_from_branch(prefix, br, "low-below-theta");
    };

    if (low_pos >= 0 && low_level < theta) return carry_route(low_level, low_pos);

    if (bal_pos >= 0 && bal_level >= 1 && bal_level < theta) {
        long beta = bal_level;
        auto blk = profile_block(ctx, beta % k);
        // Reorder so the balanced variable leads; the rest are high since no
        // low variable below theta survived the previous branch.
        std::vector<long> ordered{bal_pos};
        for (long pos : blk)
            if (pos != bal_pos) ordered.push_back(pos);
        for (long pos : blk)
            if (st.mu[pos] < st.nu[pos]) throw InternalError("balanced block contains a low variable");
        AffineBranch br = branch_block_only(S, ctx, ordered, beta, theta);
        return outcome_from_branch(prefix, br, "balanced-below-theta");
    }

    if (theta < k) {
        // Trichotomy on the block at niveau theta.
        auto blk = profile_block(ctx, theta);
        bool all_above = true, some_equal = false;
        for (long pos : blk) {
            if (st.mu[pos] <= theta) all_above = false;
            if (st.mu[pos] == theta) some_equal = true;
        }
        if (all_above) {
            FoldBranch fb = branch_header_fold(S, ctx, blk, 0, theta);
            EngineOutcome out;
            out.status = EngineOutcome::Solved;
            out.transcript = prefix;
            out.transcript.append(fb.step);
            out.root_witness = fb.witness;
            out.branch = "header-fold";
            return out;
        }
        if (!some_equal) throw InternalError("trichotomy: low below theta should have fired");
        std::vector<long> ordered;
        for (long pos : blk)
            if (st.mu[pos] == theta) ordered.push_back(pos);
        for (long pos : blk)
            if (st.mu[pos] != theta) ordered.push_back(pos);
        std::string tag;
        AffineBranch br = branch_block_at_theta(S, ctx, ordered, theta, &tag);
        return outcome_from_branch(prefix, br, "block-at-theta-" + tag);
    }

    // theta >= k: the level sweep.  All variables above the header now have
    // mu > nu.
    for (long i = 2; i < s; ++i)
        if (st.mu[i] <= st.nu[i]) throw InternalError("sweep preconditions broke");

    long max_mu = 0;
    for (long i = 2; i < s; ++i) max_mu = std::max(max_mu, st.mu[i]);
    long bound = 2 * max_mu + 2 * k + 4;

    auto nu_tau = [&](long i, long tau) {
        long u = tau / k, rho = tau % k;
        return st.nu[i] + k * ((st.nu[i] <= rho) ? u + 1 : u);
    };
    auto mu_tau = [&](long i, long tau) {
        long u = tau / k, rho = tau % k;
        return st.mu[i] + ((st.nu[i] <= rho) ? u + 1 : u);
    };

    long t = -1;
    for (long tau = 0; tau <= bound && t < 0; ++tau)
        for (long i = 2; i < s; ++i)
            if (nu_tau(i, tau) >= mu_tau(i, tau)) {
                t = tau;
                break;
            }
    if (t < 0) throw InternalError("level sweep found no crossing below the bound");

    long up = t / k, rhop = t % k;
    for (long i = 2; i < s; ++i)
        if (nu_tau(i, t) >= mu_tau(i, t) && st.nu[i] != rhop)
            throw InternalError("sweep crossing outside the expected block");

    if (t > theta - k) {
        long ups = theta / k, r = theta % k;
        auto blk = profile_block(ctx, r); // r = 0 folds against the niveau-0 tail
        for (long pos : blk)
            if (st.mu[pos] + ups <= theta) throw InternalError("fold hypothesis fails after sweep");
        FoldBranch fb = branch_header_fold(S, ctx, blk, ups, theta);
        EngineOutcome out;
        out.status = EngineOutcome::Solved;
        out.transcript = prefix;
        out.transcript.append(fb.step);
        out.root_witness = fb.witness;
        out.branch = "sweep-header-fold";
        return out;
    }

    // Apply the level-t rescaling as a transform step.
    TransformStep at = identity_step(s);
    for (long i = 2; i < s; ++i) {
        long u = (st.nu[i] <= rhop) ? up + 1 : up;
        if (u > 0) at.actions[i].mult = Rat(pow_ui(p, (unsigned long)u));
    }
    at.note = "level sweep rescaling";
    DiagLinSystem St = apply_transform(S, at, ctx.k);
    Transcript pfx = prefix;
    pfx.append(at);
    SystemStats stt = stats(St, ctx);

    auto blk_rhop = profile_block(ctx, rhop);
    long beta = kValInf;
    for (long pos : blk_rhop) beta = std::min(beta, stt.mu[pos]);
    if (beta < 1 || beta > theta) throw InternalError("sweep level out of range");

    if (beta < t + k) {
        long ip = -1;
        for (long pos : blk_rhop)
            if (stt.mu[pos] == beta) {
                ip = pos;
                break;
            }
        long rhopp = beta % k;
        if (rhopp == rhop) throw InternalError("sweep target block collides");
        auto blk2 = profile_block(ctx, rhopp);
        for (long pos : blk2)
            if (stt.nu[pos] != beta) throw InternalError("carry block is not at level beta");
        AffineBranch br = branch_carry_block(St, ctx, blk2, ip, beta, theta);
        return outcome_from_branch(pfx, br, "sweep-carry");
    }
    if (beta == t + k && beta < theta) {
        std::vector<long> ordered;
        for (long pos : blk_rhop)
            if (stt.mu[pos] == beta) ordered.push_back(pos);
        for (long pos : blk_rhop)
            if (stt.mu[pos] != beta) ordered.push_back(pos);
        AffineBranch br = branch_block_only(St, ctx, ordered, beta, theta);
        return outcome_from_branch(pfx, br, "sweep-block");
    }
    if (beta != theta) throw InternalError("sweep levels inconsistent");
    std::vector<long> ordered;
    for (long pos : blk_rhop)
        if (stt.mu[pos] == beta) ordered.push_back(pos);
    for (long pos : blk_rhop)
        if (stt.mu[pos] != beta) ordered.push_back(pos);
    std::string tag;
    AffineBranch br = branch_block_at_theta(St, ctx, ordered, theta, &tag);
    return outcome_from_branch(pfx, br, "sweep-block-at-theta-" + tag);
}

EngineOutcome solve(const DiagLinSystem& sys, const PadicContext& ctx) {
    EngineOutcome out;
    out.transcript.source = sys;
    if (ctx.p < 5 || Int(ctx.k) != ctx.p - 1) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "k is not p-1 with p >= 5";
        return out;
    }
    if (Int(sys.s()) < Int(ctx.k) * Int(ctx.k) + 2 || !normalize::is_conditioned(sys, ctx)) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "needs a conditioned system with s >= k^2+2";
        return out;
    }
    ReduceResult red = reduce_to_critical(sys, ctx);
    if (red.solved) return red.outcome;
    return solve_critical(*red.profile, red.to_critical);
}

} // namespace padlin::pm1
