#include "padlin/engine_ppm1.hpp"

#include <algorithm>

#include "padlin/normalize.hpp"
#include "padlin/oracle.hpp"

namespace padlin::ppm1 {

namespace {

Int minor_of(const DiagLinSystem& sys, const std::vector<Int>& x, long i, long j, unsigned long k) {
    return sys.b[i] * sys.a[j] * pow_ui(x[j], k - 1) - sys.b[j] * sys.a[i] * pow_ui(x[i], k - 1);
}

hensel::HenselWitness make_witness(const DiagLinSystem& sys, const PadicContext& ctx, std::vector<Int> x,
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
    if (!chk.ok) throw InternalError("engine produced a bad witness: " + chk.failure);
    return w;
}

// Pivot pair for a full-system assignment, preferring pairs whose minor is a
// unit; returns (-1,-1) when none exists.
std::pair<long, long> find_pivot(const DiagLinSystem& sys, const std::vector<Int>& x, const PadicContext& ctx) {
    long s = sys.s();
    for (long i = 0; i < s; ++i)
        for (long j = i + 1; j < s; ++j)
            if (!divides(ctx.p, minor_of(sys, x, i, j, ctx.k))) return {i, j};
    return {-1, -1};
}

} // namespace

ModP2Solution solve_mod_p2(const ModP2Instance& inst) {
    const Int& p = inst.ctx.p;
    long u = (long)inst.c.size();
    long t = (long)inst.d.size();
    if (t < 1 || t > u) throw PreconditionViolated("solve_mod_p2: need 1 <= t <= u");
    if (Int(u) < p * p + 2) throw PreconditionViolated("solve_mod_p2: need u >= p^2 + 2");
    for (const Int& ci : inst.c)
        if (divides(p, ci)) throw PreconditionViolated("solve_mod_p2: c must be units");
    for (const Int& di : inst.d)
        if (divides(p, di)) throw PreconditionViolated("solve_mod_p2: d must be units");
    Int p2 = p * p;

    ModP2Solution out;
    out.x.assign(u, Int(0));

    if (t <= 2) {
        std::vector<Int> tail(inst.c.begin() + 2, inst.c.end());
        auto J = combinat::zero_subset_sum(tail, p2);
        for (long j : J) out.x[j + 2] = 1;
        out.pivot_i = 0;
        out.pivot_j = J[0] + 2;
        return out;
    }

    // Rearrange {0,1,2} so the pair at positions (beta, gamma) has unit
    // coefficient sum and alpha keeps a unit linear coefficient with x = 0.
    auto np = combinat::pair_with_nonzero_sum({inst.c[0], inst.c[1], inst.c[2]}, p);
    long beta = np.i, gamma = np.j;
    long alpha = 3 - beta - gamma;

    std::vector<Int> tail(inst.c.begin() + 3, inst.c.end());
    auto I = combinat::subset_sum_target(tail, p2, -(inst.c[beta] + inst.c[gamma]));
    if (!I) throw InternalError("solve_mod_p2: target unreachable with p^2-1 unit entries");

    Int D = 0;
    for (long i : *I)
        if (i + 3 < t) D -= inst.d[i + 3];
    Int dginv = invmod(mod_pos(inst.d[gamma], p), p);
    bool placed = false;
    for (Int xb = 1; xb < p && !placed; ++xb) {
        Int xg = mod_pos((D - inst.d[beta] * xb) * dginv, p);
        if (xg == 0) continue;
        out.x[beta] = xb;
        out.x[gamma] = xg;
        placed = true;
    }
    if (!placed) throw InternalError("solve_mod_p2: no unit pair for the linear congruence");
    for (long i : *I) out.x[i + 3] = 1;
    out.pivot_i = alpha;
    out.pivot_j = gamma;
    return out;
}

P3Exceptional solve_p3_exceptional(const std::vector<Int>& a, const std::vector<Int>& b,
                                   const std::vector<Int>& c, const std::vector<Int>& d) {
    if (a.size() != 9 || b.size() != 9 || c.size() != 3 || d.size() != 3)
        throw PreconditionViolated("solve_p3_exceptional: need 9+9+3+3 coefficients");
    Int three(3);
    for (const Int& v : a)
        if (divides(three, v)) throw PreconditionViolated("a must be units mod 3");
    for (const Int& v : c)
        if (divides(three, v)) throw PreconditionViolated("c must be units mod 3");
    for (const Int& v : d)
        if (divides(three, v)) throw PreconditionViolated("d must be units mod 3");

    auto cls = [&](const Int& v) { return mod_pos(v, three); };

    // Choose the carry pattern y = pattern * z so that the carried sextic
    // part vanishes mod 9 and the linear part contributes D * z.
    std::array<Int, 3> pattern{0, 0, 0};
    Int D;
    if (cls(c[0]) == cls(c[1]) && cls(c[1]) == cls(c[2])) {
        if (cls(d[0]) == cls(d[1]) && cls(d[1]) == cls(d[2])) {
            pattern = {Int(1), Int(1), Int(-1)};
            D = d[0] + d[1] - d[2];
        } else {
            // arrange d_i = d_j = -d_l and take y = (z, z, z)
            pattern = {Int(1), Int(1), Int(1)};
            D = d[0] + d[1] + d[2];
        }
    } else {
        // permute so c_i0 == c_i1 == -c_i2
        std::array<long, 3> perm{0, 1, 2};
        if (cls(c[0]) == cls(c[1]))
            perm = {0, 1, 2};
        else if (cls(c[0]) == cls(c[2]))
            perm = {0, 2, 1};
        else
            perm = {1, 2, 0};
        long i0 = perm[0], i1 = perm[1], i2 = perm[2];
        if (cls(d[i0]) == cls(d[i2])) {
            pattern[i0] = 1;
            pattern[i2] = 1;
            D = d[i0] + d[i2];
        } else if (cls(d[i1]) == cls(d[i2])) {
            pattern[i1] = 1;
            pattern[i2] = 1;
            D = d[i1] + d[i2];
        } else {
            pattern[i0] = 1;
            pattern[i2] = -1;
            D = d[i0] - d[i2];
        }
        (void)i1;
    }
    if (divides(three, D)) throw InternalError("carry pattern left a non-unit linear coefficient");

    // The sextic carried part vanishes mod 9 for every z: check the exact
    // coefficient sum (units mod 3 are units mod 9, and x^6 == 1 mod 9).
    Int csum = 0;
    for (long j = 0; j < 3; ++j)
        if (pattern[j] != 0) csum += c[j];
    if (mod_pos(Int(3) * csum, Int(9)) != 0) throw InternalError("carried sextic part does not vanish mod 9");

    // Units mod 3 are units mod 9, so the subset solver applies directly.
    auto J = combinat::zero_subset_sum(a, Int(9));

    P3Exceptional out;
    out.x.assign(9, Int(0));
    for (long j : J) out.x[j] = 1;
    Int bsum = 0;
    for (long j : J) bsum += b[j];
    Int z = mod_pos(-bsum * invmod(mod_pos(D, three), three), three);
    out.y.assign(3, Int(0));
    for (long j = 0; j < 3; ++j) out.y[j] = mod_pos(pattern[j] * z, Int(9));

    // Re-verify both congruences.
    Int A = 0;
    for (long j = 0; j < 9; ++j) A += a[j] * pow_ui(out.x[j], 6);
    for (long j = 0; j < 3; ++j) A += 3 * c[j] * pow_ui(out.y[j], 6);
    Int B = 0;
    for (long j = 0; j < 9; ++j) B += b[j] * out.x[j];
    for (long j = 0; j < 3; ++j) B += d[j] * out.y[j];
    if (mod_pos(A, Int(9)) != 0 || mod_pos(B, three) != 0)
        throw InternalError("solve_p3_exceptional produced a non-solution");
    return out;
}

namespace {

struct Blocks {
    std::vector<long> block0, block1;
    std::vector<long> unit_b_block0;
    std::vector<long> low_outside; // nu >= 1, mu = 0
};

Blocks split_blocks(const DiagLinSystem& sys, const SystemStats& st) {
    Blocks bl;
    for (long i = 0; i < sys.s(); ++i) {
        if (st.nu[i] == 0) {
            bl.block0.push_back(i);
            if (st.mu[i] == 0) bl.unit_b_block0.push_back(i);
        } else if (st.nu[i] == 1) {
            bl.block1.push_back(i);
        }
        if (st.nu[i] != 0 && st.mu[i] == 0) bl.low_outside.push_back(i);
    }
    return bl;
}

// Solves the niveau-0 pair sum a x^k == sum b x == 0 mod p over the given
// indices; returns values (indexed like `idx`), never all zero mod p.
std::vector<Int> solve_block0_pair(const DiagLinSystem& sys, const PadicContext& ctx,
                                   const std::vector<long>& idx) {
    const Int& p = ctx.p;
    std::vector<Int> av, bv;
    for (long i : idx) {
        av.push_back(sys.a[i]);
        bv.push_back(sys.b[i]);
    }
    bool some_unit_b = false;
    for (const Int& x : bv)
        if (!divides(p, x)) some_unit_b = true;

    std::vector<Int> vals(idx.size(), Int(0));
    if (!some_unit_b) {
        auto diag = combinat::solve_unit_diagonal_mod_p(av, ctx);
        if (diag.kind != combinat::FpSolution::Solved)
            throw InternalError("niveau-0 diagonal with >= p units failed");
        vals = diag.values;
        return vals;
    }
    if (p == 3) {
        std::vector<std::pair<Int, Int>> pairs;
        for (size_t j = 0; j < av.size(); ++j) pairs.push_back({av[j], bv[j]});
        auto J = combinat::olson_zero_sum(pairs);
        for (long j : J) vals[j] = 1;
        return vals;
    }
    auto pr = combinat::solve_unit_pair_mod_p(av, bv, ctx);
    if (pr.kind != combinat::FpSolution::Solved)
        throw InternalError("niveau-0 pair with >= p+2 units failed");
    vals = pr.values;
    return vals;
}

// Oracle fallback on a block-restricted subsystem, mapping the witness back.
std::optional<EngineOutcome> restricted_oracle(const DiagLinSystem& sys, const PadicContext& ctx,
                                               std::vector<long> idx) {
    if (idx.size() > 22) return std::nullopt;
    DiagLinSystem sub;
    for (long i : idx) {
        sub.a.push_back(sys.a[i]);
        sub.b.push_back(sys.b[i]);
    }
    oracle::CongruenceQuery q{sub, ctx, ctx.gamma, 1ul << 24};
    auto rep = oracle::find_nonsingular(q);
    if (!rep.found) return std::nullopt;
    std::vector<Int> x(sys.s(), Int(0));
    for (size_t j = 0; j < idx.size(); ++j) x[idx[j]] = (*rep.witness)[j];
    auto [pi, pj] = find_pivot(sys, x, ctx);
    if (pi < 0) throw InternalError("oracle witness lost its pivot in the full system");
    EngineOutcome out;
    out.status = EngineOutcome::Solved;
    out.transcript.source = sys;
    out.pair_witness = make_witness(sys, ctx, x, pi, pj);
    out.branch = "restricted-oracle";
    return out;
}

} // namespace

EngineOutcome solve_typeA(const DiagLinSystem& sys, const PadicContext& ctx) {
    const Int& p = ctx.p;
    SystemStats st = stats(sys, ctx);
    EngineOutcome out;
    out.transcript.source = sys;
    if (st.type != SystemType::A) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "not type A";
        return out;
    }
    Blocks bl = split_blocks(sys, st);
    long ups0 = (long)bl.block0.size();
    if (bl.unit_b_block0.empty()) throw InternalError("type A conditioned system lacks a unit b at niveau 0");

    if (Int(ups0) >= p * p + 2) {
        // Unit-b coordinates first so they form the instance's d-vector.
        std::vector<long> order = bl.unit_b_block0;
        for (long i : bl.block0)
            if (divides(p, sys.b[i])) order.push_back(i);
        ModP2Instance inst;
        inst.ctx = ctx;
        for (long i : order) inst.c.push_back(sys.a[i]);
        for (long i : bl.unit_b_block0) inst.d.push_back(sys.b[i]);
        auto sol = solve_mod_p2(inst);
        std::vector<Int> x(sys.s(), Int(0));
        for (size_t j = 0; j < order.size(); ++j) x[order[j]] = sol.x[j];
        out.status = EngineOutcome::Solved;
        out.pair_witness = make_witness(sys, ctx, x, order[sol.pivot_i], order[sol.pivot_j]);
        out.branch = "mod-p2";
        return out;
    }

    long x1i = bl.unit_b_block0[0];
    std::vector<long> rest;
    for (long i : bl.block0)
        if (i != x1i) rest.push_back(i);

    std::vector<Int> vals = solve_block0_pair(sys, ctx, rest);

    std::vector<Int> x(sys.s(), Int(0));
    long unit_j = -1;
    Int asum = 0;
    for (size_t j = 0; j < rest.size(); ++j) {
        x[rest[j]] = vals[j];
        asum += sys.a[rest[j]] * pow_ui(vals[j], ctx.k);
        if (unit_j < 0 && !divides(p, vals[j])) unit_j = rest[j];
    }
    if (unit_j < 0) throw InternalError("niveau-0 solution is trivial mod p");
    Int carry = divexact(asum, p); // exact: the block solution killed A mod p

    if (!divides(p, carry)) {
        std::vector<Int> cj;
        for (long i : bl.block1) cj.push_back(divexact(sys.a[i], p));
        auto hit = combinat::subset_sum_target(cj, p, -carry);
        if (!hit) {
            auto fb = restricted_oracle(sys, ctx, [&] {
                std::vector<long> idx = bl.block0;
                idx.insert(idx.end(), bl.block1.begin(), bl.block1.end());
                return idx;
            }());
            if (fb) return *fb;
            out.status = EngineOutcome::Unresolved;
            out.detail = "carry target unreachable";
            return out;
        }
        for (long j : *hit) x[bl.block1[j]] = 1;
    }
    out.status = EngineOutcome::Solved;
    out.pair_witness = make_witness(sys, ctx, x, x1i, unit_j);
    out.branch = "carry";
    return out;
}

EngineOutcome solve_typeB(const DiagLinSystem& sys, const PadicContext& ctx) {
    const Int& p = ctx.p;
    SystemStats st = stats(sys, ctx);
    EngineOutcome out;
    out.transcript.source = sys;
    if (st.type != SystemType::B) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "not type B";
        return out;
    }
    Blocks bl = split_blocks(sys, st);
    long ups0 = (long)bl.block0.size(), ups1 = (long)bl.block1.size();
    if (bl.low_outside.empty()) throw InternalError("type B without a low variable outside niveau 0");

    if (Int(ups0) >= p * p + 2) {
        if (!bl.unit_b_block0.empty()) {
            std::vector<long> order = bl.unit_b_block0;
            for (long i : bl.block0)
                if (divides(p, sys.b[i])) order.push_back(i);
            ModP2Instance inst;
            inst.ctx = ctx;
            for (long i : order) inst.c.push_back(sys.a[i]);
            for (long i : bl.unit_b_block0) inst.d.push_back(sys.b[i]);
            auto sol = solve_mod_p2(inst);
            std::vector<Int> x(sys.s(), Int(0));
            for (size_t j = 0; j < order.size(); ++j) x[order[j]] = sol.x[j];
            out.status = EngineOutcome::Solved;
            out.pair_witness = make_witness(sys, ctx, x, order[sol.pivot_i], order[sol.pivot_j]);
            out.branch = "mod-p2";
            return out;
        }
        // All niveau-0 linear coefficients divisible: plain subset sum mod p^2.
        std::vector<Int> av;
        for (long i : bl.block0) av.push_back(sys.a[i]);
        auto J = combinat::zero_subset_sum(av, p * p);
        std::vector<Int> x(sys.s(), Int(0));
        for (long j : J) x[bl.block0[j]] = 1;
        out.status = EngineOutcome::Solved;
        out.pair_witness = make_witness(sys, ctx, x, bl.low_outside[0], bl.block0[J[0]]);
        out.branch = "mod-p2-zero-b";
        return out;
    }

    long x1i = bl.unit_b_block0.empty() ? bl.block0[0] : bl.unit_b_block0[0];
    std::vector<long> rest;
    for (long i : bl.block0)
        if (i != x1i) rest.push_back(i);

    std::vector<Int> vals = solve_block0_pair(sys, ctx, rest);
    std::vector<Int> x(sys.s(), Int(0));
    long unit_j = -1;
    Int asum = 0;
    for (size_t j = 0; j < rest.size(); ++j) {
        x[rest[j]] = vals[j];
        asum += sys.a[rest[j]] * pow_ui(vals[j], ctx.k);
        if (unit_j < 0 && !divides(p, vals[j])) unit_j = rest[j];
    }
    if (unit_j < 0) throw InternalError("niveau-0 solution is trivial mod p");
    Int carry = divexact(asum, p);

    // Carry stage: units-first split of the niveau-1 linear coefficients.
    std::vector<long> unit_d, div_d;
    for (long i : bl.block1) (divides(p, sys.b[i]) ? div_d : unit_d).push_back(i);
    long r = (long)unit_d.size();

    auto fallback = [&]() -> EngineOutcome {
        std::vector<long> idx = bl.block0;
        idx.insert(idx.end(), bl.block1.begin(), bl.block1.end());
        for (long i : bl.low_outside) {
            if (idx.size() >= 22) break;
            if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
        }
        auto fb = restricted_oracle(sys, ctx, idx);
        if (fb) return *fb;
        EngineOutcome u;
        u.transcript.source = sys;
        u.status = EngineOutcome::Unresolved;
        u.detail = "carry target unreachable (type B corner)";
        return u;
    };

    // p = 3 exceptional shape: all carriers have unit linear coefficients.
    if (p == 3 && r == ups1 && (ups1 == 3 || ups1 == 4)) {
        if (ups0 < 13 - ups1) throw InternalError("conditioned counts violated");
        std::vector<Int> a9, b9, c3, d3;
        std::vector<long> nine(bl.block0.begin(), bl.block0.begin() + 9);
        for (long i : nine) {
            a9.push_back(sys.a[i]);
            b9.push_back(sys.b[i]);
        }
        std::vector<long> carriers(bl.block1.begin(), bl.block1.begin() + 3);
        for (long i : carriers) {
            c3.push_back(divexact(sys.a[i], p));
            d3.push_back(sys.b[i]);
        }
        auto sol = solve_p3_exceptional(a9, b9, c3, d3);
        std::vector<Int> xx(sys.s(), Int(0));
        for (long j = 0; j < 9; ++j) xx[nine[j]] = sol.x[j];
        for (long j = 0; j < 3; ++j) xx[carriers[j]] = sol.y[j];
        auto [pi, pj] = find_pivot(sys, xx, ctx);
        if (pi < 0) throw InternalError("exceptional solution has no pivot");
        out.status = EngineOutcome::Solved;
        out.pair_witness = make_witness(sys, ctx, xx, pi, pj);
        out.branch = "p3-exceptional";
        return out;
    }

    if (!divides(p, carry)) {
        // Pair unit-d carriers so the linear form cancels; leftovers zeroed.
        std::vector<std::pair<long, long>> pairs;
        {
            std::vector<long> L = unit_d;
            while ((long)L.size() >= 3) {
                auto np = combinat::pair_with_nonzero_sum(
                    {divexact(sys.a[L[0]], p), divexact(sys.a[L[1]], p), divexact(sys.a[L[2]], p)}, p);
                pairs.push_back({L[np.i], L[np.j]});
                long keep = 3 - np.i - np.j;
                std::vector<long> nl{L[keep]};
                nl.insert(nl.end(), L.begin() + 3, L.end());
                L = nl;
            }
        }
        // Variables of the reduced congruence: pair slots and p|d carriers.
        std::vector<Int> coeffs;
        for (auto& [al, be] : pairs) {
            Int e = divexact(sys.a[al], p) * pow_ui(sys.b[be], ctx.k) +
                    divexact(sys.a[be], p) * pow_ui(-sys.b[al], ctx.k);
            if (divides(p, e)) throw InternalError("paired carrier coefficient is not a unit");
            coeffs.push_back(e);
        }
        for (long i : div_d) coeffs.push_back(divexact(sys.a[i], p));
        if (p >= 5 && p.fits_slong_p() && (long)coeffs.size() < p.get_si() - 1)
            throw InternalError("carry congruence has too few variables");
        auto hit = combinat::subset_sum_target(coeffs, p, -carry);
        if (!hit) return fallback();
        for (long h : *hit) {
            if (h < (long)pairs.size()) {
                auto& [al, be] = pairs[h];
                x[al] = sys.b[be];
                x[be] = -sys.b[al];
            } else {
                x[div_d[h - (long)pairs.size()]] = 1;
            }
        }
    }

    auto [pi, pj] = find_pivot(sys, x, ctx);
    if (pi < 0) throw InternalError("type B carry solution has no pivot");
    out.status = EngineOutcome::Solved;
    out.pair_witness = make_witness(sys, ctx, x, pi, pj);
    out.branch = r >= 3 ? "carry-contracted" : "carry";
    return out;
}

EngineOutcome solve(const DiagLinSystem& sys, const PadicContext& ctx) {
    EngineOutcome out;
    out.transcript.source = sys;
    if (ctx.p == 2 || Int(ctx.k) != ctx.p * (ctx.p - 1)) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "k is not p(p-1) for odd p";
        return out;
    }
    if (Int(sys.s()) < Int(ctx.k) * Int(ctx.k) + 2) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "too few variables";
        return out;
    }
    if (!normalize::is_conditioned(sys, ctx)) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "not conditioned";
        return out;
    }
    SystemStats st = stats(sys, ctx);
    return st.type == SystemType::A ? solve_typeA(sys, ctx) : solve_typeB(sys, ctx);
}

} // namespace padlin::ppm1
