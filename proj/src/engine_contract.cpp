#include "padlin/engine_contract.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace padlin::contract_engine {

std::pair<DiagonalEquation, Transcript> contract_linear(const DiagLinSystem& sys, const PadicContext& ctx) {
    if (!sys.homogeneous()) throw InvalidInput("contract_linear expects a homogeneous system");
    long s = sys.s();
    if (s < 2) throw InvalidInput("need at least two variables");

    // Stable sort moving unit-b variables first, then pair consecutively.
    std::vector<long> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](long i, long j) {
        return (divides(ctx.p, sys.b[i]) ? 1 : 0) < (divides(ctx.p, sys.b[j]) ? 1 : 0);
    });

    long t = s / 2;
    TransformStep st;
    st.actions.resize(s);
    st.new_size = std::max<long>(t, 2);
    st.note = "pairwise contraction of the linear form";
    DiagonalEquation eq;
    eq.k = ctx.k;
    eq.p = ctx.p;
    for (long l = 0; l < t; ++l) {
        long i = order[2 * l], j = order[2 * l + 1];
        Int u1 = sys.b[j], u2 = -sys.b[i];
        if (u1 == 0 && u2 == 0) u1 = u2 = 1;
        if (u1 != 0)
            st.actions[i] = {VarAction::Map, l, Rat(u1), Rat(0)};
        else
            st.actions[i] = {VarAction::Zero, -1, Rat(1), Rat(0)};
        if (u2 != 0)
            st.actions[j] = {VarAction::Map, l, Rat(u2), Rat(0)};
        else
            st.actions[j] = {VarAction::Zero, -1, Rat(1), Rat(0)};
        // Linear coefficient of the merged variable vanishes by construction.
        if (sys.b[i] * u1 + sys.b[j] * u2 != 0) throw InternalError("contraction failed to kill the linear form");
        eq.c.push_back(sys.a[i] * pow_ui(u1, ctx.k) + sys.a[j] * pow_ui(u2, ctx.k));
    }
    if (2 * t < s) st.actions[order[s - 1]] = {VarAction::Zero, -1, Rat(1), Rat(0)};
    while ((long)eq.c.size() < st.new_size) eq.c.push_back(0);

    Transcript tr;
    tr.source = sys;
    tr.append(st);
    DiagLinSystem derived = tr.replay(ctx.k);
    for (long l = 0; l < st.new_size; ++l) {
        if (derived.a[l] != eq.c[l]) throw InternalError("contracted coefficients disagree with transcript");
        if (derived.b[l] != 0) throw InternalError("contracted linear form is nonzero");
    }
    return {eq, tr};
}

namespace {

// Search one residue-reachability layer per variable for a congruence point
// with a unit value at a unit coefficient; complete over the residue space.
struct ReachSearch {
    bool found = false;
    std::vector<Int> values; // residues in [0, mod)
    long pivot = -1;
};

ReachSearch reach_search(const std::vector<Int>& c, const Int& p, unsigned long k, long gamma_prime,
                         unsigned long budget) {
    Int modz = pow_ui(p, (unsigned long)gamma_prime);
    ReachSearch out;
    if (!modz.fits_ulong_p()) throw BudgetExceeded("residue space too large");
    unsigned long m = modz.get_ui();
    long n = (long)c.size();
    if ((unsigned long)n * m * 4 > budget) throw BudgetExceeded("residue search exceeds budget");

    // Distinct k-th power values mod p^gamma' with a representative and a
    // unit flag.
    std::vector<std::pair<unsigned long, unsigned long>> powers; // (value, representative)
    std::vector<bool> seen(m, false);
    std::vector<bool> unitflag(m, false);
    std::vector<unsigned long> repr(m, 0);
    for (unsigned long x = 0; x < m; ++x) {
        unsigned long w = modpow(Int(x), Int(k), modz).get_ui();
        bool u = !divides(p, Int(x));
        if (!seen[w]) {
            seen[w] = true;
            repr[w] = x;
            unitflag[w] = u;
            powers.push_back({w, x});
        } else if (u && !unitflag[w]) {
            unitflag[w] = true;
            repr[w] = x;
        }
    }
    for (auto& pw : powers) pw.second = repr[pw.first];

    // state = residue * 2 + pivot_flag; predecessor chain for reconstruction.
    struct Pred {
        long var = -1;
        unsigned long value = 0; // chosen x for var
        unsigned long prev = 0;
        bool used_pivot = false;
    };
    std::vector<char> reached(2 * m, 0);
    std::vector<Pred> pred(2 * m);
    reached[0] = 1;
    std::vector<unsigned long> cred(n);
    for (long i = 0; i < n; ++i) cred[i] = mod_pos(c[i], modz).get_ui();

    for (long i = 0; i < n; ++i) {
        std::vector<std::pair<unsigned long, Pred>> fresh;
        bool ci_unit = !divides(p, c[i]);
        for (unsigned long stt = 0; stt < 2 * m; ++stt) {
            if (!reached[stt]) continue;
            unsigned long r = stt >> 1;
            bool flag = stt & 1;
            for (auto& [w, xrep] : powers) {
                bool xu = unitflag[w];
                unsigned long nr = (r + cred[i] * w % m) % m;
                bool nf = flag || (ci_unit && xu && xrep != 0);
                unsigned long nst = nr * 2 + (nf ? 1 : 0);
                if (!reached[nst]) {
                    Pred pd;
                    pd.var = i;
                    pd.value = xrep;
                    pd.prev = stt;
                    pd.used_pivot = !flag && nf;
                    fresh.push_back({nst, pd});
                }
            }
        }
        for (auto& [nst, pd] : fresh)
            if (!reached[nst]) {
                reached[nst] = 1;
                pred[nst] = pd;
            }
        if (reached[1]) break;
    }
    if (!reached[1]) return out;

    out.found = true;
    out.values.assign(n, Int(0));
    unsigned long cur = 1;
    while (cur != 0) {
        Pred& pd = pred[cur];
        if (pd.var < 0) break;
        out.values[pd.var] = Int(pd.value);
        if (pd.used_pivot) out.pivot = pd.var;
        cur = pd.prev;
    }
    if (out.pivot < 0) throw InternalError("reach search lost its pivot");
    return out;
}

std::optional<DiagonalOutcome> try_exact_shortcuts(const DiagonalEquation& eq) {
    long n = (long)eq.c.size();
    for (long i = 0; i < n; ++i)
        if (eq.c[i] == 0) {
            DiagonalOutcome out;
            out.status = DiagonalOutcome::ExactSolution;
            out.x.assign(n, Rat(0));
            out.x[i] = 1;
            out.detail = "zero coefficient";
            return out;
        }
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j) {
            if (eq.c[i] + eq.c[j] == 0) {
                DiagonalOutcome out;
                out.status = DiagonalOutcome::ExactSolution;
                out.x.assign(n, Rat(0));
                out.x[i] = 1;
                out.x[j] = 1;
                out.detail = "cancelling pair";
                return out;
            }
            if ((eq.k % 2 == 1) && eq.c[i] - eq.c[j] == 0) {
                DiagonalOutcome out;
                out.status = DiagonalOutcome::ExactSolution;
                out.x.assign(n, Rat(0));
                out.x[i] = 1;
                out.x[j] = -1;
                out.detail = "cancelling pair";
                return out;
            }
        }
    return std::nullopt;
}

} // namespace

DiagLinSystem diagonal_as_system(const DiagonalEquation& eq) {
    DiagLinSystem sys;
    sys.a = eq.c;
    sys.b.assign(eq.c.size(), Int(0));
    return sys;
}

DiagonalOutcome solve_diagonal(const DiagonalEquation& eq, long M, unsigned long budget) {
    if (auto sc = try_exact_shortcuts(eq)) return *sc;

    const Int& p = eq.p;
    unsigned long k = eq.k;
    long n = (long)eq.c.size();
    PadicContext ctx = make_context(p, k);
    // The Newton pivot has derivative valuation v_p(k); the congruence level
    // must exceed twice that for the lift, whatever tau is.
    long gamma_prime = std::max(ctx.tau ? ctx.gamma : 1L, 2 * vp(Int((unsigned long)k), p) + 1);

    DiagonalOutcome out;

    // Try the raw equation and each niveau rotation: multiply chosen
    // variables by p and divide the equation by p, exactly as in
    // conditioning, to expose different residue patterns.
    std::vector<Int> c = eq.c;
    std::vector<Rat> mult(n, Rat(1)); // y_original = mult * y_current
    std::vector<TransformStep> steps;
    {
        TransformStep red = identity_step(n);
        bool any = false;
        for (long i = 0; i < n; ++i) {
            long alpha = vp(c[i], p) / (long)k;
            if (alpha > 0 && vp(c[i], p) < kValInf) {
                c[i] = divexact(c[i], pow_ui(p, (unsigned long)(alpha * (long)k)));
                mult[i] /= Rat(pow_ui(p, (unsigned long)alpha));
                red.actions[i].mult = Rat(1) / Rat(pow_ui(p, (unsigned long)alpha));
                any = true;
            }
        }
        red.note = "reduce degree valuations below k";
        if (any) steps.push_back(red);
    }
    for (long round = 0; round <= (long)k; ++round) {
        ReachSearch rs;
        try {
            rs = reach_search(c, p, k, gamma_prime, budget);
        } catch (const BudgetExceeded&) {
            out.status = DiagonalOutcome::Unresolved;
            out.detail = "residue search budget exceeded";
            return out;
        }
        if (rs.found) {
            // Freeze everything except the pivot and lift the pivot by Newton.
            std::vector<Int> f(k + 1, Int(0));
            f[k] = c[rs.pivot];
            for (long i = 0; i < n; ++i)
                if (i != rs.pivot) f[0] += c[i] * pow_ui(rs.values[i], k);
            long e = vp(Int(k) * c[rs.pivot], p); // derivative valuation at a unit point
            if (vp(poly_eval(f, rs.values[rs.pivot]), p) > 2 * e) {
                hensel::PolyRootWitness w;
                w.ctx = ctx;
                w.system.a = c;
                w.system.b.assign(n, Int(0));
                for (long i = 0; i < n; ++i)
                    if (i != rs.pivot) w.frozen.push_back({i, rs.values[i]});
                w.var_x = rs.pivot;
                w.poly = f;
                w.theta_scale = 0;
                w.point = rs.values[rs.pivot];
                auto chk = hensel::check_poly_root_witness(w);
                if (!chk.ok) throw InternalError("diagonal witness failed self-check: " + chk.failure);
                auto lifted = hensel::lift_poly_root(w, M + (long)k + round + 1);
                out.status = DiagonalOutcome::Lifted;
                out.steps = steps;
                out.x.resize(n);
                for (long i = 0; i < n; ++i) out.x[i] = mult[i] * lifted.x[i];
                out.unit_index = 0;
                for (long i = 1; i < n; ++i)
                    if (out.x[i] != 0 &&
                        (out.x[out.unit_index] == 0 || vp_rat(out.x[i], p) < vp_rat(out.x[out.unit_index], p)))
                        out.unit_index = i;
                out.witness = w;
                out.detail = "residue search + Newton lift (rotation " + std::to_string(round) + ")";
                // Residual of the original equation after undoing rotations.
                Rat resid(0);
                for (long i = 0; i < n; ++i) resid += Rat(eq.c[i]) * pow_rat_ui(out.x[i], k);
                if (resid != 0 && vp_rat(resid, p) < M) throw InternalError("diagonal lift residual too small");
                return out;
            }
        }
        if (round == (long)k) break;
        // Rotate: variables at niveau 0 get multiplied by p, equation /p.
        TransformStep rot = identity_step(n);
        for (long i = 0; i < n; ++i) {
            if (vp(c[i], p) == 0) {
                c[i] = c[i] * pow_ui(p, k);
                mult[i] *= Rat(p);
                rot.actions[i].mult = Rat(p);
            }
        }
        for (long i = 0; i < n; ++i) c[i] = divexact(c[i], p);
        rot.scale_a = Rat(1) / Rat(p);
        rot.note = "rotate niveau blocks";
        steps.push_back(rot);
    }
    out.status = DiagonalOutcome::Unresolved;
    out.detail = "no liftable congruence point found";
    return out;
}

Dispatch dispatch_case(const PadicContext& ctx) {
    if (ctx.k < 4) throw InvalidInput("dispatch requires k >= 4");
    Dispatch d;
    unsigned long k = ctx.k;
    const Int& p = ctx.p;
    if (k % 2 == 1) {
        d.odd_degree_out_of_scope = true;
        d.tag = EngineTag::Contract;
        d.coverage = "odd degree: contraction attempted without a covering bound";
        return d;
    }
    if (p == 2 && (k == 4 || k == 8 || k == 16 || k == 32)) {
        d.tag = EngineTag::Pow2;
        return d;
    }
    if (p != 2 && Int(k) == p - 1) {
        d.tag = EngineTag::Pm1;
        return d;
    }
    if (p != 2 && Int(k) == p * (p - 1)) {
        d.tag = EngineTag::Ppm1;
        return d;
    }
    d.tag = EngineTag::Contract;
    if (p == 2)
        d.coverage = "2-adic contraction bound (k >= 5, k not 8/16/32)";
    else if (!divides(p, Int(k)))
        d.coverage = "odd-p contraction bound, p not dividing k";
    else
        d.coverage = "odd-p contraction bound, p dividing k";
    return d;
}

} // namespace padlin::contract_engine
