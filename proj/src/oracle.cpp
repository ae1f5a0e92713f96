#include "padlin/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace padlin::oracle {

namespace {

struct SupportAnalysis {
    bool has_solution = false;
    std::vector<Int> values; // unit values on the support (full length, zeros off-support)
    std::pair<long, long> pivot{-1, -1};
};

// Pivot minor b_i a_j x_j^(k-1) - b_j a_i x_i^(k-1); x entries are exact integers.
Int minor_at(const DiagLinSystem& sys, const std::vector<Int>& x, long i, long j, unsigned long k) {
    return sys.b[i] * sys.a[j] * pow_ui(x[j], k - 1) - sys.b[j] * sys.a[i] * pow_ui(x[i], k - 1);
}

std::optional<std::pair<long, long>> scan_pivot(const DiagLinSystem& sys, const std::vector<Int>& x,
                                                const Int& p, unsigned long k) {
    long s = sys.s();
    for (long i = 0; i < s; ++i)
        for (long j = i + 1; j < s; ++j)
            if (!divides(p, minor_at(sys, x, i, j, k))) return std::make_pair(i, j);
    return std::nullopt;
}

// Unit values on `tidx` solving sum b_t x_t == 0 mod p (off-support and
// p|b coordinates contribute nothing); lex-least-ish deterministic choice.
std::optional<std::vector<Int>> solve_unit_linear(const std::vector<Int>& b, const std::vector<long>& tidx,
                                                  const Int& p) {
    long m = (long)tidx.size();
    if (m == 0) return std::vector<Int>{};
    if (m == 1) return std::nullopt;
    Int base = 0;
    for (long t = 0; t + 2 < m; ++t) base += b[tidx[t]];
    long u = tidx[m - 2], v = tidx[m - 1];
    Int binv = invmod(mod_pos(b[v], p), p);
    for (Int xu = 1; xu < p; ++xu) {
        Int need = mod_pos(-(base + b[u] * xu), p);
        if (need == 0) continue;
        std::vector<Int> vals(m, 1);
        vals[m - 2] = xu;
        vals[m - 1] = mod_pos(need * binv, p);
        return vals;
    }
    return std::nullopt;
}

// Exact satisfiability analysis of one support for odd p under the collapse
// law.  The A-side congruence has already been checked by the caller.
SupportAnalysis analyze_support_odd(const DiagLinSystem& sys, const PadicContext& ctx,
                                    const std::vector<long>& support, const std::vector<bool>& in_support) {
    const Int& p = ctx.p;
    long s = sys.s();
    SupportAnalysis out;

    std::vector<long> T, U; // unit-b / divisible-b indices inside the support
    bool unit_a_in_S = false;
    bool all_a_unit_on_T = true, all_a_div_on_U = true;
    Int a_sum_T = 0;
    for (long i : support) {
        bool bu = !divides(p, sys.b[i]);
        bool au = !divides(p, sys.a[i]);
        if (au) unit_a_in_S = true;
        if (bu) {
            T.push_back(i);
            if (!au) all_a_unit_on_T = false;
            a_sum_T += sys.a[i];
        } else {
            U.push_back(i);
            if (au) all_a_div_on_U = false;
        }
    }
    if (!unit_a_in_S) return out; // every minor involving S vanishes
    if (T.size() == 1) return out; // linear congruence unsatisfiable

    bool cross_b = false;
    for (long i = 0; i < s && !cross_b; ++i)
        if (!in_support[i] && !divides(p, sys.b[i])) cross_b = true;

    auto assemble = [&](const std::vector<Int>& tvals) {
        std::vector<Int> x(s, 0);
        for (long i : U) x[i] = 1;
        for (size_t t = 0; t < T.size(); ++t) x[T[t]] = tvals[t];
        return x;
    };

    bool prop_cond = !T.empty() && all_a_unit_on_T && all_a_div_on_U && mod_pos(a_sum_T, p) == 0;

    if (cross_b) {
        // Any linear solution works: pivot (i off-support with unit b, j in
        // support with unit a) has unit minor.
        std::optional<std::vector<Int>> tvals =
            T.empty() ? std::optional<std::vector<Int>>(std::vector<Int>{}) : solve_unit_linear(sys.b, T, p);
        if (tvals) {
            out.has_solution = true;
            out.values = assemble(*tvals);
            return out;
        }
        return out;
    }

    // Only pairs inside the support can supply the pivot; those all vanish
    // exactly when (b_i x_i) is proportional to (a_i) on the support.
    if (T.empty()) return out; // b-weighted vector is zero: always proportional

    long m = (long)T.size();
    bool only_proportional = prop_cond && (m == 2 || (p == 3 && m == 3));
    if (only_proportional) return out;

    if (!prop_cond) {
        auto tvals = solve_unit_linear(sys.b, T, p);
        if (!tvals) return out;
        out.has_solution = true;
        out.values = assemble(*tvals);
        return out;
    }

    // Proportional solutions exist but are outnumbered: depth-first over unit
    // assignments on T (last coordinate solved), skipping the at most p-1
    // proportional ones.
    std::vector<Int> tvals(m, 1);
    std::vector<Int> binvT(m), ratio(m);
    for (long t = 0; t < m; ++t) {
        binvT[t] = invmod(mod_pos(sys.b[T[t]], p), p);
        ratio[t] = mod_pos(sys.a[T[t]] * binvT[t], p); // proportional family: x_t = lambda * ratio_t
    }
    auto is_proportional = [&](const std::vector<Int>& v) {
        Int lambda = mod_pos(v[0] * invmod(ratio[0], p), p);
        for (long t = 1; t < m; ++t)
            if (mod_pos(lambda * ratio[t], p) != v[t]) return false;
        return true;
    };
    // Iterate assignments of the first m-1 coordinates in lex order.
    std::vector<Int> free_vals(m - 1, 1);
    Int last_inv = binvT[m - 1];
    unsigned long guard = 0;
    while (true) {
        if (++guard > 4000000ul) throw InternalError("non-proportional search ran away");
        Int sum = 0;
        for (long t = 0; t < m - 1; ++t) sum += sys.b[T[t]] * free_vals[t];
        Int need = mod_pos(-sum, p);
        if (need != 0) {
            for (long t = 0; t < m - 1; ++t) tvals[t] = free_vals[t];
            tvals[m - 1] = mod_pos(need * last_inv, p);
            if (!is_proportional(tvals)) {
                out.has_solution = true;
                out.values = assemble(tvals);
                return out;
            }
        }
        long t = m - 2;
        while (t >= 0 && free_vals[t] == p - 1) {
            free_vals[t] = 1;
            --t;
        }
        if (t < 0) break;
        free_vals[t] += 1;
    }
    return out; // counting said one exists; unreachable in practice
}

OracleReport support_scan(const CongruenceQuery& query) {
    const DiagLinSystem& sys = query.sys;
    const PadicContext& ctx = query.ctx;
    const Int& p = ctx.p;
    long s = sys.s();
    Int mod = pow_ui(p, (unsigned long)query.modulus_exponent);

    OracleReport rep;
    if (s > 62) throw BudgetExceeded("support space too large");
    unsigned long total = 1ul << s;

    std::vector<Int> ared(s);
    for (long i = 0; i < s; ++i) ared[i] = mod_pos(sys.a[i], mod);

    bool small = mod.fits_ulong_p() && mod.get_ui() < (1ul << 62) / (unsigned long)(s + 1);
    std::vector<unsigned long> asm_(s);
    unsigned long msm = small ? mod.get_ui() : 0;
    if (small)
        for (long i = 0; i < s; ++i) asm_[i] = ared[i].get_ui();

    std::vector<bool> in_support(s, false);
    std::vector<long> support;

    // Gray-code walk over supports keeps the running A-side sum incremental.
    unsigned long gray_prev = 0;
    Int asum = mod_pos(sys.const_a, mod);
    unsigned long asum_small = small ? asum.get_ui() : 0;

    for (unsigned long m = 0; m < total; ++m) {
        if (rep.states >= query.budget) return rep; // exhausted stays false
        rep.states++;
        unsigned long gray = m ^ (m >> 1);
        unsigned long diff = gray ^ gray_prev;
        if (diff) {
            long bit = (long)__builtin_ctzl(diff);
            if (gray & diff) {
                in_support[bit] = true;
                if (small)
                    asum_small = (asum_small + asm_[bit]) % msm;
                else
                    asum = mod_pos(asum + ared[bit], mod);
            } else {
                in_support[bit] = false;
                if (small)
                    asum_small = (asum_small + msm - asm_[bit]) % msm;
                else
                    asum = mod_pos(asum - ared[bit], mod);
            }
        }
        gray_prev = gray;
        if (gray == 0) continue;
        bool a_ok = small ? (asum_small == 0) : (asum == 0);
        if (!a_ok) continue;

        support.clear();
        for (long i = 0; i < s; ++i)
            if (in_support[i]) support.push_back(i);

        if (p == 2) { // unit values are forced to 1; B is decided outright
            // Units are forced to 1.
            Int bsum = sys.const_b;
            for (long i : support) bsum += sys.b[i];
            if (mod_pos(bsum, 2) != 0) continue;
            std::vector<Int> x(s, 0);
            for (long i : support) x[i] = 1;
            auto piv = scan_pivot(sys, x, p, ctx.k);
            if (!piv) continue;
            rep.found = true;
            rep.witness = x;
            rep.nonsingular_pivot = piv;
            rep.exhausted = true;
            return rep;
        }

        SupportAnalysis an = analyze_support_odd(sys, ctx, support, in_support);
        if (!an.has_solution) continue;
        auto piv = scan_pivot(sys, an.values, p, ctx.k);
        if (!piv) throw InternalError("support analysis promised a pivot");
        if (mod_pos(eval_a(sys, an.values, ctx.k), mod) != 0 || mod_pos(eval_b(sys, an.values), p) != 0)
            throw InternalError("support analysis produced a non-solution");
        rep.found = true;
        rep.witness = an.values;
        rep.nonsingular_pivot = piv;
        rep.exhausted = true;
        return rep;
    }
    rep.exhausted = true;
    return rep;
}

// Plain enumeration over the value space; used for generic contexts and for
// cross-checking the support scan.  Residue tables keep the hot loop in
// machine words.
OracleReport value_scan(const CongruenceQuery& query, bool stop_at_first) {
    const DiagLinSystem& sys = query.sys;
    const Int& p = query.ctx.p;
    unsigned long k = query.ctx.k;
    long s = sys.s();
    Int mod = pow_ui(p, (unsigned long)query.modulus_exponent);
    if (!mod.fits_ulong_p() || !p.fits_ulong_p()) throw BudgetExceeded("modulus too large for value scan");
    unsigned long m = mod.get_ui();
    unsigned long pm = p.get_ui();
    if (m >= (1ul << 20)) throw BudgetExceeded("modulus too large for value scan");

    double space = 1;
    for (long i = 0; i < s; ++i) space *= (double)m;
    if (space > (double)query.budget) throw BudgetExceeded("value space exceeds budget");

    // ta[i][v] = a_i v^k mod m; tb[i][v] = b_i v mod p.
    std::vector<std::vector<unsigned long>> ta(s), tb(s);
    std::vector<unsigned long> powk(m);
    for (unsigned long v = 0; v < m; ++v) powk[v] = modpow(Int(v), Int(k), mod).get_ui();
    for (long i = 0; i < s; ++i) {
        ta[i].resize(m);
        tb[i].resize(m);
        unsigned long ai = mod_pos(sys.a[i], mod).get_ui();
        unsigned long bi = mod_pos(sys.b[i], p).get_ui();
        for (unsigned long v = 0; v < m; ++v) {
            ta[i][v] = (ai * powk[v]) % m;
            tb[i][v] = (bi * (v % pm)) % pm;
        }
    }
    unsigned long ca = mod_pos(sys.const_a, mod).get_ui();
    unsigned long cb = mod_pos(sys.const_b, p).get_ui();

    OracleReport rep;
    std::vector<unsigned long> x(s, 0);
    // partial[i] = (A-sum, B-sum, nonzero-count) over coordinates < i.
    std::vector<unsigned long> pa(s + 1, 0), pb(s + 1, 0), pnz(s + 1, 0);
    pa[0] = ca;
    pb[0] = cb;
    for (long i = 0; i < s; ++i) {
        pa[i + 1] = (pa[i] + ta[i][0]) % m;
        pb[i + 1] = (pb[i] + tb[i][0]) % pm;
        pnz[i + 1] = pnz[i];
    }
    while (true) {
        rep.states++;
        if (pnz[s] > 0 && pa[s] == 0 && pb[s] == 0) {
            std::vector<Int> xi(s);
            for (long i = 0; i < s; ++i) xi[i] = Int(x[i]);
            auto piv = scan_pivot(sys, xi, p, k);
            if (piv) {
                rep.found = true;
                rep.witness = xi;
                rep.nonsingular_pivot = piv;
                rep.exhausted = true;
                if (stop_at_first) return rep;
            }
        }
        long i = s - 1;
        while (i >= 0 && x[i] == m - 1) {
            x[i] = 0;
            --i;
        }
        if (i < 0) break;
        x[i] += 1;
        for (long j = i; j < s; ++j) {
            pa[j + 1] = (pa[j] + ta[j][x[j]]) % m;
            pb[j + 1] = (pb[j] + tb[j][x[j]]) % pm;
            pnz[j + 1] = pnz[j] + (x[j] != 0 ? 1 : 0);
        }
    }
    rep.exhausted = true;
    return rep;
}

} // namespace

OracleReport find_nonsingular(const CongruenceQuery& query) {
    if (query.modulus_exponent < 1) throw InvalidInput("modulus exponent must be >= 1");
    if (query.budget == 0) throw InvalidInput("budget must be positive");
    const PadicContext& ctx = query.ctx;
    bool collapse_ok = ctx.tau.has_value() && query.modulus_exponent <= ctx.gamma;
    // The odd-p support analysis assumes a homogeneous linear congruence.
    if (collapse_ok && ctx.p != 2 && !divides(ctx.p, query.sys.const_b)) collapse_ok = false;
    if (collapse_ok) return support_scan(query);
    return value_scan(query, true);
}

bool find_nonsingular_naive(const CongruenceQuery& query) {
    return value_scan(query, true).found;
}

std::vector<OracleSolution> enumerate_solutions(const CongruenceQuery& query) {
    const DiagLinSystem& sys = query.sys;
    const PadicContext& ctx = query.ctx;
    const Int& p = ctx.p;
    long s = sys.s();
    if (!ctx.tau || query.modulus_exponent > ctx.gamma)
        throw ContextNotApplicable("enumerate_solutions needs the collapse law");
    if (s > 30) throw BudgetExceeded("support space too large");
    Int mod = pow_ui(p, (unsigned long)query.modulus_exponent);

    std::vector<OracleSolution> out;
    unsigned long total = 1ul << s;
    if (total > query.budget) throw BudgetExceeded("support space exceeds budget");
    for (unsigned long m = 1; m < total; ++m) {
        std::vector<long> support;
        std::vector<bool> in_support(s, false);
        Int asum = sys.const_a;
        for (long i = 0; i < s; ++i)
            if (m & (1ul << i)) {
                support.push_back(i);
                in_support[i] = true;
                asum += sys.a[i];
            }
        if (mod_pos(asum, mod) != 0) continue;
        if (p == 2) {
            Int bsum = sys.const_b;
            for (long i : support) bsum += sys.b[i];
            if (mod_pos(bsum, 2) != 0) continue;
            OracleSolution solu;
            solu.support = support;
            solu.values.assign(s, 0);
            for (long i : support) solu.values[i] = 1;
            out.push_back(std::move(solu));
            continue;
        }
        std::vector<long> T;
        for (long i : support)
            if (!divides(p, sys.b[i])) T.push_back(i);
        std::optional<std::vector<Int>> tvals =
            T.empty() ? std::optional<std::vector<Int>>(std::vector<Int>{}) : solve_unit_linear(sys.b, T, p);
        if (!tvals) continue;
        OracleSolution solu;
        solu.support = support;
        solu.values.assign(s, 0);
        for (long i : support) solu.values[i] = 1;
        for (size_t t = 0; t < T.size(); ++t) solu.values[T[t]] = (*tvals)[t];
        out.push_back(std::move(solu));
    }
    return out;
}

GammaStarReport gamma_star_bruteforce(unsigned long k, const Int& p, unsigned long l, unsigned long budget) {
    if (l < 1) throw InvalidInput("l must be >= 1");
    Int modz = pow_ui(p, l);
    if (!modz.fits_ulong_p() || modz.get_ui() > (1ul << 20)) throw BudgetExceeded("modulus too large");
    unsigned long m = modz.get_ui();
    unsigned long pu = p.get_ui();

    GammaStarReport rep;

    // Value tables: W = all k-th powers mod p^l, V = unit k-th powers.
    std::set<unsigned long> Wset, Vset;
    for (unsigned long x = 0; x < m; ++x) {
        unsigned long w = modpow(Int(x), Int(k), modz).get_ui();
        Wset.insert(w);
        if (x % pu != 0) Vset.insert(w);
    }
    std::vector<unsigned long> W(Wset.begin(), Wset.end());

    // Coefficients only matter up to multiplication by a unit k-th power:
    // coset representatives of units modulo the unit-power value group.
    std::vector<unsigned long> reps;
    std::vector<bool> covered(m, false);
    for (unsigned long u = 1; u < m; ++u) {
        if (u % pu == 0 || covered[u]) continue;
        reps.push_back(u);
        for (unsigned long v : Vset) covered[(u * v) % m] = true;
    }

    // Solubility of one tuple: residue reachability with a "unit used" flag.
    auto soluble = [&](const std::vector<unsigned long>& c) {
        std::vector<bool> reach[2];
        reach[0].assign(m, false);
        reach[1].assign(m, false);
        reach[0][0] = true;
        for (unsigned long ci : c) {
            std::vector<bool> nxt[2] = {reach[0], reach[1]};
            for (int f = 0; f < 2; ++f)
                for (unsigned long r = 0; r < m; ++r) {
                    if (!reach[f][r]) continue;
                    for (unsigned long w : W) {
                        unsigned long nr = (r + ci * w) % m;
                        int nf = f | (Vset.count(w) ? 1 : 0);
                        nxt[nf][nr] = true;
                    }
                }
            reach[0] = nxt[0];
            reach[1] = nxt[1];
            rep.states += 2 * m;
        }
        return bool(reach[1][0]);
    };

    for (unsigned long t = 1; t <= 4 * k + 16; ++t) {
        // Tuples normalized to c_1 = 1; the rest over coset representatives.
        std::vector<unsigned long> idx(t > 0 ? t - 1 : 0, 0);
        bool all_ok = true;
        while (true) {
            if (rep.states > budget) {
                // gamma* >= t is proven: level t-1 (or the trivial t=1 start)
                // already produced an insoluble tuple.
                rep.value = (long)t;
                rep.exhausted = false;
                return rep;
            }
            std::vector<unsigned long> c{1};
            for (unsigned long i : idx) c.push_back(reps[i]);
            if (!soluble(c)) {
                all_ok = false;
                rep.hardest_tuple.clear();
                for (unsigned long ci : c) rep.hardest_tuple.push_back(Int(ci));
                break;
            }
            long i = (long)idx.size() - 1;
            while (i >= 0 && idx[i] == reps.size() - 1) {
                idx[i] = 0;
                --i;
            }
            if (i < 0) break;
            idx[i] += 1;
        }
        if (all_ok) {
            rep.value = (long)t;
            rep.exhausted = true;
            return rep;
        }
    }
    throw InternalError("gamma_star_bruteforce: no t found below cap");
}

} // namespace padlin::oracle
