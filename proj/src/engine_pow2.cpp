#include "padlin/engine_pow2.hpp"

#include <algorithm>

#include "padlin/normalize.hpp"

namespace padlin::pow2 {

namespace {

const Int kTwo(2);

long odd_part_mod4(const ContractionClass& cl) {
    return (long)mpz_tstbit(unit_part(cl.c, kTwo).get_mpz_t(), 1); // 0: ==1 mod 4, 1: ==3 mod 4
}

} // namespace

ContractionState seed_state(const DiagLinSystem& sys, const PadicContext& ctx, long max_niveau,
                            const std::vector<long>& skip) {
    ContractionState st;
    st.sys = sys;
    st.ctx = ctx;
    SystemStats s = stats(sys, ctx);
    for (long i = 0; i < sys.s(); ++i) {
        if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
        if (s.nu[i] > max_niveau) continue;
        ContractionClass cl;
        cl.members = {i};
        cl.c = sys.a[i];
        cl.d = sys.b[i];
        cl.primary = (s.nu[i] == 0);
        st.classes.push_back(cl);
    }
    return st;
}

long merge(ContractionState& st, long id1, long id2) {
    if (id1 == id2) throw InternalError("merge of a class with itself");
    ContractionClass& a = st.classes[id1];
    ContractionClass& b = st.classes[id2];
    if (!a.alive || !b.alive) throw InternalError("merge of a dead class");
    a.members.insert(a.members.end(), b.members.begin(), b.members.end());
    a.c += b.c;
    a.d += b.d;
    a.primary = a.primary || b.primary;
    b.alive = false;
    st.merges++;
    return id1;
}

void drop(ContractionState& st, long id) {
    ContractionClass& a = st.classes[id];
    if (!a.alive) throw InternalError("drop of a dead class");
    st.zeroed.insert(st.zeroed.end(), a.members.begin(), a.members.end());
    a.alive = false;
}

namespace {

// Two even classes at niveau >= nu, at least one exact or one strictly
// higher: produce an even class at niveau >= nu+1 (primary if either was).
long combine_even_pair(ContractionState& st, long a, long b, long nu) {
    const Int& p = st.ctx.p;
    long na = st.classes[a].niveau(p), nb = st.classes[b].niveau(p);
    if (!st.classes[a].even() || !st.classes[b].even()) throw RuleViolation("pair classes must be even");
    if (na < nu || nb < nu) throw RuleViolation("pair classes below the stated niveau");
    long id;
    if (na == nu && nb == nu) {
        id = merge(st, a, b);
    } else if (na > nu) {
        drop(st, b);
        id = a;
    } else {
        drop(st, a);
        id = b;
    }
    if (st.classes[id].niveau(p) < nu + 1 || !st.classes[id].even())
        throw RuleViolation("even pair did not gain a niveau");
    return id;
}

// Primary even + secondary even at exact niveau nu.
long combine_P_S(ContractionState& st, long pid, long sid, long nu) {
    const Int& p = st.ctx.p;
    if (!st.classes[pid].primary) throw RuleViolation("expected a primary class");
    if (st.classes[sid].niveau(p) != nu) throw RuleViolation("secondary not at the exact niveau");
    long id;
    if (st.classes[pid].niveau(p) == nu) {
        id = merge(st, pid, sid);
    } else {
        drop(st, sid);
        id = pid;
    }
    if (st.classes[id].niveau(p) < nu + 1 || !st.classes[id].even() || !st.classes[id].primary)
        throw RuleViolation("primary-secondary pair did not gain a niveau");
    return id;
}

// Parity-correcting merge: two odd classes at niveaux i < j give an even
// class at exact niveau i.
long combine_odd_pair_cross(ContractionState& st, long a, long b) {
    const Int& p = st.ctx.p;
    long na = st.classes[a].niveau(p), nb = st.classes[b].niveau(p);
    if (st.classes[a].even() || st.classes[b].even()) throw RuleViolation("parity correction needs odd classes");
    if (na == nb) throw RuleViolation("parity correction needs distinct niveaux");
    long lo = std::min(na, nb);
    long id = merge(st, a, b);
    if (st.classes[id].niveau(p) != lo || !st.classes[id].even())
        throw RuleViolation("parity correction failed");
    return id;
}

// Merge two same-parity secondaries at exact niveau nu whose odd parts agree
// mod 4: exact niveau nu+1.
long combine_S_pair_matching(ContractionState& st, long a, long b, long nu) {
    const Int& p = st.ctx.p;
    if (st.classes[a].niveau(p) != nu || st.classes[b].niveau(p) != nu)
        throw RuleViolation("secondary pair not at the exact niveau");
    if (st.classes[a].even() != st.classes[b].even()) throw RuleViolation("secondary pair parities differ");
    if (odd_part_mod4(st.classes[a]) != odd_part_mod4(st.classes[b]))
        throw RuleViolation("secondary pair odd parts differ mod 4");
    long id = merge(st, a, b);
    if (st.classes[id].niveau(p) != nu + 1) throw RuleViolation("matched secondary pair missed niveau+1");
    return id;
}

// Pair same-niveau secondaries (same parity within each pair, mod-4 matched)
// until at most `leave` remain; mixed parities allowed across pairs when
// `same_parity_only` is false.  Returns produced niveau+1 ids; `ids` keeps
// the leftovers.
std::vector<long> pair_down(ContractionState& st, std::vector<long>& ids, long nu, long leave,
                            bool same_parity_only) {
    std::vector<long> produced;
    auto find_pair = [&]() -> std::pair<long, long> {
        for (size_t i = 0; i < ids.size(); ++i)
            for (size_t j = i + 1; j < ids.size(); ++j) {
                if (same_parity_only && st.classes[ids[i]].even() != st.classes[ids[j]].even()) continue;
                if (st.classes[ids[i]].even() != st.classes[ids[j]].even()) continue;
                if (odd_part_mod4(st.classes[ids[i]]) == odd_part_mod4(st.classes[ids[j]]))
                    return {(long)i, (long)j};
            }
        return {-1, -1};
    };
    while ((long)ids.size() > leave) {
        if ((long)ids.size() < 2) break;
        auto [i, j] = find_pair();
        if (i < 0) break; // fewer than three left, or no match
        produced.push_back(combine_S_pair_matching(st, ids[i], ids[j], nu));
        ids.erase(ids.begin() + j);
        ids.erase(ids.begin() + i);
    }
    return produced;
}

} // namespace

long contract_even_same_niveau(ContractionState& st, std::vector<long> ids, long nu, long l) {
    const Int& p = st.ctx.p;
    if (l < 1 || (long)ids.size() != (1L << l)) throw PreconditionViolated("need 2^l classes");
    std::vector<long> P, S;
    for (long id : ids) {
        if (!st.classes[id].even()) throw PreconditionViolated("classes must be even");
        if (st.classes[id].primary)
            P.push_back(id);
        else {
            if (st.classes[id].niveau(p) != nu) throw PreconditionViolated("secondary not at exact niveau");
            S.push_back(id);
        }
        if (st.classes[id].niveau(p) < nu) throw PreconditionViolated("class below stated niveau");
    }
    if (P.empty()) throw PreconditionViolated("need a primary class");

    if (l == 1) {
        long id = (S.empty()) ? combine_even_pair(st, P[0], P[1], nu) : combine_P_S(st, P[0], S[0], nu);
        if (!st.classes[id].primary) throw RuleViolation("result lost primality");
        return id;
    }

    std::vector<long> next;
    long m = (long)S.size();
    if (m == 0) {
        for (size_t t = 0; t + 1 < P.size(); t += 2) next.push_back(combine_even_pair(st, P[t], P[t + 1], nu));
    } else if (m % 2 == 0) {
        auto up = pair_down(st, S, nu, 2, true);
        next.insert(next.end(), up.begin(), up.end());
        next.push_back(combine_P_S(st, P[0], S[0], nu));
        next.push_back(combine_P_S(st, P[1], S[1], nu));
        for (size_t t = 2; t + 1 < P.size(); t += 2) next.push_back(combine_even_pair(st, P[t], P[t + 1], nu));
    } else {
        auto up = pair_down(st, S, nu, 1, true);
        next.insert(next.end(), up.begin(), up.end());
        next.push_back(combine_P_S(st, P[0], S[0], nu));
        for (size_t t = 1; t + 1 < P.size(); t += 2) next.push_back(combine_even_pair(st, P[t], P[t + 1], nu));
    }
    if ((long)next.size() != (1L << (l - 1))) throw InternalError("halving step miscounted");
    // Recurse one niveau up.  Promote classes that overshot: they are valid
    // "P_(nu+1)" members only if primary; secondary overshoots are dropped
    // and replaced is impossible, so assert exactness instead.
    std::sort(next.begin(), next.end(), [&](long x, long y) {
        return st.classes[x].primary > st.classes[y].primary;
    });
    return contract_even_same_niveau(st, next, nu + 1, l - 1);
}

long contract_even_spread(ContractionState& st, std::vector<long> ids, long nu, long l) {
    const Int& p = st.ctx.p;
    if (l < 0 || (long)ids.size() != (2L << l)) throw PreconditionViolated("need 2^(l+1) classes");
    std::vector<long> P, S;
    for (long id : ids) {
        if (!st.classes[id].even()) throw PreconditionViolated("classes must be even");
        if (st.classes[id].primary)
            P.push_back(id);
        else
            S.push_back(id);
    }
    if ((long)P.size() < (1L << l)) throw PreconditionViolated("need 2^l primary classes");
    for (long id : S) {
        long nv = st.classes[id].niveau(p);
        if (nv < nu || nv > nu + l) throw PreconditionViolated("secondary niveau out of range");
    }
    if (l == 0) return contract_even_same_niveau(st, ids, nu, 1);

    long top = -1;
    for (long id : S)
        if (st.classes[id].niveau(p) == nu + l) top = id;
    if (top >= 0) {
        std::vector<long> sub(P.begin(), P.begin() + (1L << l));
        long pid = contract_even_same_niveau(st, sub, nu, l);
        return combine_P_S(st, pid, top, nu + l);
    }
    // Split into halves, each with half the primaries.
    std::vector<long> h1, h2;
    for (size_t t = 0; t < P.size(); ++t) (t % 2 ? h2 : h1).push_back(P[t]);
    for (size_t t = 0; t < S.size(); ++t) (h1.size() <= h2.size() ? h1 : h2).push_back(S[t]);
    while ((long)h1.size() > (1L << l)) {
        h2.push_back(h1.back());
        h1.pop_back();
    }
    while ((long)h2.size() > (1L << l)) {
        h1.push_back(h2.back());
        h2.pop_back();
    }
    long r1 = contract_even_spread(st, h1, nu, l - 1);
    long r2 = contract_even_spread(st, h2, nu, l - 1);
    return combine_even_pair(st, r1, r2, nu + l);
}

long contract_mixed_same_niveau(ContractionState& st, std::vector<long> ids, long nu, long l) {
    const Int& p = st.ctx.p;
    if (l < 1 || (long)ids.size() != (1L << l) + 2) throw PreconditionViolated("need 2^l + 2 classes");
    std::vector<long> P, Se, So;
    for (long id : ids) {
        if (st.classes[id].primary) {
            if (!st.classes[id].even()) throw PreconditionViolated("primaries must be even here");
            P.push_back(id);
        } else if (st.classes[id].even())
            Se.push_back(id);
        else
            So.push_back(id);
        if (!st.classes[id].primary && st.classes[id].niveau(p) != nu)
            throw PreconditionViolated("secondary not at exact niveau");
        if (st.classes[id].primary && st.classes[id].niveau(p) < nu)
            throw PreconditionViolated("primary below stated niveau");
    }
    if ((long)P.size() < 2) throw PreconditionViolated("need two primary classes");

    if (l == 1) return combine_even_pair(st, P[0], P[1], nu);

    std::vector<long> next;
    auto upSo = pair_down(st, So, nu, (long)(So.size() % 2 ? 1 : 2), true);
    auto upSe = pair_down(st, Se, nu, (long)(Se.size() % 2 ? 1 : 2), true);
    next.insert(next.end(), upSo.begin(), upSo.end());
    next.insert(next.end(), upSe.begin(), upSe.end());
    // Leftover even secondaries pair with primaries; leftover primaries pair
    // among themselves.
    size_t pi = 0;
    for (long sid : Se) {
        if (pi >= P.size()) break;
        next.push_back(combine_P_S(st, P[pi++], sid, nu));
    }
    for (; pi + 1 < P.size(); pi += 2) next.push_back(combine_even_pair(st, P[pi], P[pi + 1], nu));

    long need = 1L << (l - 1);
    std::sort(next.begin(), next.end(), [&](long x, long y) {
        bool px = st.classes[x].primary, py = st.classes[y].primary;
        if (px != py) return px > py;
        return x < y;
    });
    if ((long)next.size() < need) throw InternalError("mixed same-niveau contraction miscounted");
    if (!st.classes[next[0]].primary) throw InternalError("mixed contraction lost all primaries");
    next.resize(need);
    return contract_even_same_niveau(st, next, nu + 1, l - 1);
}

long contract_mixed_spread(ContractionState& st, std::vector<long> ids, long nu, long l) {
    const Int& p = st.ctx.p;
    if (l < 1 || (long)ids.size() != (2L << l) + 2) throw PreconditionViolated("need 2^(l+1) + 2 classes");
    if (l == 1) return contract_mixed_same_niveau(st, ids, nu, 2);

    std::vector<long> P;
    std::vector<std::vector<long>> Sodd(l), Seven_byniv; // Sodd[j]: odd secondaries at nu+j
    std::vector<long> evenS;                             // even secondaries anywhere in range
    for (long id : ids) {
        if (st.classes[id].primary) {
            if (!st.classes[id].even() || st.classes[id].niveau(p) < nu)
                throw PreconditionViolated("primaries must be even at niveau >= nu");
            P.push_back(id);
            continue;
        }
        long nv = st.classes[id].niveau(p);
        if (nv < nu || nv > nu + l - 1) throw PreconditionViolated("secondary niveau out of range");
        if (st.classes[id].even())
            evenS.push_back(id);
        else
            Sodd[nv - nu].push_back(id);
    }
    if ((long)P.size() < (1L << l)) throw PreconditionViolated("need 2^l primary classes");

    std::vector<long> upper; // even classes now at niveaux nu+1..nu+l
    for (long id : evenS)
        if (st.classes[id].niveau(p) > nu) upper.push_back(id);
    std::vector<long> even_at_nu;
    for (long id : evenS)
        if (st.classes[id].niveau(p) == nu) even_at_nu.push_back(id);

    // Stage 1: odd secondaries pair within each niveau, leaving r_j in {0,1,2}.
    for (long j = 0; j < l; ++j) {
        long mj = (long)Sodd[j].size();
        long rj = mj <= 2 ? mj : (mj % 2 == 0 ? 2 : 1);
        auto up = pair_down(st, Sodd[j], nu + j, rj, true);
        upper.insert(upper.end(), up.begin(), up.end());
    }

    // Stage 2/3: cross-niveau parity corrections among the leftovers (j > 0).
    std::vector<long> J2, J1;
    for (long j = 1; j < l; ++j) {
        if (Sodd[j].size() == 2) J2.push_back(j);
        if (Sodd[j].size() == 1) J1.push_back(j);
    }
    while (J2.size() >= 2) {
        long j1 = J2[0], j2 = J2[1];
        for (int t = 0; t < 2; ++t) {
            long id = combine_odd_pair_cross(st, Sodd[j1][0], Sodd[j2][0]);
            Sodd[j1].erase(Sodd[j1].begin());
            Sodd[j2].erase(Sodd[j2].begin());
            if (nu + j1 > nu) upper.push_back(id); // exact niveau nu+j1 >= nu+1
        }
        J2.erase(J2.begin(), J2.begin() + 2);
    }
    std::optional<long> j0;
    if (J2.size() == 1) j0 = J2[0];
    if (j0 && J1.size() >= 2) {
        for (int t = 0; t < 2; ++t) {
            long j = J1[t];
            long id = combine_odd_pair_cross(st, Sodd[j][0], Sodd[*j0][0]);
            Sodd[j].clear();
            Sodd[*j0].erase(Sodd[*j0].begin());
            upper.push_back(id);
        }
        J1.erase(J1.begin(), J1.begin() + 2);
        j0.reset();
    }
    while (J1.size() >= 2) {
        long j3 = J1[0], j4 = J1[1];
        long id = combine_odd_pair_cross(st, Sodd[j3][0], Sodd[j4][0]);
        Sodd[j3].clear();
        Sodd[j4].clear();
        upper.push_back(id);
        J1.erase(J1.begin(), J1.begin() + 2);
    }
    if (J1.size() == 1 && j0 && Sodd[*j0].size() == 2) {
        long j = J1[0];
        long id = combine_odd_pair_cross(st, Sodd[j][0], Sodd[*j0][0]);
        Sodd[j].clear();
        Sodd[*j0].erase(Sodd[*j0].begin());
        upper.push_back(id);
        J1.clear();
    }

    // kappa: remaining odd classes (at nu and at most one higher niveau).
    std::vector<long> odd_left_nu = Sodd[0];
    std::vector<long> odd_left_hi;
    for (long j = 1; j < l; ++j) odd_left_hi.insert(odd_left_hi.end(), Sodd[j].begin(), Sodd[j].end());
    long kappa = (long)(odd_left_nu.size() + odd_left_hi.size());
    if (kappa == 4) {
        for (int t = 0; t < 2; ++t) {
            long id = combine_odd_pair_cross(st, odd_left_nu[0], odd_left_hi[0]);
            odd_left_nu.erase(odd_left_nu.begin());
            odd_left_hi.erase(odd_left_hi.begin());
            even_at_nu.push_back(id);
        }
        kappa = 0;
    }

    // Stage 4: contract the evens at niveau nu.
    auto upn = pair_down(st, even_at_nu, nu, 2, true);
    upper.insert(upper.end(), upn.begin(), upn.end());
    size_t pi = 0;
    for (long sid : even_at_nu) {
        if (pi >= P.size()) throw InternalError("ran out of primaries for the leftovers");
        upper.push_back(combine_P_S(st, P[pi++], sid, nu));
    }
    std::vector<long> pleft;
    for (; pi < P.size(); ++pi) pleft.push_back(P[pi]);
    while (pleft.size() >= 2) {
        upper.push_back(combine_even_pair(st, pleft[0], pleft[1], nu));
        pleft.erase(pleft.begin(), pleft.begin() + 2);
    }

    if (kappa == 3 && (long)upper.size() == (1L << l) - 1) {
        // Pe_nu, So_nu, So_j -> Pe_(nu+1); if the leftover primary already
        // gained a niveau it counts as-is.
        if (pleft.empty() || odd_left_nu.empty() || odd_left_hi.empty())
            throw InternalError("three-term correction unavailable");
        long pid = pleft[0];
        if (st.classes[pid].niveau(p) > nu) {
            upper.push_back(pid);
        } else {
            long id = merge(st, pid, odd_left_nu[0]);
            id = merge(st, id, odd_left_hi[0]);
            if (st.classes[id].niveau(p) < nu + 1 || !st.classes[id].even() || !st.classes[id].primary)
                throw RuleViolation("three-term correction failed");
            upper.push_back(id);
        }
    }

    long need = 1L << l;
    std::sort(upper.begin(), upper.end(), [&](long x, long y) {
        bool px = st.classes[x].primary, py = st.classes[y].primary;
        if (px != py) return px > py;
        long nx = st.classes[x].niveau(p), ny = st.classes[y].niveau(p);
        if (nx != ny) return nx < ny;
        return x < y;
    });
    if ((long)upper.size() < need) throw InternalError("mixed spread contraction miscounted");
    long prim = 0;
    for (long t = 0; t < need; ++t)
        if (st.classes[upper[t]].primary) prim++;
    if (prim < (1L << (l - 1))) throw InternalError("mixed spread lost too many primaries");
    upper.resize(need);
    return contract_even_spread(st, upper, nu + 1, l - 1);
}

namespace {

// Realize a final class as a witness: members 1, everything else 0.
EngineOutcome realize(ContractionState& st, long final_id, const Transcript& prefix, const std::string& branch) {
    const PadicContext& ctx = st.ctx;
    const ContractionClass& cl = st.classes[final_id];
    if (!cl.primary || !cl.even() || cl.niveau(ctx.p) < ctx.gamma)
        throw RuleViolation("final class is not a primary even class at niveau tau+2");

    std::vector<Int> x(st.sys.s(), Int(0));
    for (long i : cl.members) x[i] = 1;

    long pi = -1, pj = -1;
    for (long i = 0; i < st.sys.s() && pi < 0; ++i)
        for (long j = 0; j < st.sys.s(); ++j) {
            if (i == j) continue;
            Int minor = st.sys.b[i] * st.sys.a[j] * pow_ui(x[j], ctx.k - 1) -
                        st.sys.b[j] * st.sys.a[i] * pow_ui(x[i], ctx.k - 1);
            if (!divides(ctx.p, minor)) {
                pi = i;
                pj = j;
                break;
            }
        }
    if (pi < 0) throw InternalError("realized contraction has no pivot");

    hensel::HenselWitness w;
    w.system = st.sys;
    w.ctx = ctx;
    w.x = x;
    w.pivot_i = pi;
    w.pivot_j = pj;
    auto chk = hensel::check_witness(w);
    if (!chk.ok) throw InternalError("contraction witness failed: " + chk.failure);

    EngineOutcome out;
    out.status = EngineOutcome::Solved;
    out.transcript = prefix;
    out.pair_witness = w;
    out.branch = branch;
    return out;
}

std::vector<long> alive_ids_at(const ContractionState& st, long niveau, int parity /*-1 any,0 even,1 odd*/,
                               int primary /*-1 any,0 sec,1 prim*/) {
    std::vector<long> out;
    for (long id = 0; id < (long)st.classes.size(); ++id) {
        const auto& cl = st.classes[id];
        if (!cl.alive) continue;
        if (niveau >= 0 && cl.niveau(st.ctx.p) != niveau) continue;
        if (parity == 0 && !cl.even()) continue;
        if (parity == 1 && cl.even()) continue;
        if (primary == 0 && cl.primary) continue;
        if (primary == 1 && !cl.primary) continue;
        out.push_back(id);
    }
    return out;
}

// Same-parity pairing of the niveau-0 classes; returns the produced P1 list
// and leaves the unpaired classes alive.
std::vector<long> pair_niveau0(ContractionState& st) {
    std::vector<long> out;
    for (int parity = 0; parity < 2; ++parity) {
        auto ids = alive_ids_at(st, 0, parity, 1);
        for (size_t t = 0; t + 1 < ids.size(); t += 2) {
            long id = merge(st, ids[t], ids[t + 1]);
            if (st.classes[id].niveau(st.ctx.p) < 1 || !st.classes[id].even())
                throw RuleViolation("niveau-0 pairing failed");
            out.push_back(id);
        }
    }
    return out;
}

// P0-hat even + P0-hat odd + odd secondary -> P1 even.
long three_term_seed(ContractionState& st, long pe, long po, long so) {
    long id = merge(st, pe, po);
    id = merge(st, id, so);
    if (st.classes[id].niveau(st.ctx.p) < 1 || !st.classes[id].even() || !st.classes[id].primary)
        throw RuleViolation("three-term seed contraction failed");
    return id;
}

// Odd secondary for seed corrections, taken from the highest niveau so the
// low-niveau pools stay intact for the spread contractions.
long find_odd_secondary(ContractionState& st) {
    long best = -1, best_niv = -1;
    for (long id = 0; id < (long)st.classes.size(); ++id) {
        const auto& cl = st.classes[id];
        if (!cl.alive || cl.primary || cl.even()) continue;
        long nv = cl.niveau(st.ctx.p);
        if (nv > best_niv) {
            best_niv = nv;
            best = id;
        }
    }
    return best;
}

long chain_up(ContractionState& st, std::vector<long> ids, long nu) {
    // ids: 2^m primary even classes at niveau >= nu; chain to one class.
    while (ids.size() > 1) {
        std::vector<long> next;
        for (size_t t = 0; t + 1 < ids.size(); t += 2) next.push_back(combine_even_pair(st, ids[t], ids[t + 1], nu));
        ids = next;
        nu += 1;
    }
    return ids[0];
}

std::vector<long> take(std::vector<long> v, long n) {
    if ((long)v.size() < n) throw InternalError("not enough classes");
    v.resize(n);
    return v;
}

EngineOutcome schedule_typeA(const DiagLinSystem& sys, const PadicContext& ctx, const Transcript& prefix) {
    long k = (long)ctx.k;
    long tau = *ctx.tau;
    SystemStats s0 = stats(sys, ctx);
    long ups0 = s0.upsilon[0];

    // Zero one odd niveau-0 variable; it supplies the pivot.
    long x1 = -1;
    for (long i = 0; i < sys.s(); ++i)
        if (s0.nu[i] == 0 && s0.mu[i] == 0) {
            x1 = i;
            break;
        }
    if (x1 < 0) throw InternalError("type A system without an odd niveau-0 variable");

    ContractionState st = seed_state(sys, ctx, tau + 1, {x1});
    st.zeroed.push_back(x1);
    for (long id = 0; id < (long)st.classes.size(); ++id)
        if (!st.classes[id].primary && !st.classes[id].even())
            throw InternalError("type A has an odd secondary");

    std::vector<long> P1 = pair_niveau0(st);
    long final_id = -1;

    if (ups0 >= 4 * k + 2) {
        final_id = chain_up(st, take(P1, 2 * k), 1);
    } else if (ups0 >= 2 * k + 2 && k >= 8) {
        std::vector<long> sel = take(P1, k);
        for (long j = 1; j <= 4 && (long)sel.size() < 2 * k; ++j)
            for (long id : alive_ids_at(st, j, 0, 0)) {
                sel.push_back(id);
                if ((long)sel.size() == 2 * k) break;
            }
        final_id = contract_even_spread(st, take(sel, 2 * k), 1, tau);
    } else if (ups0 >= k + 2 && k >= 8) {
        auto S3 = alive_ids_at(st, 3, 0, 0);
        if ((long)S3.size() >= 3 * k / 8) {
            std::vector<long> P2;
            for (long t = 0; t + 1 < (long)(k / 2); t += 2) P2.push_back(combine_even_pair(st, P1[t], P1[t + 1], 1));
            std::vector<long> P3;
            for (long t = 0; t + 1 < (long)P2.size(); t += 2) P3.push_back(combine_even_pair(st, P2[t], P2[t + 1], 2));
            std::vector<long> P5;
            for (long g = 0; g < k / 8; ++g) {
                std::vector<long> grp{P3[g], S3[3 * g], S3[3 * g + 1], S3[3 * g + 2]};
                P5.push_back(contract_even_same_niveau(st, grp, 3, 2));
            }
            final_id = chain_up(st, P5, 5);
        } else {
            std::vector<long> P2;
            for (long t = 0; t + 1 < (long)(k / 2); t += 2) P2.push_back(combine_even_pair(st, P1[t], P1[t + 1], 1));
            auto S1 = alive_ids_at(st, 1, 0, 0);
            auto newS2 = pair_down(st, S1, 1, 2, true);
            std::vector<long> S2 = alive_ids_at(st, 2, 0, 0);
            if ((long)S2.size() < 3 * (k / 4)) throw InternalError("niveau-2 pool too small");
            std::vector<long> P4;
            for (long g = 0; g < k / 4; ++g) {
                std::vector<long> grp{P2[g], S2[3 * g], S2[3 * g + 1], S2[3 * g + 2]};
                P4.push_back(contract_even_same_niveau(st, grp, 2, 2));
            }
            final_id = chain_up(st, P4, 4);
        }
    } else if (ups0 == k + 1) {
        long p1need = k / 2 - 1;
        if ((long)P1.size() < p1need) throw InternalError("niveau-0 pairing came up short");
        auto S1 = alive_ids_at(st, 1, 0, 0);
        long leave = p1need + (long)((S1.size() - p1need) % 2);
        pair_down(st, S1, 1, leave, true);
        std::vector<long> P2;
        S1 = alive_ids_at(st, 1, 0, 0);
        for (long t = 0; t < p1need; ++t) P2.push_back(combine_P_S(st, P1[t], S1[t], 1));
        auto S2 = alive_ids_at(st, 2, 0, 0);
        if ((long)S2.size() < 3 * (k / 4)) throw InternalError("niveau-2 pool too small");
        std::vector<long> P4;
        for (long g = 0; g < k / 4; ++g) {
            std::vector<long> grp{P2[g], S2[3 * g], S2[3 * g + 1], S2[3 * g + 2]};
            P4.push_back(contract_even_same_niveau(st, grp, 2, 2));
        }
        final_id = chain_up(st, P4, 4);
    } else if (k == 4 && ups0 >= 6 && ups0 <= 17) {
        auto S1 = alive_ids_at(st, 1, 0, 0);
        pair_down(st, S1, 1, (long)(S1.size() % 2), true);
        S1 = alive_ids_at(st, 1, 0, 0);
        std::vector<long> P1v = P1;
        std::vector<long> atTwo;
        for (long sid : S1) {
            if (P1v.empty()) break;
            atTwo.push_back(combine_P_S(st, P1v.back(), sid, 1));
            P1v.pop_back();
        }
        while (P1v.size() >= 2) {
            atTwo.push_back(combine_even_pair(st, P1v[0], P1v[1], 1));
            P1v.erase(P1v.begin(), P1v.begin() + 2);
        }
        for (long id : alive_ids_at(st, 2, 0, 0)) atTwo.push_back(id);
        std::sort(atTwo.begin(), atTwo.end(), [&](long a, long b) {
            return st.classes[a].primary > st.classes[b].primary;
        });
        if (atTwo.size() < 3 || !st.classes[atTwo[0]].primary)
            throw InternalError("niveau-2 pool broke in the small type A case");
        auto S3 = alive_ids_at(st, 3, 0, 0);
        if (!S3.empty()) {
            long p3;
            bool sec = !st.classes[atTwo[1]].primary;
            p3 = sec ? combine_P_S(st, atTwo[0], atTwo[1], 2) : combine_even_pair(st, atTwo[0], atTwo[1], 2);
            final_id = combine_P_S(st, p3, S3[0], 3);
        } else {
            final_id = contract_even_same_niveau(st, take(atTwo, 4), 2, 2);
        }
    } else {
        throw InternalError("type A niveau-0 count out of range");
    }
    return realize(st, final_id, prefix, "typeA");
}

EngineOutcome schedule_typeB_large(const PadicContext& ctx, const Transcript& prefix, ContractionState& st,
                                   std::vector<long>& P1) {
    long k = (long)ctx.k;
    // ups0 >= 4k: reach 2k P1, using the three-term seed when the niveau-0
    // pairing splits.
    if ((long)P1.size() < 2 * k) {
        auto pe = alive_ids_at(st, 0, 0, 1);
        auto po = alive_ids_at(st, 0, 1, 1);
        long so = find_odd_secondary(st);
        if (pe.empty() || po.empty() || so < 0) throw InternalError("seed correction unavailable");
        P1.push_back(three_term_seed(st, pe[0], po[0], so));
    }
    long final_id = chain_up(st, take(P1, 2 * k), 1);
    return realize(st, final_id, prefix, "typeB-large");
}

EngineOutcome schedule_typeB(const DiagLinSystem& sys, const PadicContext& ctx, const Transcript& prefix) {
    long k = (long)ctx.k;
    long tau = *ctx.tau;
    SystemStats s0 = stats(sys, ctx);
    long ups0 = s0.upsilon[0], ups1 = s0.upsilon[1], ups2 = s0.upsilon[2], ups3 = s0.upsilon[3];

    ContractionState st = seed_state(sys, ctx, tau + 1);
    std::vector<long> P1 = pair_niveau0(st);

    if (ups0 >= 4 * k) return schedule_typeB_large(ctx, prefix, st, P1);
    if (k == 4) throw InternalError("k = 4 type B must route through the dedicated cases");

    long final_id = -1;
    if (ups0 > 2 * k && k >= 16) {
        std::vector<long> sel = take(P1, k);
        for (long j = 1; j <= 4 && (long)sel.size() < 2 * k + 2; ++j)
            for (long id : alive_ids_at(st, j, -1, 0)) {
                sel.push_back(id);
                if ((long)sel.size() == 2 * k + 2) break;
            }
        final_id = contract_mixed_spread(st, take(sel, 2 * k + 2), 1, tau);
    } else if (ups0 > 2 * k && k == 8) {
        long p1n = (long)P1.size();
        if (p1n + ups1 + ups2 + ups3 >= 18) {
            std::vector<long> sel = P1;
            for (long j = 1; j <= 3 && (long)sel.size() < 18; ++j)
                for (long id : alive_ids_at(st, j, -1, 0)) {
                    sel.push_back(id);
                    if ((long)sel.size() == 18) break;
                }
            final_id = contract_mixed_spread(st, take(sel, 18), 1, 3);
        } else {
            auto Se4 = alive_ids_at(st, 4, 0, 0);
            if (!Se4.empty()) {
                long p4 = chain_up(st, take(P1, 8), 1);
                final_id = combine_P_S(st, p4, Se4[0], 4);
            } else {
                auto So4 = alive_ids_at(st, 4, 1, 0);
                if ((long)So4.size() < 3) throw InternalError("k=8 corner is missing its odd niveau-4 pool");
                size_t used = 0;
                for (long j = 1; j <= 3; ++j)
                    for (long id : alive_ids_at(st, j, 1, 0)) {
                        if (used >= So4.size()) throw InternalError("ran out of odd niveau-4 classes");
                        combine_odd_pair_cross(st, id, So4[used++]);
                    }
                std::vector<long> sel = P1;
                for (long j = 1; j <= 3; ++j)
                    for (long id : alive_ids_at(st, j, 0, 0)) sel.push_back(id);
                final_id = contract_even_spread(st, take(sel, 16), 1, 3);
            }
        }
    } else { // k < ups0 <= 2k
        auto S1 = alive_ids_at(st, 1, -1, 0);
        if ((long)S1.size() >= 3 * k / 2 + 2) {
            std::vector<long> sel = take(P1, k / 2);
            for (long id : S1) {
                sel.push_back(id);
                if ((long)sel.size() == k / 2 + 3 * k / 2 + 2) break;
            }
            final_id = contract_mixed_same_niveau(st, sel, 1, tau + 1);
        } else {
            auto S1v = S1;
            pair_down(st, S1v, 1, (long)(S1v.size() % 2 ? 1 : 2), false);
            auto S2 = alive_ids_at(st, 2, -1, 0);
            if ((long)S2.size() >= 3 * k / 4 + 2) {
                std::vector<long> P2;
                auto P1v = take(P1, k / 2);
                for (long t = 0; t + 1 < (long)P1v.size(); t += 2)
                    P2.push_back(combine_even_pair(st, P1v[t], P1v[t + 1], 1));
                std::vector<long> sel = P2;
                for (long id : S2) {
                    sel.push_back(id);
                    if ((long)sel.size() == k / 4 + 3 * k / 4 + 2) break;
                }
                final_id = contract_mixed_same_niveau(st, sel, 2, tau);
            } else if (k >= 16) {
                auto S2v = S2;
                pair_down(st, S2v, 2, (long)(S2v.size() % 2 ? 1 : 2), false);
                auto S3 = alive_ids_at(st, 3, -1, 0);
                if ((long)S3.size() < 3 * k / 8 + 2) throw InternalError("niveau-3 pool contradiction");
                std::vector<long> P2, P3;
                auto P1v = take(P1, k / 2);
                for (long t = 0; t + 1 < (long)P1v.size(); t += 2)
                    P2.push_back(combine_even_pair(st, P1v[t], P1v[t + 1], 1));
                for (long t = 0; t + 1 < (long)P2.size(); t += 2)
                    P3.push_back(combine_even_pair(st, P2[t], P2[t + 1], 2));
                std::vector<long> sel = P3;
                for (long id : S3) {
                    sel.push_back(id);
                    if ((long)sel.size() == k / 8 + 3 * k / 8 + 2) break;
                }
                final_id = contract_mixed_same_niveau(st, sel, 3, tau - 1);
            } else { // k == 8 refinement
                auto S2all = alive_ids_at(st, 2, -1, 0);
                long u2 = (long)S2all.size();
                if (u2 < 4) throw InternalError("k=8 refinement pool contradiction");
                auto Se2 = alive_ids_at(st, 2, 0, 0);
                auto So2 = alive_ids_at(st, 2, 1, 0);
                bool three_same = (long)Se2.size() >= 3 || (long)So2.size() >= 3;
                if (three_same) {
                    auto& grp = ((long)Se2.size() >= 3) ? Se2 : So2;
                    auto up = pair_down(st, grp, 2, (long)grp.size() - 2, true);
                    if (up.empty()) throw InternalError("same-parity niveau-2 pairing failed");
                    auto S2rest = alive_ids_at(st, 2, -1, 0);
                    pair_down(st, S2rest, 2, (long)(S2rest.size() % 2), false);
                    auto S3 = alive_ids_at(st, 3, -1, 0);
                    std::vector<long> P2, P3v;
                    auto P1v = take(P1, 4);
                    P2.push_back(combine_even_pair(st, P1v[0], P1v[1], 1));
                    P2.push_back(combine_even_pair(st, P1v[2], P1v[3], 1));
                    long p3 = combine_even_pair(st, P2[0], P2[1], 2);
                    auto Se3 = alive_ids_at(st, 3, 0, 0);
                    auto So3 = alive_ids_at(st, 3, 1, 0);
                    if ((long)Se3.size() >= 3) {
                        std::vector<long> grp2{p3, Se3[0], Se3[1], Se3[2]};
                        final_id = contract_even_same_niveau(st, grp2, 3, 2);
                    } else {
                        if ((long)So3.size() < 3) throw InternalError("niveau-3 parity pool contradiction");
                        auto up4 = pair_down(st, So3, 3, (long)So3.size() - 2, true);
                        if (up4.empty()) throw InternalError("odd niveau-3 pairing failed");
                        Se3 = alive_ids_at(st, 3, 0, 0);
                        if (Se3.empty()) throw InternalError("no even niveau-3 class after pairing");
                        long p4 = combine_P_S(st, p3, Se3[0], 3);
                        long p5 = combine_P_S(st, p4, up4[0], 4);
                        final_id = p5;
                    }
                } else {
                    if ((long)Se2.size() != 2 || (long)So2.size() != 2)
                        throw InternalError("k=8 refinement expects the 2+2 split");
                    auto P1v = take(P1, 4);
                    long p2a = combine_even_pair(st, P1v[0], P1v[1], 1);
                    long p2b = combine_even_pair(st, P1v[2], P1v[3], 1);
                    std::vector<long> grp{p2a, p2b, Se2[0], Se2[1]};
                    long p4 = contract_even_same_niveau(st, grp, 2, 2);
                    auto S3 = alive_ids_at(st, 3, -1, 0);
                    std::vector<long> Se3 = alive_ids_at(st, 3, 0, 0);
                    std::vector<long> So3 = alive_ids_at(st, 3, 1, 0);
                    long se4 = -1;
                    if ((long)Se3.size() >= 2) {
                        auto up = pair_down(st, Se3, 3, (long)Se3.size() - 2, true);
                        if (!up.empty()) se4 = up[0];
                    }
                    if (se4 < 0) {
                        if ((long)So3.size() < 3) throw InternalError("niveau-3 pool too small for the 2+2 split");
                        auto up = pair_down(st, So3, 3, (long)So3.size() - 2, true);
                        if (up.empty()) throw InternalError("odd niveau-3 pairing failed");
                        se4 = up[0];
                    }
                    final_id = combine_P_S(st, p4, se4, 4);
                }
            }
        }
    }
    return realize(st, final_id, prefix, "typeB");
}

// k = 4 type B with an even niveau-3 class available.
EngineOutcome schedule_k4_even3(const DiagLinSystem& sys, const PadicContext& ctx, const Transcript& prefix) {
    SystemStats s0 = stats(sys, ctx);
    long ups0 = s0.upsilon[0];
    ContractionState st = seed_state(sys, ctx, 3);
    std::vector<long> P1 = pair_niveau0(st);
    auto Se3 = alive_ids_at(st, 3, 0, 0);
    if (Se3.empty()) throw InternalError("even niveau-3 class disappeared");

    long p3 = -1;
    if (ups0 >= 8) {
        if ((long)P1.size() < 4) {
            auto pe = alive_ids_at(st, 0, 0, 1);
            auto po = alive_ids_at(st, 0, 1, 1);
            long so = find_odd_secondary(st);
            if (pe.empty() || po.empty() || so < 0) throw InternalError("seed correction unavailable");
            P1.push_back(three_term_seed(st, pe[0], po[0], so));
        }
        p3 = chain_up(st, take(P1, 4), 1);
    } else {
        if ((long)P1.size() < 2) throw InternalError("too few niveau-0 pairs");
        auto S1 = alive_ids_at(st, 1, -1, 0);
        if ((long)S1.size() >= 4) {
            std::vector<long> sel{P1[0], P1[1], S1[0], S1[1], S1[2], S1[3]};
            p3 = contract_mixed_same_niveau(st, sel, 1, 2);
        } else {
            auto Se2 = alive_ids_at(st, 2, 0, 0);
            if (!Se2.empty()) {
                long p2 = combine_even_pair(st, P1[0], P1[1], 1);
                p3 = combine_P_S(st, p2, Se2[0], 2);
            } else {
                auto So2 = alive_ids_at(st, 2, 1, 0);
                auto Se1 = alive_ids_at(st, 1, 0, 0);
                auto So1 = alive_ids_at(st, 1, 1, 0);
                size_t used = 0;
                while ((long)Se1.size() < 2) {
                    if (So1.empty() || used >= So2.size()) throw InternalError("parity correction pool dry");
                    Se1.push_back(combine_odd_pair_cross(st, So1.back(), So2[used++]));
                    So1.pop_back();
                }
                std::vector<long> sel{P1[0], P1[1], Se1[0], Se1[1]};
                p3 = contract_even_same_niveau(st, sel, 1, 2);
            }
        }
    }
    long final_id = combine_P_S(st, p3, Se3[0], 3);
    return realize(st, final_id, prefix, "typeB-k4-even3");
}

// k = 4 type B, all niveau-3 classes odd, at most two of them.
EngineOutcome schedule_k4_low3(const DiagLinSystem& sys, const PadicContext& ctx, const Transcript& prefix) {
    SystemStats s0 = stats(sys, ctx);
    long ups0 = s0.upsilon[0], ups1 = s0.upsilon[1], ups2 = s0.upsilon[2];
    ContractionState st = seed_state(sys, ctx, 3);
    std::vector<long> P1 = pair_niveau0(st);

    auto ensure_p1 = [&](long n) {
        while ((long)P1.size() < n) {
            auto pe = alive_ids_at(st, 0, 0, 1);
            auto po = alive_ids_at(st, 0, 1, 1);
            long so = find_odd_secondary(st);
            if (pe.empty() || po.empty() || so < 0) throw InternalError("cannot extend the P1 pool");
            P1.push_back(three_term_seed(st, pe[0], po[0], so));
        }
    };
    auto make_even_secondary = [&]() -> long {
        // An even secondary at niveau <= 3 via parity correction or a
        // same-parity triple.
        for (long j = 1; j <= 3; ++j) {
            auto se = alive_ids_at(st, j, 0, 0);
            if (!se.empty()) return se[0];
        }
        for (long i = 1; i <= 3; ++i)
            for (long j = i + 1; j <= 3; ++j) {
                auto a = alive_ids_at(st, i, 1, 0);
                auto b = alive_ids_at(st, j, 1, 0);
                if (!a.empty() && !b.empty()) return combine_odd_pair_cross(st, a[0], b[0]);
            }
        for (long i = 1; i <= 2; ++i) {
            auto a = alive_ids_at(st, i, 1, 0);
            if ((long)a.size() >= 3) {
                auto up = pair_down(st, a, i, (long)a.size() - 2, true);
                if (!up.empty()) return up[0];
            }
        }
        throw InternalError("no even secondary is constructible");
    };

    if (ups0 >= 14) {
        ensure_p1(7);
        long sid = make_even_secondary();
        std::vector<long> sel = take(P1, 7);
        sel.push_back(sid);
        long final_id = contract_even_spread(st, sel, 1, 2);
        return realize(st, final_id, prefix, "typeB-k4-i");
    }
    if (ups0 == 13) {
        if (ups1 + ups2 >= 4) {
            std::vector<long> sel = take(P1, 6);
            for (long j = 1; j <= 2; ++j)
                for (long id : alive_ids_at(st, j, -1, 0)) {
                    sel.push_back(id);
                    if (sel.size() == 10) break;
                }
            long final_id = contract_mixed_spread(st, take(sel, 10), 1, 2);
            return realize(st, final_id, prefix, "typeB-k4-ii");
        }
        // ups1 + ups2 == 3, ups3 == 2, both odd: parity-correct the odd
        // low-niveau classes against them, then collect two even secondaries.
        auto So3 = alive_ids_at(st, 3, 1, 0);
        long fixed = 0;
        for (long j = 1; j <= 2 && fixed < (long)So3.size(); ++j)
            for (long id : alive_ids_at(st, j, 1, 0)) {
                combine_odd_pair_cross(st, id, So3[fixed]);
                if (++fixed >= (long)So3.size()) break;
            }
        std::vector<long> sel = take(P1, 6);
        for (long j = 1; j <= 2 && (long)sel.size() < 8; ++j)
            for (long id : alive_ids_at(st, j, 0, 0)) {
                sel.push_back(id);
                if ((long)sel.size() == 8) break;
            }
        long final_id = contract_even_spread(st, take(sel, 8), 1, 2);
        return realize(st, final_id, prefix, "typeB-k4-ii-corrected");
    }
    if (ups0 == 12) {
        if (ups1 + ups2 >= 5) {
            ensure_p1(5);
            std::vector<long> sel = take(P1, 5);
            for (long j = 1; j <= 2; ++j)
                for (long id : alive_ids_at(st, j, -1, 0)) {
                    sel.push_back(id);
                    if (sel.size() == 10) break;
                }
            long final_id = contract_mixed_spread(st, take(sel, 10), 1, 2);
            return realize(st, final_id, prefix, "typeB-k4-iii");
        }
        ensure_p1(6);
        std::vector<long> sel = take(P1, 6);
        for (long j = 1; j <= 2; ++j)
            for (long id : alive_ids_at(st, j, -1, 0)) sel.push_back(id);
        long final_id = contract_mixed_spread(st, take(sel, 10), 1, 2);
        return realize(st, final_id, prefix, "typeB-k4-iii-b");
    }
    if (ups0 >= 8) {
        long have = (ups0 % 2 == 1) ? (long)P1.size() : -1;
        if (ups0 % 2 == 0) {
            ensure_p1(ups0 / 2);
            have = (long)P1.size();
        }
        if (have < 4) throw InternalError("pool underflow in the mid range");
        std::vector<long> sel = take(P1, std::min<long>((long)P1.size(), 6));
        for (long j = 1; j <= 2; ++j)
            for (long id : alive_ids_at(st, j, -1, 0)) {
                if (sel.size() == 10) break;
                sel.push_back(id);
            }
        long final_id = contract_mixed_spread(st, take(sel, 10), 1, 2);
        return realize(st, final_id, prefix, "typeB-k4-iv");
    }

    // ups0 in {5, 6, 7}
    auto Se2 = [&] { return alive_ids_at(st, 2, 0, 0); };
    auto So2 = [&] { return alive_ids_at(st, 2, 1, 0); };
    auto Se1 = [&] { return alive_ids_at(st, 1, 0, 0); };
    auto So1 = [&] { return alive_ids_at(st, 1, 1, 0); };

    auto ensure_se1 = [&](long n) {
        while ((long)Se1().size() < n) {
            auto so1 = So1();
            auto so2 = So2();
            if (!so1.empty() && !so2.empty()) {
                combine_odd_pair_cross(st, so1[0], so2[0]);
                continue;
            }
            auto so3 = alive_ids_at(st, 3, 1, 0);
            if (!so1.empty() && !so3.empty()) {
                combine_odd_pair_cross(st, so1[0], so3[0]);
                continue;
            }
            throw InternalError("cannot build an even niveau-1 class");
        }
    };

    long sthresh = (ups0 == 7) ? 7 : 8;
    auto S1all = alive_ids_at(st, 1, -1, 0);
    if ((long)S1all.size() >= sthresh) {
        std::vector<long> sel = take(P1, (ups0 == 7) ? 3 : 2);
        for (long id : S1all) {
            sel.push_back(id);
            if ((long)sel.size() == 10) break;
        }
        long final_id = contract_mixed_same_niveau(st, take(sel, 10), 1, 3);
        return realize(st, final_id, prefix, "typeB-k4-wide1");
    }
    if ((long)Se2().size() >= 3) {
        long p2 = combine_even_pair(st, P1[0], P1[1], 1);
        auto se2 = Se2();
        std::vector<long> grp{p2, se2[0], se2[1], se2[2]};
        long final_id = contract_even_same_niveau(st, grp, 2, 2);
        return realize(st, final_id, prefix, "typeB-k4-a");
    }
    if ((long)So2().size() >= 3) {
        auto so2 = So2();
        auto up = pair_down(st, so2, 2, (long)so2.size() - 2, true);
        if (up.empty()) throw InternalError("odd niveau-2 pairing failed");
        long se3 = up[0];
        if (ups0 >= 6 || (long)P1.size() >= 3) {
            ensure_p1(3);
            ensure_se1(1);
            auto se1 = Se1();
            std::vector<long> grp{P1[0], P1[1], P1[2], se1[0]};
            long p3 = contract_even_same_niveau(st, grp, 1, 2);
            long final_id = combine_P_S(st, p3, se3, 3);
            return realize(st, final_id, prefix, "typeB-k4-b");
        }
        ensure_se1(2);
        auto se1 = Se1();
        std::vector<long> grp{P1[0], P1[1], se1[0], se1[1]};
        long p3 = contract_even_same_niveau(st, grp, 1, 2);
        long final_id = combine_P_S(st, p3, se3, 3);
        return realize(st, final_id, prefix, "typeB-k4-b2");
    }
    // 2 + 2 split at niveau two (or fewer): build a further even niveau-2
    // class from niveau-1 material, then finish through niveau 2.
    {
        auto se2 = Se2();
        while ((long)se2.size() < 2) {
            auto so1 = So1();
            if ((long)so1.size() >= 3) {
                auto up = pair_down(st, so1, 1, (long)so1.size() - 2, true);
                if (!up.empty()) {
                    se2 = Se2();
                    continue;
                }
            }
            auto seA = Se1();
            if ((long)seA.size() >= 3) {
                auto up = pair_down(st, seA, 1, (long)seA.size() - 2, true);
                if (!up.empty()) {
                    se2 = Se2();
                    continue;
                }
            }
            throw InternalError("cannot build the second even niveau-2 class");
        }
        ensure_se1(2);
        auto se1 = Se1();
        long p2a = combine_P_S(st, P1[0], se1[0], 1);
        if ((long)P1.size() < 2) throw InternalError("second niveau-1 primary unavailable");
        long p2b = combine_P_S(st, P1[1], se1[1], 1);
        se2 = Se2();
        std::vector<long> grp{p2a, p2b, se2[0], se2[1]};
        long final_id = contract_even_same_niveau(st, grp, 2, 2);
        return realize(st, final_id, prefix, "typeB-k4-c");
    }
}

} // namespace

EngineOutcome cycling_solve(const DiagLinSystem& sys, const PadicContext& ctx) {
    if (ctx.p != 2 || ctx.k != 4) throw NotApplicable("cycling needs p = 2, k = 4");
    SystemStats s0 = stats(sys, ctx);
    long ups3 = s0.upsilon[3];
    if (s0.type != SystemType::B || ups3 < 3) throw NotApplicable("cycling needs type B with ups3 >= 3");
    for (long i = 0; i < sys.s(); ++i)
        if (s0.nu[i] == 3 && divides(kTwo, sys.b[i])) throw NotApplicable("an even niveau-3 variable exists");

    // x -> (2 x_0, 2 x_1, 2 x_2, x_3), degree equation divided by 8.
    TransformStep step = identity_step(sys.s());
    for (long i = 0; i < sys.s(); ++i)
        if (s0.nu[i] <= 2) step.actions[i].mult = Rat(2);
    step.scale_a = Rat(1) / Rat(8);
    step.note = "cycle niveau blocks against the odd top block";
    DiagLinSystem S17 = apply_transform(sys, step, ctx.k);
    Transcript tr;
    tr.source = sys;
    tr.append(step);

    ContractionState st = seed_state(S17, ctx, 3);
    auto P0 = alive_ids_at(st, 0, 1, 1); // the rotated top block: odd primaries
    if ((long)P0.size() < 3) throw InternalError("cycling lost its odd primaries");
    long p1 = merge(st, P0[0], P0[1]);
    if (st.classes[p1].niveau(kTwo) < 1 || !st.classes[p1].even())
        throw RuleViolation("odd primary pairing failed");
    // P0[2] stays alive and untouched: it supplies the zeroed odd variable.

    auto Se1 = alive_ids_at(st, 1, 0, 0);
    long final_id = -1;
    if ((long)Se1.size() >= 7) {
        std::vector<long> sel{p1};
        for (long t = 0; t < 7; ++t) sel.push_back(Se1[t]);
        final_id = contract_even_same_niveau(st, sel, 1, 3);
    } else {
        if ((long)Se1.size() < 3) throw InternalError("cycling needs at least three rotated niveau-1 classes");
        auto up = pair_down(st, Se1, 1, (long)Se1.size() - 2, true);
        if (up.empty()) throw InternalError("rotated niveau-1 pairing failed");
        Se1 = alive_ids_at(st, 1, 0, 0);
        long p2 = combine_P_S(st, p1, Se1[0], 1);
        auto Se2 = alive_ids_at(st, 2, 0, 0);
        if ((long)Se2.size() < 3) throw InternalError("rotated niveau-2 pool too small");
        std::vector<long> grp{p2, Se2[0], Se2[1], Se2[2]};
        final_id = contract_even_same_niveau(st, grp, 2, 2);
    }
    return realize(st, final_id, tr, "cycling");
}

ScheduleResult schedule(const DiagLinSystem& sys, const PadicContext& ctx) {
    SystemStats s0 = stats(sys, ctx);
    ScheduleResult res;
    Transcript prefix;
    prefix.source = sys;
    if (s0.type == SystemType::A) {
        res.outcome = schedule_typeA(sys, ctx, prefix);
        return res;
    }
    long k = (long)ctx.k;
    if (s0.upsilon[0] >= 4 * k || k >= 8) {
        res.outcome = schedule_typeB(sys, ctx, prefix);
        return res;
    }
    // k = 4 type B below 4k.
    bool even3 = false;
    for (long i = 0; i < sys.s(); ++i)
        if (s0.nu[i] == 3 && divides(kTwo, sys.b[i])) even3 = true;
    if (even3) {
        res.outcome = schedule_k4_even3(sys, ctx, prefix);
        return res;
    }
    if (s0.upsilon[3] <= 2) {
        res.outcome = schedule_k4_low3(sys, ctx, prefix);
        return res;
    }
    res.status = ScheduleResult::NeedsCycling;
    return res;
}

EngineOutcome solve(const DiagLinSystem& sys, const PadicContext& ctx) {
    EngineOutcome out;
    out.transcript.source = sys;
    if (ctx.p != 2 || !(ctx.k == 4 || ctx.k == 8 || ctx.k == 16 || ctx.k == 32)) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "p = 2 engine covers k in {4, 8, 16, 32}";
        return out;
    }
    if (Int(sys.s()) < Int(ctx.k) * Int(ctx.k) + 2 || !normalize::is_conditioned(sys, ctx)) {
        out.status = EngineOutcome::NotApplicable;
        out.detail = "needs a conditioned system with s >= k^2+2";
        return out;
    }
    ScheduleResult res = schedule(sys, ctx);
    if (res.status == ScheduleResult::NeedsCycling) return cycling_solve(sys, ctx);
    return res.outcome;
}

} // namespace padlin::pow2
