#include "padlin/combinat.hpp"

#include <algorithm>
#include <map>

namespace padlin::combinat {

namespace {

// x^(k-1) == x^(-1) mod p for units when k is a multiple of p-1.
Int inv_unit(const Int& x, const Int& p) { return invmod(mod_pos(x, p), p); }

void require_collapse(const PadicContext& ctx) {
    if (!ctx.tau) throw ContextNotApplicable("solver needs k = p^tau*(p-1)");
}

} // namespace

std::optional<std::vector<long>> subset_sum_target(const std::vector<Int>& c, const Int& q, const Int& target) {
    if (q < 2) throw PreconditionViolated("modulus must be >= 2");
    for (const Int& x : c) {
        Int g;
        Int xm = mod_pos(x, q);
        mpz_gcd(g.get_mpz_t(), xm.get_mpz_t(), q.get_mpz_t());
        if (g != 1) throw PreconditionViolated("subset_sum_target: non-unit entry");
    }
    Int t = mod_pos(target, q);
    // reached[r] = (previous residue, index used); index -1 marks the seed.
    std::map<Int, std::pair<Int, long>> reached;
    reached[Int(0)] = {Int(0), -1};
    if (t == 0) return std::vector<long>{};
    for (long j = 0; j < (long)c.size(); ++j) {
        std::vector<std::pair<Int, Int>> fresh;
        for (const auto& [r, pred] : reached) {
            Int nr = mod_pos(r + c[j], q);
            if (!reached.count(nr)) fresh.emplace_back(nr, r);
        }
        for (auto& [nr, r] : fresh) reached[nr] = {r, j};
        if (reached.count(t)) {
            std::vector<long> out;
            Int cur = t;
            while (true) {
                auto& [prev, idx] = reached[cur];
                if (idx < 0) break;
                out.push_back(idx);
                cur = prev;
            }
            std::sort(out.begin(), out.end());
            return out;
        }
    }
    return std::nullopt;
}

std::vector<long> zero_subset_sum(const std::vector<Int>& c, const Int& q) {
    if ((long)c.size() < q) throw PreconditionViolated("zero_subset_sum: need at least q entries");
    std::vector<Int> rest(c.begin() + 1, c.end());
    auto hit = subset_sum_target(rest, q, -c[0]);
    if (!hit) throw InternalError("zero_subset_sum: sumset failed to reach target");
    std::vector<long> out{0};
    for (long j : *hit) out.push_back(j + 1);
    Int sum = 0;
    for (long j : out) sum += c[j];
    if (mod_pos(sum, q) != 0) throw InternalError("zero_subset_sum: bad witness");
    return out;
}

FpSolution solve_unit_diagonal_mod_p(const std::vector<Int>& a, const PadicContext& ctx) {
    require_collapse(ctx);
    const Int& p = ctx.p;
    if (p == 2) throw PreconditionViolated("odd p required");
    long n = (long)a.size();
    if (n < 1) throw PreconditionViolated("empty coefficient list");
    for (const Int& x : a)
        if (divides(p, x)) throw PreconditionViolated("coefficients must be units");

    FpSolution sol;
    if (Int(n) >= p) {
        auto J = zero_subset_sum(a, p);
        sol.kind = FpSolution::Solved;
        sol.values.assign(n, 0);
        for (long j : J) sol.values[j] = 1;
        return sol;
    }
    // Fewer than p entries: nonempty subset summing to 0 mod p, if any.
    auto probe = [&](long skip_first) -> std::optional<std::vector<long>> {
        // force index skip_first in, search target -a[skip_first] on the rest
        std::vector<Int> rest;
        std::vector<long> ids;
        for (long j = 0; j < n; ++j)
            if (j != skip_first) {
                rest.push_back(a[j]);
                ids.push_back(j);
            }
        auto hit = subset_sum_target(rest, p, -a[skip_first]);
        if (!hit) return std::nullopt;
        std::vector<long> out{skip_first};
        for (long j : *hit) out.push_back(ids[j]);
        std::sort(out.begin(), out.end());
        return out;
    };
    for (long first = 0; first < n; ++first) {
        if (auto J = probe(first)) {
            sol.kind = FpSolution::Solved;
            sol.values.assign(n, 0);
            for (long j : *J) sol.values[j] = 1;
            return sol;
        }
    }
    if (Int(n) == p - 1) {
        // No nontrivial zero subset: certify the all-equal shape.
        for (long j = 1; j < n; ++j)
            if (mod_pos(a[j] - a[0], p) != 0) throw InternalError("no solution but coefficients differ");
        sol.kind = FpSolution::AllEqual;
        return sol;
    }
    sol.kind = FpSolution::NoSolution;
    return sol;
}

FpSolution solve_unit_pair_mod_p(const std::vector<Int>& a, const std::vector<Int>& b,
                                 const PadicContext& ctx, std::optional<FreeSlot> slot) {
    require_collapse(ctx);
    const Int& p = ctx.p;
    if (p < 5) throw PreconditionViolated("p >= 5 required");
    long n = (long)a.size();
    if ((long)b.size() != n) throw PreconditionViolated("length mismatch");
    for (const Int& x : a)
        if (divides(p, x)) throw PreconditionViolated("degree coefficients must be units");

    FpSolution sol;

    if (slot) {
        // Extra variable y with unit linear coefficient c: solve the diagonal
        // part with x_0 = 1 and read y off the linear equation.  Pivot
        // (x_first, y): the slot has no degree coefficient, so the minor is
        // -c * a_first * x_first^(k-1), a unit.
        if (divides(p, slot->c)) throw PreconditionViolated("free slot coefficient must be a unit");
        if (Int(n) < p) throw PreconditionViolated("free-slot route needs at least p variables");
        FpSolution diag = solve_unit_diagonal_mod_p(a, ctx);
        if (diag.kind != FpSolution::Solved) throw InternalError("diagonal solve must succeed with >= p units");
        Int lin = 0;
        long first = -1;
        for (long j = 0; j < n; ++j) {
            lin += b[j] * diag.values[j];
            if (first < 0 && diag.values[j] != 0) first = j;
        }
        Int y = mod_pos(-lin * inv_unit(slot->c, p), p);
        sol.kind = FpSolution::Solved;
        sol.values = diag.values;
        sol.values.push_back(y);
        sol.pivot = {first, n}; // slot occupies the trailing position
        return sol;
    }

    std::vector<long> nz, z;
    for (long j = 0; j < n; ++j) (divides(p, b[j]) ? z : nz).push_back(j);
    long t = (long)nz.size();
    if (t == 0) throw NotApplicable("all linear coefficients vanish mod p");
    if (Int(n) < p + 1) throw PreconditionViolated("need at least p+1 variables");

    auto finish_tail_solution = [&](long zero1, long zero2) -> std::optional<FpSolution> {
        // x_zero1 = x_zero2 = 0 and a nontrivial zero of the remaining
        // diagonal; all remaining b_j vanish mod p, so the linear form is 0
        // and the pivot (zero1, j) has unit minor b_zero1 a_j x_j^(k-1).
        std::vector<Int> rest;
        std::vector<long> ids;
        for (long j = 0; j < n; ++j)
            if (j != zero1 && j != zero2) {
                rest.push_back(a[j]);
                ids.push_back(j);
            }
        FpSolution diag = solve_unit_diagonal_mod_p(rest, ctx);
        if (diag.kind != FpSolution::Solved) return std::nullopt;
        FpSolution out;
        out.kind = FpSolution::Solved;
        out.values.assign(n, 0);
        long firstunit = -1;
        for (size_t j = 0; j < ids.size(); ++j) {
            out.values[ids[j]] = diag.values[j];
            if (firstunit < 0 && diag.values[j] != 0) firstunit = ids[j];
        }
        out.pivot = {zero1, firstunit};
        return out;
    };

    if (t == 1) {
        auto out = finish_tail_solution(nz[0], nz[0]);
        if (!out) throw InternalError("tail diagonal with >= p units failed");
        return *out;
    }

    // t >= 2.  Find a header pair among the nonzero-b indices with unit a-sum.
    long h1 = -1, h2 = -1;
    for (long i = 0; i < t && h1 < 0; ++i)
        for (long j = i + 1; j < t; ++j)
            if (!divides(p, a[nz[i]] + a[nz[j]])) {
                h1 = nz[i];
                h2 = nz[j];
                break;
            }

    if (h1 >= 0) {
        // Solve the tail for -(a_h1 + a_h2), then pick unit header values and
        // perturb along the linear kernel until the (h1,h2) minor is a unit.
        std::vector<Int> rest;
        std::vector<long> ids;
        for (long j = 0; j < n; ++j)
            if (j != h1 && j != h2) {
                rest.push_back(a[j]);
                ids.push_back(j);
            }
        auto hit = subset_sum_target(rest, p, -(a[h1] + a[h2]));
        if (!hit) throw InternalError("tail target unreachable with >= p-1 units");
        std::vector<Int> x(n, 0);
        for (long j : *hit) x[ids[j]] = 1;
        Int B = 0;
        for (long j = 0; j < n; ++j) B += b[j] * x[j];
        Int x1;
        for (x1 = 1; x1 < p; ++x1)
            if (mod_pos(b[h1] * x1 + B, p) != 0) break;
        Int x2 = mod_pos(-(b[h1] * x1 + B) * inv_unit(b[h2], p), p);
        x[h1] = x1;
        x[h2] = x2;
        // z1 = x1 + b2 y, z2 = x2 - b1 y keeps the linear form fixed; choose y
        // with z1 z2 != 0 and unit minor.  At most three excluded y values.
        for (Int y = 0; y < p; ++y) {
            Int z1 = mod_pos(x[h1] + b[h2] * y, p);
            Int z2 = mod_pos(x[h2] - b[h1] * y, p);
            if (z1 == 0 || z2 == 0) continue;
            Int minor = mod_pos(b[h1] * a[h2] * inv_unit(z2, p) - b[h2] * a[h1] * inv_unit(z1, p), p);
            if (minor == 0) continue;
            sol.kind = FpSolution::Solved;
            sol.values = x;
            sol.values[h1] = z1;
            sol.values[h2] = z2;
            sol.pivot = {h1, h2};
            return sol;
        }
        throw InternalError("no perturbation made the minor a unit (p >= 5)");
    }

    // All header pairs have a_i + a_j == 0 mod p, which forces t == 2.
    if (t != 2) throw InternalError("three pairwise-cancelling units are impossible for odd p");
    if (auto out = finish_tail_solution(nz[0], nz[1])) return *out;

    // Tail diagonal insoluble: with exactly p-1 tail entries that certifies
    // the critical coefficient shape.
    if (Int(n) != p + 1) throw InternalError("tail failure with more than p-1 tail entries");
    sol.kind = FpSolution::CriticalShape;
    sol.perm = {nz[0], nz[1]};
    for (long j = 0; j < n; ++j)
        if (j != nz[0] && j != nz[1]) sol.perm.push_back(j);
    sol.crit_a = mod_pos(a[nz[0]], p);
    sol.crit_aprime = mod_pos(a[sol.perm[2]], p);
    sol.crit_b1 = mod_pos(b[nz[0]], p);
    sol.crit_b2 = mod_pos(b[nz[1]], p);
    return sol;
}

std::vector<long> olson_zero_sum(const std::vector<std::pair<Int, Int>>& pairs) {
    long n = (long)pairs.size();
    if (n < 5) throw PreconditionViolated("olson_zero_sum: need at least 5 pairs");
    long cap = std::min(n, (long)20);
    // Exhaustive scan over the first `cap` entries; guaranteed to succeed
    // within any 5 entries.
    for (unsigned long mask = 1; mask < (1ul << cap); ++mask) {
        Int sa = 0, sb = 0;
        for (long j = 0; j < cap; ++j)
            if (mask & (1ul << j)) {
                sa += pairs[j].first;
                sb += pairs[j].second;
            }
        if (mod_pos(sa, 3) == 0 && mod_pos(sb, 3) == 0) {
            std::vector<long> out;
            for (long j = 0; j < cap; ++j)
                if (mask & (1ul << j)) out.push_back(j);
            return out;
        }
    }
    throw InternalError("olson_zero_sum: no zero-sum subset found");
}

NonzeroPair pair_with_nonzero_sum(const std::array<Int, 3>& a, const Int& p) {
    if (p < 3) throw PreconditionViolated("p >= 3 required");
    for (const Int& x : a)
        if (divides(p, x)) throw PreconditionViolated("entries must be units");
    NonzeroPair out;
    bool found = false;
    for (long i = 0; i < 3; ++i)
        for (long j = i + 1; j < 3; ++j)
            if (mod_pos(a[i] + a[j], p) != 0) {
                if (!found) {
                    out.i = i;
                    out.j = j;
                    found = true;
                }
                out.count += 1;
            }
    if (!found) throw InternalError("all three pair sums vanish; impossible for odd p");
    out.exceptional = (out.count == 1);
    return out;
}

} // namespace padlin::combinat
