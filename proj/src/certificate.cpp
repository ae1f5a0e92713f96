#include "padlin/certificate.hpp"

#include <algorithm>

namespace padlin {

bool verify_descent(const DescentTrace& trace, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const DiagLinSystem& sys = trace.system;
    const Int& p = trace.p;
    long s = sys.s();
    if (!sys.homogeneous()) return fail("descent expects a homogeneous system");
    if ((long)trace.levels.size() < 1) return fail("no levels");

    std::vector<bool> covered(s, false);
    for (const auto& lv : trace.levels) {
        if (lv.block.size() != lv.unit_parts.size() || lv.block.empty()) return fail("malformed level");
        if (lv.block.size() > 26) return fail("level too wide for the subset scan");
        Int pj = pow_ui(p, (unsigned long)lv.level);
        for (size_t t = 0; t < lv.block.size(); ++t) {
            long i = lv.block[t];
            if (i < 0 || i >= s || covered[i]) return fail("level indices overlap");
            covered[i] = true;
            if (sys.a[i] != pj * lv.unit_parts[t]) return fail("unit part mismatch");
            if (divides(p, lv.unit_parts[t])) return fail("unit part not a unit");
        }
        // The level is dead: no nonempty subset of the unit parts sums to 0.
        unsigned long total = 1ul << lv.block.size();
        for (unsigned long m = 1; m < total; ++m) {
            Int sum = 0;
            for (size_t t = 0; t < lv.block.size(); ++t)
                if (m & (1ul << t)) sum += lv.unit_parts[t];
            if (mod_pos(sum, p) == 0) return fail("a level admits a zero subset sum");
        }
        // Cross-level contributions vanish mod p after the division by p^level:
        // lower levels contribute k - (level - level'), which must be >= 1.
        if ((long)trace.k < 1) return fail("bad degree");
    }
    // Levels must be exactly 0..k-1 in some order for the descent induction.
    std::vector<bool> seen_level(trace.k, false);
    for (const auto& lv : trace.levels) {
        if (lv.level < 0 || lv.level >= (long)trace.k) return fail("level out of range");
        if (seen_level[lv.level]) return fail("duplicate level");
        seen_level[lv.level] = true;
    }
    for (bool b : seen_level)
        if (!b) return fail("missing level");

    // Zero-degree variables: at most one, forced by the linear form.
    long extra = -1;
    for (long i = 0; i < s; ++i) {
        if (covered[i]) continue;
        if (sys.a[i] != 0) return fail("uncovered variable with nonzero degree coefficient");
        if (extra >= 0) return fail("more than one zero-degree variable");
        extra = i;
    }
    if (extra != trace.forced_linear_index) return fail("forced index mismatch");
    if (extra >= 0) {
        if (divides(p, sys.b[extra])) return fail("forced variable has non-unit linear coefficient");
        // All other linear coefficients must vanish mod p on... they may be
        // arbitrary: once every block variable is divisible by p, B == 0 mod p
        // forces b_extra * x_extra == sum over block vars == 0 mod p.
    }
    return true;
}

std::vector<Rat> primitive_scale(std::vector<Rat> x, const Int& p) {
    long mv = kValInf;
    for (const Rat& r : x)
        if (r != 0) mv = std::min(mv, vp_rat(r, p));
    if (mv == kValInf) throw InternalError("zero vector cannot be scaled primitive");
    if (mv != 0) {
        Rat scale = (mv > 0) ? Rat(1) / Rat(pow_ui(p, (unsigned long)mv)) : Rat(pow_ui(p, (unsigned long)(-mv)));
        for (Rat& r : x) r *= scale;
    }
    return x;
}

namespace {

hensel::LiftedSolution lift_payload(const Certificate& cert, long M) {
    if (cert.pair_witness) return hensel::solve_from_witness(*cert.pair_witness, M);
    if (cert.root_witness) return hensel::lift_poly_root(*cert.root_witness, M);
    throw InternalError("certificate has no liftable payload");
}

// Valuation slack a transcript can consume on the way back.
long transcript_slack(const Certificate& cert) {
    long slack = 0;
    for (const auto& st : cert.transcript.steps) {
        long worst = 0;
        for (const auto& act : st.actions)
            if (act.kind == VarAction::Map) worst = std::max(worst, std::max(0L, -vp_rat(act.mult, cert.p)));
        slack += worst * (long)cert.k + std::max(0L, vp_rat(st.scale_a, cert.p)) +
                 std::max(0L, vp_rat(st.scale_b, cert.p));
    }
    return slack;
}

} // namespace

Demo build_demo(const Certificate& cert, long M) {
    if (cert.kind == Certificate::ExactRational) {
        if (!cert.exact) throw InternalError("exact certificate without a vector");
        Demo d;
        d.M = M;
        d.x = primitive_scale(*cert.exact, cert.p);
        Rat ra = eval_a_rat(cert.input, d.x, cert.k);
        Rat rb = eval_b_rat(cert.input, d.x);
        d.vp_a = (ra == 0) ? kValInf : vp_rat(ra, cert.p);
        d.vp_b = (rb == 0) ? kValInf : vp_rat(rb, cert.p);
        d.unit_index = -1;
        for (long i = 0; i < (long)d.x.size(); ++i)
            if (d.x[i] != 0 && vp_rat(d.x[i], cert.p) == 0) d.unit_index = i;
        if (d.vp_a < M || d.vp_b < M) throw InternalError("exact certificate does not satisfy the input");
        return d;
    }

    long slack = transcript_slack(cert) + 2 * (long)cert.k + 4;
    for (int attempt = 0; attempt < 4; ++attempt) {
        hensel::LiftedSolution lifted = lift_payload(cert, M + slack);
        std::vector<Rat> x = cert.transcript.pull_back(lifted.x);
        x = primitive_scale(x, cert.p);
        Rat ra = eval_a_rat(cert.input, x, cert.k);
        Rat rb = eval_b_rat(cert.input, x);
        Demo d;
        d.M = M;
        d.x = x;
        d.vp_a = (ra == 0) ? kValInf : vp_rat(ra, cert.p);
        d.vp_b = (rb == 0) ? kValInf : vp_rat(rb, cert.p);
        d.unit_index = -1;
        for (long i = 0; i < (long)x.size(); ++i)
            if (x[i] != 0 && vp_rat(x[i], cert.p) == 0) {
                d.unit_index = i;
                break;
            }
        if (d.vp_a >= M && d.vp_b >= M && d.unit_index >= 0) return d;
        slack *= 2;
    }
    throw InternalError("demo construction failed to reach the requested precision");
}

VerifyResult verify_certificate(const Certificate& cert, const DiagLinSystem& original, long M) {
    VerifyResult res;
    auto fail = [&](const std::string& msg) {
        res.failure = msg;
        return res;
    };
    if (cert.input != original) return fail("certificate references a different input");

    if (cert.kind == Certificate::Unresolved) return fail("unresolved certificate");

    if (cert.kind == Certificate::InsolubilityDescent) {
        if (!cert.descent) return fail("missing descent payload");
        if (cert.descent->system != original) return fail("descent references a different system");
        std::string why;
        if (!verify_descent(*cert.descent, &why)) return fail("descent replay failed: " + why);
        res.ok = true;
        return res;
    }

    if (cert.kind == Certificate::ExactRational) {
        if (!cert.exact) return fail("missing exact payload");
        if ((long)cert.exact->size() != original.s()) return fail("exact payload dimension mismatch");
        bool nonzero = false;
        for (const Rat& r : *cert.exact)
            if (r != 0) nonzero = true;
        if (!nonzero) return fail("exact payload is trivial");
        if (eval_a_rat(original, *cert.exact, cert.k) != 0) return fail("exact payload misses the degree form");
        if (eval_b_rat(original, *cert.exact) != 0) return fail("exact payload misses the linear form");
        res.ok = true;
        return res;
    }

    // HenselWitness kind.
    DiagLinSystem base = original;
    if (cert.perturbation) {
        try {
            base = normalize::apply_perturbation(original, cert.p, *cert.perturbation);
        } catch (const Error& e) {
            return fail(std::string("perturbation replay failed: ") + e.what());
        }
        if (cert.perturbation->exponent < (cert.pair_witness ? cert.pair_witness->ctx.gamma : 1))
            return fail("perturbation exponent below gamma");
    }
    DiagLinSystem replayed;
    try {
        if (cert.transcript.source != base) return fail("transcript source differs from the (perturbed) input");
        replayed = cert.transcript.replay(cert.k);
    } catch (const Error& e) {
        return fail(std::string("invalid step: ") + e.what());
    }

    if (cert.pair_witness) {
        if (cert.pair_witness->system != replayed) return fail("witness system differs from the replayed system");
        auto chk = hensel::check_witness(*cert.pair_witness);
        if (!chk.ok) return fail("witness check failed: " + chk.failure);
    } else if (cert.root_witness) {
        if (cert.root_witness->system != replayed) return fail("witness system differs from the replayed system");
        auto chk = hensel::check_poly_root_witness(*cert.root_witness);
        if (!chk.ok) return fail("root witness check failed: " + chk.failure);
    } else {
        return fail("missing witness payload");
    }

    if (cert.raw_witness) {
        if (cert.raw_witness->system != original) return fail("raw witness references a different system");
        auto chk = hensel::check_witness(*cert.raw_witness);
        if (!chk.ok) return fail("raw witness check failed: " + chk.failure);
    }

    long target = std::min(M, 10L);
    try {
        Demo d = build_demo(cert, target);
        if (d.vp_a < target || d.vp_b < target) return fail("residual valuations too small");
        if (d.unit_index < 0) return fail("demo vector has no unit coordinate");
    } catch (const Error& e) {
        return fail(std::string("re-lift failed: ") + e.what());
    }
    res.ok = true;
    return res;
}

} // namespace padlin
