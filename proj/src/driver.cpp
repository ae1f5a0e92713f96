#include "padlin/driver.hpp"

#include <algorithm>

#include "padlin/engine_pm1.hpp"
#include "padlin/engine_pow2.hpp"
#include "padlin/engine_ppm1.hpp"

namespace padlin::driver {

namespace {

// Small-height exact solutions on supports of size one or two.
std::optional<std::vector<Rat>> small_height_search(const DiagLinSystem& sys, unsigned long k) {
    long s = sys.s();
    for (long i = 0; i < s; ++i)
        if (sys.a[i] == 0 && sys.b[i] == 0) {
            std::vector<Rat> x(s, Rat(0));
            x[i] = 1;
            return x;
        }
    for (long i = 0; i < s; ++i)
        for (long j = i + 1; j < s; ++j)
            for (long u = -2; u <= 2; ++u)
                for (long v = -2; v <= 2; ++v) {
                    if (u == 0 && v == 0) continue;
                    Int A = sys.a[i] * pow_ui(Int(u), k) + sys.a[j] * pow_ui(Int(v), k);
                    Int B = sys.b[i] * Int(u) + sys.b[j] * Int(v);
                    if (A == 0 && B == 0) {
                        std::vector<Rat> x(s, Rat(0));
                        x[i] = u;
                        x[j] = v;
                        return x;
                    }
                }
    return std::nullopt;
}

Certificate base_certificate(const DiagLinSystem& sys, const Int& p, unsigned long k) {
    Certificate cert;
    cert.p = p;
    cert.k = k;
    cert.input = sys;
    return cert;
}

Transcript chain(const Transcript& first, const Transcript& second) {
    Transcript out = first;
    for (const auto& st : second.steps) out.append(st);
    return out;
}

// Restate a near-solution of the raw input as a witness on the raw input
// itself, when a surviving pivot exists.
std::optional<hensel::HenselWitness> raw_witness_from_vector(const DiagLinSystem& raw, const PadicContext& ctx,
                                                             const std::vector<Rat>& vec) {
    if (!ctx.tau) return std::nullopt;
    Int pg = ctx.gamma_modulus();
    std::vector<Int> x(vec.size());
    for (size_t i = 0; i < vec.size(); ++i) {
        if (vec[i] != 0 && vp_rat(vec[i], ctx.p) < 0) return std::nullopt;
        Int num = mod_pos(vec[i].get_num(), pg);
        Int den = invmod(mod_pos(vec[i].get_den(), pg), pg);
        x[i] = mod_pos(num * den, pg);
    }
    hensel::HenselWitness w;
    w.system = raw;
    w.ctx = ctx;
    w.x = x;
    for (long i = 0; i < raw.s(); ++i)
        for (long j = i + 1; j < raw.s(); ++j) {
            w.pivot_i = i;
            w.pivot_j = j;
            if (hensel::check_witness(w).ok) return w;
        }
    return std::nullopt;
}

// Certificate built directly from a raw-input witness.
Certificate certificate_from_raw_witness(const DiagLinSystem& raw, const Int& p, unsigned long k,
                                         const hensel::HenselWitness& w, const std::string& engine,
                                         const std::string& branch, long M) {
    Certificate cert = base_certificate(raw, p, k);
    cert.kind = Certificate::HenselWitness;
    cert.engine = engine;
    cert.branch = branch;
    cert.transcript.source = raw;
    cert.pair_witness = w;
    cert.raw_witness = w;
    cert.demo = build_demo(cert, M);
    return cert;
}

} // namespace

DiagLinSystem counterexample_system(const Int& p) {
    if (p < 5) throw NotApplicable("counterexample needs p >= 5");
    unsigned long k = (unsigned long)Int(p - 1).get_ui();
    long s = (long)(k * k) + 1;
    std::vector<Int> a, b;
    for (unsigned long j = 0; j < k; ++j)
        for (unsigned long l = 0; l < k; ++l) a.push_back(pow_ui(p, j));
    a.push_back(0);
    b.assign(s, Int(0));
    b[s - 2] = 1;
    b[s - 1] = 1;
    return make_system(a, b);
}

Certificate solve(const DiagLinSystem& sys, const Int& p, unsigned long k, const SolveOptions& opts) {
    if (k < 4) throw InvalidInput("degree must be at least 4");
    if (sys.s() < 2) throw InvalidInput("need at least two variables");
    if (!sys.homogeneous()) throw InvalidInput("input must be homogeneous");
    PadicContext ctx = make_context(p, k);
    long M = opts.precision;

    Certificate cert = base_certificate(sys, p, k);

    if (auto x = small_height_search(sys, k)) {
        cert.kind = Certificate::ExactRational;
        cert.exact = *x;
        cert.engine = "shortcut";
        cert.branch = "small-height";
        cert.demo = build_demo(cert, M);
        return cert;
    }

    bool all_b_zero = std::all_of(sys.b.begin(), sys.b.end(), [](const Int& v) { return v == 0; });
    bool all_a_zero = std::all_of(sys.a.begin(), sys.a.end(), [](const Int& v) { return v == 0; });
    if (all_a_zero) {
        // Degree form vanishes identically: a kernel vector of the linear
        // form (two-term cancellation always exists for s >= 2).
        long i = 0;
        while (i < sys.s() && sys.b[i] == 0) ++i;
        long j = (i == 0) ? 1 : 0;
        std::vector<Rat> x(sys.s(), Rat(0));
        x[j] = Rat(sys.b[i]);
        x[i] = Rat(-sys.b[j]);
        if (x[i] == 0 && x[j] == 0) x[j] = 1;
        cert.kind = Certificate::ExactRational;
        cert.exact = x;
        cert.engine = "shortcut";
        cert.branch = "zero-degree-form";
        cert.demo = build_demo(cert, M);
        return cert;
    }

    // Pure diagonal route when the linear form is identically zero.
    if (all_b_zero) {
        contract_engine::DiagonalEquation eq{sys.a, k, p};
        auto out = contract_engine::solve_diagonal(eq, M + 2, opts.budget);
        cert.engine = "contract";
        cert.branch = out.detail;
        if (out.status == contract_engine::DiagonalOutcome::ExactSolution) {
            cert.kind = Certificate::ExactRational;
            cert.exact = out.x;
            cert.demo = build_demo(cert, M);
            return cert;
        }
        if (out.status == contract_engine::DiagonalOutcome::Lifted) {
            cert.kind = Certificate::HenselWitness;
            cert.root_witness = out.witness;
            cert.transcript.source = sys;
            for (const auto& st : out.steps) cert.transcript.append(st);
            cert.demo = build_demo(cert, M);
            auto v = verify(cert, sys, std::min(M, 10L));
            if (!v.ok) throw InternalError("diagonal certificate failed self-verification: " + v.failure);
            return cert;
        }
        cert.kind = Certificate::Unresolved;
        cert.detail = out.detail;
        return cert;
    }

    // Normalization pipeline.
    auto pre = normalize::precondition(sys, ctx, std::max(M, 12L));
    auto cond = normalize::condition(pre.system, ctx);
    Transcript to_cond = chain(pre.transcript, cond.transcript);
    const DiagLinSystem& S = cond.system;

    auto dis = contract_engine::dispatch_case(ctx);
    std::string engine_name = opts.engine;
    if (engine_name == "auto") {
        switch (dis.tag) {
        case contract_engine::EngineTag::Pow2: engine_name = "pow2"; break;
        case contract_engine::EngineTag::Pm1: engine_name = "pm1"; break;
        case contract_engine::EngineTag::Ppm1: engine_name = "ppm1"; break;
        default: engine_name = "contract"; break;
        }
    }

    auto finish_engine = [&](const EngineOutcome& eo, const std::string& engine) -> Certificate {
        Certificate c = base_certificate(sys, p, k);
        c.perturbation = pre.perturbation;
        c.engine = engine;
        c.branch = eo.branch;
        c.detail = eo.detail;
        if (eo.status != EngineOutcome::Solved) {
            c.kind = Certificate::Unresolved;
            return c;
        }
        if (eo.exact) {
            std::vector<Rat> x = to_cond.pull_back(*eo.exact);
            if (!pre.perturbation) {
                c.kind = Certificate::ExactRational;
                c.exact = x;
                c.demo = build_demo(c, M);
                return c;
            }
            // Exact on the perturbed system only: restate as a raw witness.
            if (auto w = raw_witness_from_vector(sys, ctx, primitive_scale(x, p)))
                return certificate_from_raw_witness(sys, p, k, *w, engine, eo.branch + "+transfer", M);
            c.kind = Certificate::Unresolved;
            c.detail = "exact solution of the perturbed system only";
            return c;
        }
        c.kind = Certificate::HenselWitness;
        c.transcript = chain(to_cond, eo.transcript);
        c.pair_witness = eo.pair_witness;
        c.root_witness = eo.root_witness;
        c.demo = build_demo(c, M);
        if (pre.perturbation && c.demo) c.raw_witness = raw_witness_from_vector(sys, ctx, c.demo->x);
        auto v = verify(c, sys, std::min(M, 10L));
        if (!v.ok) throw InternalError("certificate failed self-verification: " + v.failure);
        return c;
    };

    auto run_contract = [&]() -> Certificate {
        auto [eq, tr] = contract_engine::contract_linear(S, ctx);
        auto out = contract_engine::solve_diagonal(eq, M + 4, opts.budget);
        Certificate c = base_certificate(sys, p, k);
        c.perturbation = pre.perturbation;
        c.engine = "contract";
        c.branch = out.detail;
        if (out.status == contract_engine::DiagonalOutcome::Unresolved) {
            c.kind = Certificate::Unresolved;
            c.detail = out.detail;
            return c;
        }
        Transcript full = chain(to_cond, tr);
        for (const auto& st : out.steps) full.append(st);
        if (out.status == contract_engine::DiagonalOutcome::ExactSolution) {
            std::vector<Rat> x = full.pull_back(out.x);
            if (!pre.perturbation) {
                c.kind = Certificate::ExactRational;
                c.exact = x;
                c.demo = build_demo(c, M);
                return c;
            }
            if (auto w = raw_witness_from_vector(sys, ctx, primitive_scale(x, p)))
                return certificate_from_raw_witness(sys, p, k, *w, "contract", "diagonal-exact+transfer", M);
            c.kind = Certificate::Unresolved;
            c.detail = "exact solution of the perturbed system only";
            return c;
        }
        c.kind = Certificate::HenselWitness;
        c.root_witness = out.witness;
        c.transcript = full;
        c.demo = build_demo(c, M);
        if (pre.perturbation && c.demo) c.raw_witness = raw_witness_from_vector(sys, ctx, c.demo->x);
        auto v = verify(c, sys, std::min(M, 10L));
        if (!v.ok) throw InternalError("contract certificate failed self-verification: " + v.failure);
        return c;
    };

    EngineOutcome eo;
    eo.status = EngineOutcome::NotApplicable;
    if (engine_name != "contract") {
        try {
            if (engine_name == "pow2")
                eo = pow2::solve(S, ctx);
            else if (engine_name == "pm1")
                eo = pm1::solve(S, ctx);
            else if (engine_name == "ppm1")
                eo = ppm1::solve(S, ctx);
            else
                throw InvalidInput("unknown engine: " + engine_name);
        } catch (const NotApplicable&) {
            eo.status = EngineOutcome::NotApplicable;
        }
        if (eo.status == EngineOutcome::Solved) return finish_engine(eo, engine_name);
    }

    Certificate c = run_contract();
    if (c.kind == Certificate::Unresolved && eo.status == EngineOutcome::Unresolved)
        c.detail = "engine unresolved: " + eo.detail + "; " + c.detail;
    return c;
}

VerifyResult verify(const Certificate& cert, const DiagLinSystem& original, long M) {
    try {
        return verify_certificate(cert, original, M);
    } catch (const std::exception& e) {
        VerifyResult r;
        r.failure = std::string("verification threw: ") + e.what();
        return r;
    }
}

Certificate verify_counterexample(const Int& p, const SolveOptions& opts) {
    if (p < 5) throw NotApplicable("counterexample needs p >= 5 (k = p-1 >= 4)");
    unsigned long k = (unsigned long)Int(p - 1).get_ui();
    DiagLinSystem sys = counterexample_system(p);

    Certificate cert = base_certificate(sys, p, k);
    cert.kind = Certificate::InsolubilityDescent;
    cert.engine = "descent";

    DescentTrace trace;
    trace.system = sys;
    trace.p = p;
    trace.k = k;
    for (unsigned long j = 0; j < k; ++j) {
        DescentLevel lv;
        lv.level = (long)j;
        for (unsigned long l = 0; l < k; ++l) {
            lv.block.push_back((long)(j * k + l));
            lv.unit_parts.push_back(1);
        }
        trace.levels.push_back(lv);
    }
    trace.forced_linear_index = sys.s() - 1;
    trace.conclusion = "every p-adic solution vanishes mod p in all coordinates; no primitive solution exists";
    std::string why;
    if (!verify_descent(trace, &why)) throw InternalError("descent construction failed: " + why);
    cert.descent = trace;

    // The solver must not claim a solution on this input.
    Certificate attempt = solve(sys, p, k, opts);
    if (attempt.kind != Certificate::Unresolved)
        throw InternalError("solver claimed a solution of the sharpness example");
    cert.detail = "solver outcome on the same input: unresolved, as required";
    return cert;
}

} // namespace padlin::driver
