#include "test_util.hpp"

#include "padlin/engine_pow2.hpp"
#include "padlin/oracle.hpp"

using namespace padlin;
using namespace padlin::test;
namespace pw = padlin::pow2;

namespace {

void check_solved(const DiagLinSystem& sys, const PadicContext& ctx, const EngineOutcome& eo, long M = 10) {
    REQUIRE(eo.status == EngineOutcome::Solved);
    REQUIRE(eo.pair_witness.has_value());
    DiagLinSystem reached = eo.transcript.steps.empty() ? sys : eo.transcript.replay(ctx.k);
    CHECK(eo.pair_witness->system == reached);
    REQUIRE(hensel::check_witness(*eo.pair_witness).ok);
    auto lifted = hensel::solve_from_witness(*eo.pair_witness, M + 6);
    std::vector<Rat> x = eo.transcript.pull_back(lifted.x);
    Rat ra = eval_a_rat(sys, x, ctx.k);
    Rat rb = eval_b_rat(sys, x);
    CHECK((ra == 0 || vp_rat(ra, Int(2)) >= M));
    CHECK((rb == 0 || vp_rat(rb, Int(2)) >= M));
}

// Random class at an exact niveau with chosen parity and primality.
void push_class(pw::ContractionState& st, std::mt19937_64& rng, long niveau, bool even, bool primary) {
    pw::ContractionClass cl;
    cl.members = {};
    long odd = 1 + 2 * (long)(rng() % 300);
    cl.c = pow_ui(Int(2), (unsigned long)niveau) * Int(odd);
    cl.d = Int(2 * (long)(rng() % 200) + (even ? 0 : 1));
    cl.primary = primary;
    st.classes.push_back(cl);
}

pw::ContractionState blank_state() {
    pw::ContractionState st;
    st.ctx = make_context(Int(2), 8);
    st.sys = make_system({Int(1), Int(1)}, {Int(1), Int(1)}); // unused by the combinators
    return st;
}

} // namespace

TEST_CASE("elementary merges") {
    auto st = blank_state();
    std::mt19937_64 rng(1);

    // Two even primaries at exact niveau 1 merge upward.
    push_class(st, rng, 1, true, true);
    push_class(st, rng, 1, true, true);
    long id = pw::contract_even_same_niveau(st, {0, 1}, 1, 1);
    CHECK(st.classes[id].niveau(Int(2)) >= 2);
    CHECK(st.classes[id].even());
    CHECK(st.classes[id].primary);
}

TEST_CASE("executable contraction principles, randomized") {
    std::mt19937_64 rng(3);
    const long trials = 300;

    for (long l = 1; l <= 3; ++l) {
        for (long t = 0; t < trials; ++t) {
            auto st = blank_state();
            long nu = 1 + (long)(rng() % 2);
            long n = 1L << l;
            long prims = 1 + (long)(rng() % n);
            std::vector<long> ids;
            for (long i = 0; i < n; ++i) {
                bool primary = i < prims;
                // secondaries at the exact niveau; primaries may overshoot
                long niv = primary ? nu + (long)(rng() % 2) : nu;
                push_class(st, rng, niv, true, primary);
                ids.push_back(i);
            }
            long id = pw::contract_even_same_niveau(st, ids, nu, l);
            CHECK(st.classes[id].niveau(Int(2)) >= nu + l);
            CHECK(st.classes[id].even());
            CHECK(st.classes[id].primary);
        }
    }

    for (long l = 0; l <= 3; ++l) {
        for (long t = 0; t < trials; ++t) {
            auto st = blank_state();
            long nu = 1;
            long n = 2L << l;
            long prims = (1L << l) + (long)(rng() % (n - (1L << l) + 1));
            std::vector<long> ids;
            for (long i = 0; i < n; ++i) {
                bool primary = i < prims;
                long niv = primary ? nu : nu + (long)(rng() % (l + 1));
                push_class(st, rng, niv, true, primary);
                ids.push_back(i);
            }
            long id = pw::contract_even_spread(st, ids, nu, l);
            CHECK(st.classes[id].niveau(Int(2)) >= nu + l + 1);
            CHECK(st.classes[id].primary);
        }
    }

    for (long l = 1; l <= 3; ++l) {
        for (long t = 0; t < trials; ++t) {
            auto st = blank_state();
            long nu = 1 + (long)(rng() % 2);
            long n = (1L << l) + 2;
            long prims = 2 + (long)(rng() % (n - 1));
            std::vector<long> ids;
            for (long i = 0; i < n; ++i) {
                bool primary = i < prims;
                bool even = primary ? true : (rng() % 2 == 0);
                push_class(st, rng, nu, even, primary);
                ids.push_back(i);
            }
            long id = pw::contract_mixed_same_niveau(st, ids, nu, l);
            CHECK(st.classes[id].niveau(Int(2)) >= nu + l);
            CHECK(st.classes[id].primary);
        }
    }

    for (long l = 1; l <= 3; ++l) {
        for (long t = 0; t < trials; ++t) {
            auto st = blank_state();
            long nu = 1;
            long n = (2L << l) + 2;
            long prims = (1L << l) + (long)(rng() % (1L << l));
            std::vector<long> ids;
            for (long i = 0; i < n; ++i) {
                bool primary = i < prims;
                bool even = primary ? true : (rng() % 2 == 0);
                long niv = primary ? nu : nu + (long)(rng() % std::max(1L, l));
                push_class(st, rng, niv, even, primary);
                ids.push_back(i);
            }
            long id = pw::contract_mixed_spread(st, ids, nu, l);
            CHECK(st.classes[id].niveau(Int(2)) >= nu + l + 1);
            CHECK(st.classes[id].primary);
        }
    }
}

TEST_CASE("type A schedules") {
    std::mt19937_64 rng(5);
    PadicContext c4 = make_context(Int(2), 4);
    PadicContext c8 = make_context(Int(2), 8);
    int ran4 = 0, ran8 = 0;
    for (int t = 0; t < 60; ++t) {
        DiagLinSystem sys = random_conditioned(rng, c4, 18, 100000);
        // Force type A: clear odd linear coefficients off niveau 0.
        SystemStats st = stats(sys, c4);
        for (long i = 0; i < sys.s(); ++i)
            if (st.nu[i] != 0 && st.mu[i] == 0) sys.b[i] *= 2;
        if (!normalize::is_conditioned(sys, c4)) continue;
        if (stats(sys, c4).type != SystemType::A) continue;
        auto eo = pw::solve(sys, c4);
        check_solved(sys, c4, eo);
        ran4++;
    }
    for (int t = 0; t < 20; ++t) {
        DiagLinSystem sys = random_conditioned(rng, c8, 66, 100000);
        SystemStats st = stats(sys, c8);
        for (long i = 0; i < sys.s(); ++i)
            if (st.nu[i] != 0 && st.mu[i] == 0) sys.b[i] *= 2;
        if (!normalize::is_conditioned(sys, c8)) continue;
        if (stats(sys, c8).type != SystemType::A) continue;
        auto eo = pw::solve(sys, c8);
        check_solved(sys, c8, eo);
        ran8++;
    }
    CHECK(ran4 >= 20);
    CHECK(ran8 >= 5);
}

TEST_CASE("type B schedules") {
    std::mt19937_64 rng(7);
    PadicContext c4 = make_context(Int(2), 4);
    PadicContext c8 = make_context(Int(2), 8);
    int ran = 0;
    for (int t = 0; t < 80; ++t) {
        DiagLinSystem sys = random_conditioned(rng, c4, 18, 100000);
        if (stats(sys, c4).type != SystemType::B) continue;
        auto eo = pw::solve(sys, c4);
        check_solved(sys, c4, eo);
        ran++;
    }
    CHECK(ran >= 40);
    int ran8 = 0;
    for (int t = 0; t < 25; ++t) {
        DiagLinSystem sys = random_conditioned(rng, c8, 66, 100000);
        if (stats(sys, c8).type != SystemType::B) continue;
        auto eo = pw::solve(sys, c8);
        check_solved(sys, c8, eo);
        ran8++;
    }
    CHECK(ran8 >= 10);
}

TEST_CASE("cycling on the quartic dead end") {
    PadicContext ctx = make_context(Int(2), 4);
    DiagLinSystem raw = quartic_dead_end();
    auto pre = normalize::precondition(raw, ctx, 12);
    auto cond = normalize::condition(pre.system, ctx);
    const DiagLinSystem& sys = cond.system;

    // The congruence pair is dead, yet the engine solves via cycling.
    oracle::CongruenceQuery q{sys, ctx, 4, 1ul << 20};
    auto rep = oracle::find_nonsingular(q);
    CHECK(!rep.found);
    CHECK(rep.exhausted);

    auto sched = pw::schedule(sys, ctx);
    CHECK(sched.status == pw::ScheduleResult::NeedsCycling);

    auto eo = pw::cycling_solve(sys, ctx);
    check_solved(sys, ctx, eo);
    CHECK(eo.branch == "cycling");

    // The witness realizes the expected rotated values.
    REQUIRE(eo.pair_witness.has_value());
    const auto& w = *eo.pair_witness;
    Int A = eval_a(w.system, w.x, 4);
    CHECK(mod_pos(A, Int(16)) == 0);
}

TEST_CASE("cycling family with padded zeros") {
    // Replace the zero coefficients by 2^l for l in 4..8: conditioned type B
    // with ups3 = 3, all odd: the congruences stay dead but cycling solves.
    PadicContext ctx = make_context(Int(2), 4);
    for (long l = 4; l <= 8; ++l) {
        std::vector<Int> a, b;
        for (int i = 0; i < 15; ++i) {
            a.push_back(1);
            b.push_back(pow_ui(Int(2), (unsigned long)l));
        }
        for (int i = 0; i < 3; ++i) {
            a.push_back(8);
            b.push_back(1);
        }
        DiagLinSystem sys = make_system(a, b);
        REQUIRE(normalize::is_conditioned(sys, ctx));
        oracle::CongruenceQuery q{sys, ctx, 4, 1ul << 20};
        auto rep = oracle::find_nonsingular(q);
        CHECK(!rep.found);
        CHECK(rep.exhausted);
        auto eo = pw::solve(sys, ctx);
        check_solved(sys, ctx, eo);
        CHECK(eo.branch == "cycling");
    }
}

TEST_CASE("many schedule runs raise no rule violations") {
    std::mt19937_64 rng(11);
    PadicContext c4 = make_context(Int(2), 4);
    PadicContext c8 = make_context(Int(2), 8);
    long runs = 0;
    for (int t = 0; t < 800; ++t) {
        const PadicContext& ctx = (t % 3 == 0) ? c8 : c4;
        long s = (t % 3 == 0) ? 66 : 18;
        DiagLinSystem sys = random_conditioned(rng, ctx, s, 1000000);
        auto res = pw::schedule(sys, ctx);
        if (res.status == pw::ScheduleResult::NeedsCycling) {
            auto eo = pw::cycling_solve(sys, ctx);
            CHECK(eo.status == EngineOutcome::Solved);
        }
        runs++;
    }
    CHECK(runs == 800);
}
