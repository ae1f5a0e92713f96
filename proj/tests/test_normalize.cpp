#include "test_util.hpp"

#include "padlin/hensel.hpp"

using namespace padlin;
using namespace padlin::test;
namespace nm = padlin::normalize;

TEST_CASE("precondition basics") {
    PadicContext ctx = make_context(Int(5), 4);

    auto r1 = nm::precondition(mksys({1, 0}, {2, 2}), ctx);
    REQUIRE(r1.perturbation.has_value());
    CHECK(r1.perturbation->a_indices == std::vector<long>{1});
    CHECK(vp(r1.system.a[1], Int(5)) == r1.perturbation->exponent);
    CHECK(r1.system.b == std::vector<Int>{Int(2), Int(2)});

    auto r2 = nm::precondition(mksys({1, 1}, {5, 10}), ctx);
    CHECK(!r2.perturbation.has_value());
    CHECK(r2.system.b == std::vector<Int>{Int(1), Int(2)});

    DiagLinSystem ok = mksys({1, 2, 3, 4}, {1, 1, 1, 1});
    auto r3 = nm::precondition(ok, ctx);
    CHECK(r3.system == ok);
    CHECK(r3.transcript.steps.empty());

    CHECK_THROWS_AS(nm::precondition(mksys({1, 1}, {0, 0}), ctx), InvalidInput);
}

TEST_CASE("cyclic shift selection") {
    PadicContext ctx = make_context(Int(5), 4);
    // s=8, k=4, upsilon = (1,5,1,1): shift 1 conditions it.
    std::vector<long> a{1, 5, 5, 5, 5, 5, 25, 125}, b(8, 1);
    auto cond = nm::condition(mksys(a, b), ctx);
    CHECK(cond.shift == 1);
    CHECK(cond.upsilon_after == std::vector<long>{5, 1, 1, 1});
    CHECK(nm::is_conditioned(cond.system, ctx));

    // Already conditioned: shift 0.
    std::vector<long> a2{1, 1, 1, 1, 1, 5, 25, 125};
    auto cond2 = nm::condition(mksys(a2, b), ctx);
    CHECK(cond2.shift == 0);
    CHECK(cond2.upsilon_after == std::vector<long>{5, 1, 1, 1});
}

TEST_CASE("quartic dead-end family conditions with its zero linear slots perturbed") {
    PadicContext ctx = make_context(Int(2), 4);
    auto pre = nm::precondition(quartic_dead_end(), ctx, 12);
    REQUIRE(pre.perturbation.has_value());
    CHECK(pre.perturbation->exponent >= 4);
    CHECK(pre.perturbation->b_indices.size() == 15);
    auto cond = nm::condition(pre.system, ctx);
    CHECK(cond.upsilon_after == std::vector<long>{15, 0, 0, 3});
    CHECK(nm::is_conditioned(cond.system, ctx));
}

TEST_CASE("is_conditioned") {
    PadicContext ctx = make_context(Int(5), 4);
    std::vector<long> b(8, 1);
    CHECK(nm::is_conditioned(mksys({1, 1, 1, 1, 1, 5, 25, 125}, b), ctx));
    CHECK(!nm::is_conditioned(mksys({1, 5, 5, 5, 5, 5, 25, 125}, b), ctx));
    std::vector<long> b5(8, 5);
    CHECK(!nm::is_conditioned(mksys({1, 1, 1, 1, 1, 5, 25, 125}, b5), ctx));
}

TEST_CASE("conditioning output always conditions; pull-back is exact") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 150; ++t) {
        PadicContext ctx = make_context(Int(t % 2 ? 5 : 2), 4);
        DiagLinSystem sys = random_system(rng, 8, 100000);
        auto pre = nm::precondition(sys, ctx);
        auto cond = nm::condition(pre.system, ctx);
        CHECK(nm::is_conditioned(cond.system, ctx));

        // The transform identities hold on arbitrary vectors.
        Transcript full = pre.transcript;
        for (auto& st : cond.transcript.steps) full.append(st);
        std::vector<Rat> y(cond.system.s());
        for (auto& v : y) v = Rat((long)(rng() % 7) - 3);
        std::vector<Rat> x = full.pull_back(y);
        Rat sa(1), sb(1);
        for (auto& st : full.steps) {
            sa *= st.scale_a;
            sb *= st.scale_b;
        }
        CHECK(eval_a_rat(pre.system, x, ctx.k) * sa == eval_a_rat(cond.system, y, ctx.k));
        CHECK(eval_b_rat(pre.system, x) * sb == eval_b_rat(cond.system, y));
    }
}

TEST_CASE("witnesses transfer through the perturbation") {
    // A witness of the perturbed system whose data only touches unperturbed
    // coordinates mod p^gamma is verbatim a witness of the original.
    PadicContext ctx = make_context(Int(5), 4);
    DiagLinSystem orig = mksys({1, 1, 3, 0}, {1, 2, 2, 1});
    auto pre = nm::precondition(orig, ctx);
    REQUIRE(pre.perturbation.has_value());
    REQUIRE(pre.perturbation->exponent >= ctx.gamma);

    hensel::HenselWitness w;
    w.system = pre.system;
    w.ctx = ctx;
    w.x = {Int(1), Int(1), Int(1), Int(0)};
    w.pivot_i = 0;
    w.pivot_j = 1;
    REQUIRE(hensel::check_witness(w).ok);

    hensel::HenselWitness on_orig = w;
    on_orig.system = orig;
    CHECK(hensel::check_witness(on_orig).ok);
}
