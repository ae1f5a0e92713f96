#include "test_util.hpp"

#include "padlin/driver.hpp"
#include "padlin/json_io.hpp"

using namespace padlin;
using namespace padlin::test;
namespace dr = padlin::driver;

TEST_CASE("trivial exact solutions") {
    DiagLinSystem sys = mksys({1, -1, 2, 3}, {1, -1, 5, 7});
    auto cert = dr::solve(sys, Int(5), 4);
    CHECK(cert.kind == Certificate::ExactRational);
    CHECK(dr::verify(cert, sys).ok);
}

TEST_CASE("solve end-to-end on the quartic dead end") {
    DiagLinSystem sys = quartic_dead_end();
    dr::SolveOptions opts;
    opts.precision = 10;
    auto cert = dr::solve(sys, Int(2), 4, opts);
    CHECK(cert.kind == Certificate::HenselWitness);
    CHECK(cert.engine == "pow2");
    CHECK(cert.branch == "cycling");
    REQUIRE(cert.demo.has_value());
    CHECK(cert.demo->vp_a >= 10);
    CHECK(cert.demo->vp_b >= 10);
    CHECK(cert.demo->unit_index >= 0);
    CHECK(dr::verify(cert, sys).ok);
}

TEST_CASE("random systems per engine family") {
    std::mt19937_64 rng(13);
    struct Case {
        long p;
        unsigned long k;
        long s;
    };
    std::vector<Case> cases{{2, 4, 18}, {5, 4, 18}, {7, 4, 18}, {7, 6, 38}, {3, 6, 38}, {2, 8, 66}};
    for (auto [p, k, s] : cases) {
        for (int t = 0; t < 5; ++t) {
            DiagLinSystem sys = random_system(rng, s, 1000000);
            auto cert = dr::solve(sys, Int(p), k);
            INFO("p=" << p << " k=" << k << " t=" << t << " detail=" << cert.detail);
            CHECK(cert.kind != Certificate::Unresolved);
            CHECK(dr::verify(cert, sys).ok);
        }
    }
}

TEST_CASE("verify rejects tampering") {
    DiagLinSystem sys = quartic_dead_end();
    auto cert = dr::solve(sys, Int(2), 4);
    REQUIRE(cert.kind == Certificate::HenselWitness);

    Certificate bad = cert;
    REQUIRE(bad.pair_witness.has_value());
    bad.pair_witness->x[0] += 1;
    auto v = dr::verify(bad, sys);
    CHECK(!v.ok);

    Certificate bad2 = cert;
    REQUIRE(!bad2.transcript.steps.empty());
    bad2.transcript.steps[0].actions[0].mult = Rat(0);
    auto v2 = dr::verify(bad2, sys);
    CHECK(!v2.ok);
    CHECK(v2.failure.find("invalid step") != std::string::npos);

    DiagLinSystem other = mksys({1, 2}, {3, 4});
    CHECK(!dr::verify(cert, other).ok);
}

TEST_CASE("counterexample descent at p = 5") {
    auto cert = dr::verify_counterexample(Int(5));
    CHECK(cert.kind == Certificate::InsolubilityDescent);
    REQUIRE(cert.descent.has_value());
    CHECK(cert.descent->levels.size() == 4);
    CHECK(verify_descent(*cert.descent));
    CHECK(dr::verify(cert, cert.input).ok);
}

TEST_CASE("counterexample rejects p = 3") {
    CHECK_THROWS_AS(dr::verify_counterexample(Int(3)), NotApplicable);
}

TEST_CASE("descent verifier rejects bad traces") {
    auto cert = dr::verify_counterexample(Int(5));
    DescentTrace t = *cert.descent;
    t.levels[0].unit_parts[0] = 2; // no longer matches the system
    CHECK(!verify_descent(t));

    DescentTrace t2 = *cert.descent;
    t2.system.a[0] = 4; // 1 + 4 == 0 mod 5: a zero subset appears
    t2.levels[0].unit_parts[0] = 4;
    CHECK(!verify_descent(t2));
}

TEST_CASE("json round trip") {
    DiagLinSystem sys = quartic_dead_end();
    auto j = json_io::system_to_json(sys, Int(2), 4);
    Int p;
    unsigned long k;
    DiagLinSystem back = json_io::system_from_json(j, &p, &k);
    CHECK(back == sys);
    CHECK(p == 2);
    CHECK(k == 4);

    auto cert = dr::solve(sys, Int(2), 4);
    auto cj = json_io::certificate_to_json(cert);
    Certificate cback = json_io::certificate_from_json(cj);
    CHECK(cback.kind == cert.kind);
    CHECK(cback.input == cert.input);
    CHECK(cback.transcript.steps.size() == cert.transcript.steps.size());
    // The round-tripped certificate still verifies (demo is rebuilt).
    CHECK(dr::verify(cback, sys).ok);

    auto ce = dr::verify_counterexample(Int(5));
    auto cej = json_io::certificate_to_json(ce);
    Certificate ceback = json_io::certificate_from_json(cej);
    CHECK(dr::verify(ceback, ce.input).ok);

    // A contract-route certificate carries a polynomial-root witness.
    std::mt19937_64 rng(23);
    DiagLinSystem sys2 = random_system(rng, 18, 1000000);
    auto cert2 = dr::solve(sys2, Int(7), 4);
    REQUIRE(cert2.kind != Certificate::Unresolved);
    Certificate back2 = json_io::certificate_from_json(json_io::certificate_to_json(cert2));
    CHECK(dr::verify(back2, sys2).ok);
}

TEST_CASE("engine override") {
    std::mt19937_64 rng(17);
    DiagLinSystem sys = random_system(rng, 18, 1000);
    dr::SolveOptions opts;
    opts.engine = "contract";
    auto cert = dr::solve(sys, Int(5), 4, opts);
    if (cert.kind != Certificate::Unresolved) {
        CHECK(cert.engine == "contract");
        CHECK(dr::verify(cert, sys).ok);
    }
}

TEST_CASE("odd degree is attempted honestly") {
    std::mt19937_64 rng(19);
    DiagLinSystem sys = random_system(rng, 12, 100);
    auto cert = dr::solve(sys, Int(5), 5);
    if (cert.kind != Certificate::Unresolved) CHECK(dr::verify(cert, sys).ok);
}
