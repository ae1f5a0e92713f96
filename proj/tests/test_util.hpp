#pragma once

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padlin/normalize.hpp"

namespace padlin::test {

inline DiagLinSystem mksys(std::vector<long> a, std::vector<long> b) {
    std::vector<Int> ai, bi;
    for (long x : a) ai.push_back(Int(x));
    for (long x : b) bi.push_back(Int(x));
    return make_system(ai, bi);
}

inline Int rand_coeff(std::mt19937_64& rng, long bound = 1000000) {
    std::uniform_int_distribution<long> d(-bound, bound);
    long v = d(rng);
    while (v == 0) v = d(rng);
    return Int(v);
}

inline DiagLinSystem random_system(std::mt19937_64& rng, long s, long bound = 1000000) {
    std::vector<Int> a(s), b(s);
    for (long i = 0; i < s; ++i) {
        a[i] = rand_coeff(rng, bound);
        b[i] = rand_coeff(rng, bound);
    }
    return make_system(a, b);
}

inline DiagLinSystem random_conditioned(std::mt19937_64& rng, const PadicContext& ctx, long s,
                                        long bound = 1000000) {
    DiagLinSystem sys = random_system(rng, s, bound);
    auto pre = normalize::precondition(sys, ctx);
    auto cond = normalize::condition(pre.system, ctx);
    return cond.system;
}

// The 18-variable quartic family: x_1^4+...+x_15^4 + 8(y_1^4+y_2^4+y_3^4),
// y_1+y_2+y_3 = 0.
inline DiagLinSystem quartic_dead_end() {
    std::vector<long> a, b;
    for (int i = 0; i < 15; ++i) {
        a.push_back(1);
        b.push_back(0);
    }
    for (int i = 0; i < 3; ++i) {
        a.push_back(8);
        b.push_back(1);
    }
    return mksys(a, b);
}

} // namespace padlin::test
