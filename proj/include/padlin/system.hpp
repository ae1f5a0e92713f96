#pragma once

#include <vector>

#include "padlin/context.hpp"

namespace padlin {

// One diagonal form of degree k plus one linear form:
//
//   A(x) = sum a_i x_i^k + const_a,   B(x) = sum b_i x_i + const_b.
//
// Inputs are homogeneous (const_a = const_b = 0); nonzero constants only
// appear on derived systems after freeze steps.
struct DiagLinSystem {
    std::vector<Int> a;
    std::vector<Int> b;
    Int const_a{0};
    Int const_b{0};

    long s() const { return (long)a.size(); }
    bool homogeneous() const { return const_a == 0 && const_b == 0; }
    bool operator==(const DiagLinSystem& o) const = default;
};

DiagLinSystem make_system(std::vector<Int> a, std::vector<Int> b);

Int eval_a(const DiagLinSystem& sys, const std::vector<Int>& x, unsigned long k);
Int eval_b(const DiagLinSystem& sys, const std::vector<Int>& x);
Rat eval_a_rat(const DiagLinSystem& sys, const std::vector<Rat>& x, unsigned long k);
Rat eval_b_rat(const DiagLinSystem& sys, const std::vector<Rat>& x);

enum class SystemType { A, B };

// Per-variable valuation data.  upsilon counts nonzero a_i by nu_i mod k;
// level_i = min(mu_i, nu_i); low_i <=> mu_i < nu_i.  Type A means every
// variable outside niveau 0 has p | b_i.
struct SystemStats {
    std::vector<long> nu;
    std::vector<long> mu;
    std::vector<long> upsilon;
    std::vector<long> levels;
    std::vector<bool> low_flags;
    SystemType type = SystemType::A;
};

SystemStats stats(const DiagLinSystem& sys, const PadicContext& ctx);

} // namespace padlin
