#pragma once

#include <string>
#include <vector>

#include "padlin/system.hpp"

namespace padlin {

// One invertible-with-pullback rewrite of a system.  Every old variable is
// either zeroed, frozen at an exact rational value, or mapped monomially
// onto one new variable: x_i := mult_i * y_{target_i}.  The two equations
// are additionally scaled by nonzero rationals.  Derived coefficients must
// come out integral; apply_transform enforces that.
struct VarAction {
    enum Kind { Zero, Map, Freeze } kind = Zero;
    long target = -1; // Map
    Rat mult{1};      // Map, nonzero
    Rat value{0};     // Freeze
};

struct TransformStep {
    std::vector<VarAction> actions; // one per old variable
    long new_size = 0;
    Rat scale_a{1};
    Rat scale_b{1};
    std::string note;
};

DiagLinSystem apply_transform(const DiagLinSystem& sys, const TransformStep& step, unsigned long k);

// Solution pull-back through one step: x_i = mult_i * y_{target_i}, frozen
// value, or 0.
std::vector<Rat> pull_back_step(const TransformStep& step, const std::vector<Rat>& y);

struct Transcript {
    DiagLinSystem source;
    std::vector<TransformStep> steps;

    DiagLinSystem replay(unsigned long k) const;
    std::vector<Rat> pull_back(std::vector<Rat> y) const;
    void append(const TransformStep& step) { steps.push_back(step); }
};

// Convenience builders.
TransformStep identity_step(long s);
TransformStep permutation_step(const std::vector<long>& new_index_of_old, const char* note = "permute");
TransformStep zero_except_step(long s, const std::vector<long>& keep, const char* note = "restrict");

} // namespace padlin
