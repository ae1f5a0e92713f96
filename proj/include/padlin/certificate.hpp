#pragma once

#include <optional>
#include <string>

#include "padlin/engine_common.hpp"
#include "padlin/normalize.hpp"

namespace padlin {

// Machine-checkable insolubility proof for block-graded systems: level by
// level, the unit parts of each block admit no nonempty zero subset sum mod
// p, so every solution is divisible by p in all coordinates.
struct DescentLevel {
    long level = 0;
    std::vector<long> block;      // variable indices with v_p(a_i) == level
    std::vector<Int> unit_parts;  // a_i / p^level
};

struct DescentTrace {
    DiagLinSystem system;
    Int p;
    unsigned long k = 0;
    std::vector<DescentLevel> levels;
    long forced_linear_index = -1; // the zero-degree variable forced by B
    std::string conclusion;
};

bool verify_descent(const DescentTrace& trace, std::string* why = nullptr);

// Demo data: a vector on the raw input with measured residual valuations.
struct Demo {
    long M = 0;
    std::vector<Rat> x;
    long vp_a = 0; // kValInf when the residual is exactly zero
    long vp_b = 0;
    long unit_index = -1;
};

struct Certificate {
    enum Kind { ExactRational, HenselWitness, InsolubilityDescent, Unresolved } kind = Unresolved;
    Int p;
    unsigned long k = 0;
    DiagLinSystem input;

    std::optional<normalize::Perturbation> perturbation;
    Transcript transcript; // from the (perturbed) input to the witness system

    std::optional<std::vector<Rat>> exact; // on the raw input
    std::optional<hensel::HenselWitness> pair_witness;
    std::optional<hensel::PolyRootWitness> root_witness;
    // Witness re-stated on the raw input, when the pivot survives transfer.
    std::optional<hensel::HenselWitness> raw_witness;
    std::optional<DescentTrace> descent;

    std::optional<Demo> demo;
    std::string engine, branch, detail;
};

// Lifts the certificate's witness to precision M on its own system, pulls the
// vector back through the transcript and the perturbation, and normalizes to
// a primitive vector on the raw input.
Demo build_demo(const Certificate& cert, long M);

// Scales a nonzero rational vector so its minimum valuation is zero.
std::vector<Rat> primitive_scale(std::vector<Rat> x, const Int& p);

struct VerifyResult {
    bool ok = false;
    std::string failure;
};

// Full replay: perturbation consistency, transcript recomputation, payload
// checks, re-lift to min(M, 10), residual valuations on the raw input, and
// nontriviality.
VerifyResult verify_certificate(const Certificate& cert, const DiagLinSystem& original, long M = 10);

} // namespace padlin
