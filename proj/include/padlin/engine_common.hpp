#pragma once

#include <optional>
#include <string>

#include "padlin/hensel.hpp"
#include "padlin/transform.hpp"

namespace padlin {

// What an engine hands back to the driver: a witness on a system reachable
// from the engine's input by the transcript, or an exact rational solution
// of the input itself.
struct EngineOutcome {
    enum Status { Solved, NotApplicable, Unresolved } status = Unresolved;
    std::optional<hensel::HenselWitness> pair_witness;
    std::optional<hensel::PolyRootWitness> root_witness;
    std::optional<std::vector<Rat>> exact; // on the engine input system
    Transcript transcript;                 // engine input -> witness system
    std::string branch;
    std::string detail;
};

} // namespace padlin
