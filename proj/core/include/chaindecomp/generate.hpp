#ifndef CHAINDECOMP_GENERATE_HPP
#define CHAINDECOMP_GENERATE_HPP

#include <cstdint>

#include "chaindecomp/model.hpp"

namespace chaindecomp {

struct GeneratorOptions {
    std::uint64_t seed = 1;
    int max_tasks = 12;      // plain activities, not counting rule tasks
    int max_depth = 2;       // block nesting levels
    int max_loops = 1;
    int participants = 3;    // p1..pN besides the chain
    int max_decisions = 4;   // xor blocks + loops
    int max_instances = 64;  // regenerate if the model enumerates to more
    bool with_data = true;
};

/// A structurally valid, data-flow-clean, chain-compliant random model.
/// Deterministic per seed. Writes are single-assignment and reads only
/// reach definitely-written objects, so origins are unique by
/// construction; gateway actors are chain-retargeted where required.
ProcessModel random_valid_model(const GeneratorOptions& options);

} // namespace chaindecomp

#endif
