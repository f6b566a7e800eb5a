#pragma once

#include <string>
#include <vector>

#include "chorsec/harness.hpp"
#include "chorsec/semantics.hpp"
#include "chorsec/transform.hpp"

namespace chorsec {

// The refinement chain from the source program down to the distributed
// processes, all under one attack.
enum class Stage {
    Source,              // source program on the ideal host, sequential
    Choreography,        // choreography, ideal, sequential
    Corrupted,           // malicious hosts erased, ideal, sequential
    CorruptedConcurrent, // ideal, concurrent
    CorruptedReal,       // real, concurrent, synchronous moves
    CorruptedAsync,      // real, asynchronous moves
    Distributed,         // projected processes of the honest hosts
};
const char* to_string(Stage s);

struct Pipeline {
    const HostEnv* env = nullptr;
    Attack attack;
    StmtP choreography;

    Configuration config(Stage s) const;
};

// One simulation step: a target stage, a source stage and the simulator between them.
struct SimStage {
    std::string name;  // hosts, seq, ideal, proj, all
    Stage source;
    Stage target;
};

std::vector<SimStage> sim_stages();  // hosts, seq, ideal, proj
SimStage sim_stage(const std::string& name);
SimBuilder simulator_for(const Pipeline& p, const SimStage& s);

// Env input sites of the choreography, shared by every stage.
std::vector<int> pipeline_input_sites(const Pipeline& p);

}  // namespace chorsec
