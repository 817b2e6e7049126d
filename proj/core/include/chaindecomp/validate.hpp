#ifndef CHAINDECOMP_VALIDATE_HPP
#define CHAINDECOMP_VALIDATE_HPP

#include <string>
#include <vector>

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/model.hpp"

namespace chaindecomp {

enum class DiagnosticCode {
    Struct,            // meta-model / cardinality / blockedness violation
    XorRulePred,       // xor split not directly preceded by its rule task
    LoopBodyRule,      // loop body misses the rule-task-to-end edge
    DataflowNonUnique, // a read with more than one origin in some instance
    DataflowUninit,    // a read with no origin in some instance
    OnChainDataAccess, // on-chain task touching non-on-chain data
    OffChainDataAccess,// off-chain task writing non-off-chain or reading digest data
    BcControlFlowXor,  // xor gateways not chain-owned despite on-chain relevance
    BcControlFlowPar,  // par gateways not chain-owned despite on-chain relevance
    BcControlFlowLoop, // loop not chain-owned despite on-chain relevance
};

const char* to_string(DiagnosticCode c);

struct Diagnostic {
    DiagnosticCode code;
    std::string subject; // node or data object id
    std::string message; // human-readable, cites the violated rule

    bool operator==(const Diagnostic&) const = default;
};

/// Meta-model and control-flow structure checks: edge cardinalities,
/// full-blockedness, xor-predecessor rule, loop-body rule, membership of
/// actors/objects, decision variable assignment. Recurses into bodies.
std::vector<Diagnostic> validate_structure(const ProcessModel& model);

/// Origin uniqueness per instance type: every read must have exactly one
/// nearest writer on every path.
std::vector<Diagnostic> validate_data_flow(const ProcessModel& model,
                                           int loop_bound = kDefaultLoopBound,
                                           int cap = kDefaultInstanceCap);

/// Storage compatibility of task read/write sets (decision variables are
/// exempt; their movement is handled by the augmentation rules).
std::vector<Diagnostic> validate_blockchain_data_access(const ProcessModel& model);

/// Chain ownership of gateways and loops whose blocks contain on-chain
/// relevant nodes.
std::vector<Diagnostic> validate_blockchain_control_flow(const ProcessModel& model);

/// All checks, in order; data-flow checks only run on structurally valid
/// models.
std::vector<Diagnostic> validate(const ProcessModel& model, int loop_bound = kDefaultLoopBound,
                                 int cap = kDefaultInstanceCap);

/// Retargets every gateway/loop flagged by the control-flow check to the
/// chain actor, repeating until no finding remains.
ProcessModel fix_control_flow_actors(const ProcessModel& model);

} // namespace chaindecomp

#endif
