#ifndef CHAINDECOMP_ANALYSIS_HPP
#define CHAINDECOMP_ANALYSIS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// A split/join pair with the two branch node-id sets strictly between them.
struct Block {
    std::string split;
    std::string join;
    std::vector<std::string> branches[2]; // ordered along each branch
};

/// The unique join closing the block of a xor/par split. Models are
/// full-blocked, so a nesting-depth scan along any path finds it; the scan
/// rejects graphs where paths disagree.
std::string find_matching_join(const Graph& g, const std::string& split);

/// The full block of a split, including branch membership.
Block block_of(const Graph& g, const std::string& split);

/// Node ids of this level that can reach `id` via edges (strict).
std::set<std::string> ancestors_of(const Graph& g, const std::string& id);

/// One loop-unrolled, gateway-resolved execution shape of a process:
/// a boolean per decision variable per loop-iteration context.
struct InstanceType {
    // (decision variable, iteration suffix like "" or "#1#2") -> value
    std::map<std::pair<std::string, std::string>, bool> valuation;
    int loop_bound = 2;

    bool value(const std::string& var, const std::string& suffix) const;
    std::string key() const; // canonical "var@suffix=0;..." form
};

inline constexpr int kDefaultLoopBound = 2;
inline constexpr int kDefaultInstanceCap = 4096;

/// All instance types of a model with loops unrolled up to loop_bound
/// iterations, in canonical order. Throws CapacityError above `cap`.
std::vector<InstanceType> enumerate_instance_types(const ProcessModel& model,
                                                   int loop_bound = kDefaultLoopBound,
                                                   int cap = kDefaultInstanceCap);

/// The loop-free, xor-free sub-graph selected by an instance type. Nodes
/// copied out of loop bodies get "#k" appended per iteration; xor and
/// sub-process boundary nodes are contracted away, par gateways stay.
ProcessModel unroll(const ProcessModel& model, const InstanceType& instance);

/// unroll variant for execution: additionally materializes pass-through
/// marker nodes for dropped xor gateways and for sub-process entry/exit, so
/// replay can record their on-chain events. Markers reuse the dropped
/// node's id (entry markers get an "@enter" stem) and are of type Start—
/// callers treat them as silent steps.
ProcessModel unroll_for_execution(const ProcessModel& model, const InstanceType& instance);

/// Nearest predecessors of `reader` writing `object`, per path, unioned.
/// Empty result = no path carries a writer (uninitialized read).
std::set<std::string> origin_of(const ProcessModel& unrolled, const std::string& reader,
                                const std::string& object);

/// Like origin_of, but also reports whether some path from the entry to the
/// reader carries no writer at all.
struct OriginResult {
    std::set<std::string> writers;
    bool uninitialized_path = false;
};
OriginResult origin_of_detailed(const ProcessModel& unrolled, const std::string& reader,
                                const std::string& object);

/// Actors owning any node of the block's branches in both branches, plus
/// actors owning a node in exactly one branch and any node outside the
/// block. Ownership recurses into sub-process bodies.
std::set<std::string> dependent_actors_xor(const Graph& g, const Block& block);

/// The loop's actor plus the actors of all body nodes, recursively.
std::set<std::string> dependent_actors_loop(const Graph& g, const std::string& loop);

/// Actors of all nodes in a graph, recursing into bodies.
std::set<std::string> actors_of(const Graph& g);

} // namespace chaindecomp

#endif
