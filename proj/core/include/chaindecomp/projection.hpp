#ifndef CHAINDECOMP_PROJECTION_HPP
#define CHAINDECOMP_PROJECTION_HPP

#include <map>
#include <set>
#include <string>

#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// The model ids (participant names plus "chain") a node is projected to.
/// Off-chain work goes to its actor, on-chain work to the chain model,
/// oracles to both (submit and apply halves), gateways to every dependent
/// participant, sub-processes to everyone active inside.
std::set<std::string> projection_targets(const ProcessModel& model, const Graph& level,
                                         const std::string& node);

/// Extracts one executable model: keeps the target's nodes, reconnects
/// nodes that were transitively connected, synthesizes start/end events
/// where the extract does not begin or end with one, and keeps only the
/// data objects the extract references (replicas only for their owner).
ProcessModel project(const ProcessModel& model, const std::string& target);

/// Data objects belonging to a projected model.
std::set<std::string> project_data_objects(const ProcessModel& model, const std::string& target);

/// One model per participant plus the chain model, in ascending key order.
std::map<std::string, ProcessModel> project_all(const ProcessModel& model);

} // namespace chaindecomp

#endif
