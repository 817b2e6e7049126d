#ifndef CHAINDECOMP_ISOMORPHISM_HPP
#define CHAINDECOMP_ISOMORPHISM_HPP

#include <string>

#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// Structural equivalence of two models modulo node ids: nodes must match
/// on type, actor, exec, recipient, condition and wait kind, read/write
/// sets must agree up to replica identity (owner and replicated object),
/// node references (sign/start/end targets, wait targets) must map onto
/// each other, and bodies must be isomorphic recursively. Backtracking
/// search; intended for the small rule-application fixtures.
bool isomorphic(const ProcessModel& a, const ProcessModel& b);

/// Like isomorphic, but ignores read/write sets and data objects entirely:
/// used to compare a platform-specific model stripped of augmentation
/// nodes against the original global process, whose data wiring the
/// augmentation legitimately moved.
bool isomorphic_control_flow(const ProcessModel& a, const ProcessModel& b);

/// Removes every augmentation node (communications, signs, start/end
/// recorders, oracles, reverse oracles, sends, receives, data handlers)
/// and reconnects their neighbours. The inverse image of the augmentation:
/// applying this to a platform-specific model should recover the global
/// process graph.
ProcessModel erase_augmentation(const ProcessModel& model);

/// Diff-style explanation of the first mismatch found, for test output;
/// empty when models are isomorphic.
std::string isomorphism_mismatch(const ProcessModel& a, const ProcessModel& b);

} // namespace chaindecomp

#endif
