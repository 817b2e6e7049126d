#ifndef CHAINDECOMP_PIA_HPP
#define CHAINDECOMP_PIA_HPP

#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// Loop augmentation: control-flow kickoff communications before every loop
/// for dependent participants owning no earlier node, and distribution of
/// the loop decision variable after the body's rule task (loop actor first,
/// then the other dependents in ascending order).
ProcessModel augment_loops(const ProcessModel& model);

/// Xor augmentation: distributes the decision variable to the split's
/// executor and all dependent participants between the rule task and the
/// split, and inserts control-flow handovers at branch entries and exits
/// where actors differ.
ProcessModel augment_xor_blocks(const ProcessModel& model);

/// Par augmentation: control-flow handovers at branch entries/exits where
/// actors differ, plus a kickoff communication before the split for every
/// actor active in both branches that owns no predecessor of the split.
ProcessModel augment_par_blocks(const ProcessModel& model);

/// Sequence augmentation: splits every cross-actor edge between ordinary
/// nodes with a control-flow handover communication. One deterministic
/// pass; inserted communications are not re-examined.
ProcessModel insert_handover_communications(const ProcessModel& model);

/// The platform-independent augmentation: loop, xor, par, then sequence
/// rules, innermost bodies first. Expects a model with no validator
/// findings.
ProcessModel derive_pia(const ProcessModel& model);

} // namespace chaindecomp

#endif
