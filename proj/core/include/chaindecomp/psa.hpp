#ifndef CHAINDECOMP_PSA_HPP
#define CHAINDECOMP_PSA_HPP

#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// Decision chains whose rule task is on-chain or tracked: the value is
/// already recorded on-chain, so chain-directed communications disappear
/// and the others become reverse oracles waiting on the rule task.
ProcessModel lower_decisions_recorded_on_chain(const ProcessModel& model);

/// Decision chains of an off-chain rule task with a chain recipient: an
/// oracle directly after the rule task stores the value on-chain, the
/// remaining communications become reverse oracles waiting on that oracle.
ProcessModel lower_decisions_via_oracle(const ProcessModel& model);

/// Decision chains that never touch the chain: plain send/receive pairs,
/// the receiver keeping a local replica of the variable.
ProcessModel lower_decisions_via_messages(const ProcessModel& model);

/// Handover into a chain-owned node whose source state is already on-chain:
/// the communication is redundant and is removed.
ProcessModel remove_redundant_chain_handovers(const ProcessModel& model);

/// Handover to the chain from an off-chain source: replaced by an oracle of
/// the sender.
ProcessModel lower_handover_to_oracle(const ProcessModel& model);

/// Handover from the chain to a participant: replaced by a reverse oracle
/// of the recipient waiting on the last on-chain step (or on the loop
/// activation when the handover starts a chain-owned loop).
ProcessModel lower_handover_to_reverse_oracle(const ProcessModel& model);

/// Handover between participants with a purely off-chain source: replaced
/// by a send/receive pair.
ProcessModel lower_handover_to_messages(const ProcessModel& model);

/// Handover between participants after an on-chain recorded step: replaced
/// by a reverse oracle of the recipient waiting on that step.
ProcessModel lower_handover_after_tracked(const ProcessModel& model);

/// Wraps every tracked task in on-chain start/end recording tasks.
ProcessModel wrap_tracked_tasks(const ProcessModel& model);

/// Inserts the off-chain sign step that triggers every participant-owned
/// on-chain task (including start/end recording tasks).
ProcessModel insert_sign_tasks(const ProcessModel& model);

/// The full platform-specific augmentation: decision rules, handover rules,
/// task rules, recursing into bodies. Throws UnresolvedCommunicationError
/// if any communication task survives.
ProcessModel derive_psa(const ProcessModel& model);

} // namespace chaindecomp

#endif
