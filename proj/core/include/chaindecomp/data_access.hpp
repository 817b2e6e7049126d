#ifndef CHAINDECOMP_DATA_ACCESS_HPP
#define CHAINDECOMP_DATA_ACCESS_HPP

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// Tracked reads of on-chain data: the start recording task fetches the
/// value, its sign step materializes a local replica the task reads.
ProcessModel localize_onchain_reads(const ProcessModel& model);

/// Tracked writes of on-chain data: the task writes a local replica, the
/// end recording task's sign step ships it, the end task commits it.
ProcessModel localize_onchain_writes(const ProcessModel& model);

/// Tracked reads of digest data: hash and value replicas plus a data
/// handler step after the start recording task that fetches the clear
/// text from the last writer (one handler per task, shared by all its
/// digest reads).
ProcessModel localize_digest_reads(const ProcessModel& model);

/// Tracked writes of digest data: the task writes the value replica, the
/// end task's sign step hashes it, the end task commits the digest.
ProcessModel localize_digest_writes(const ProcessModel& model);

/// Off-chain reads of on-chain data: a reverse oracle directly before the
/// task copies the values into local replicas (no wait — chain data is
/// readable at any time).
ProcessModel insert_offchain_read_oracles(const ProcessModel& model);

/// Off-chain data flow via the early-send strategy: after every writer of
/// an off-chain object, one send/receive pair per distinct reading actor
/// that may have this writer as its origin. Loops are approximated by
/// two-fold body duplication.
ProcessModel insert_early_sends(const ProcessModel& model,
                                int loop_bound = kDefaultLoopBound,
                                int cap = kDefaultInstanceCap);

/// All data-access rules in order.
ProcessModel apply_data_access(const ProcessModel& model,
                               int loop_bound = kDefaultLoopBound,
                               int cap = kDefaultInstanceCap);

} // namespace chaindecomp

#endif
