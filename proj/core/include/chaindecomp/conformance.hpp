#ifndef CHAINDECOMP_CONFORMANCE_HPP
#define CHAINDECOMP_CONFORMANCE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/model.hpp"

namespace chaindecomp {

/// Observable completions of one run: activity/rule-task ids with their
/// iteration suffixes, in firing order.
using Trace = std::vector<std::string>;
using TraceSet = std::set<Trace>;

inline constexpr int kDefaultTraceCap = 10000;

/// All observable traces of one instance type of the global model
/// (interleavings of parallel branches). Throws CapacityError beyond cap.
TraceSet replay_global(const ProcessModel& model, const InstanceType& instance,
                       int cap = kDefaultTraceCap);

/// All observable traces of the composed projections under the execution
/// contract: send/receive pairs fire as a rendezvous, a sign step enables
/// its referenced on-chain node, an oracle's participant half enables its
/// chain half, and a reverse oracle blocks until the chain model has
/// recorded the completion (or loop activation) it waits for, per loop
/// iteration. Throws DeadlockError when a started local process can no
/// longer finish.
TraceSet replay_composed(const std::map<std::string, ProcessModel>& projections,
                         const InstanceType& instance, int cap = kDefaultTraceCap);

struct ConformanceOptions {
    int loop_bound = kDefaultLoopBound;
    int instance_cap = kDefaultInstanceCap;
    int trace_cap = kDefaultTraceCap;
    std::uint64_t seed = 0;  // for the sampled fallback beyond caps
    int sample_count = 64;
};

struct InstanceResult {
    std::string instance;    // canonical valuation key
    std::string mode;        // "exhaustive", "sampled", or "error"
    std::size_t global_traces = 0;
    std::size_t composed_traces = 0;
    bool equal = false;
    std::vector<std::string> missing; // in global but not composed (capped)
    std::vector<std::string> extra;   // in composed but not global (capped)
    std::string note;
};

struct ConformanceReport {
    bool ok = false;
    int loop_bound = kDefaultLoopBound;
    std::uint64_t seed = 0;
    std::vector<InstanceResult> instances;
};

/// Replays every instance type on both sides and compares the trace sets.
/// Beyond the trace cap an instance degrades to a seeded sampled
/// comparison; the seed lands in the report.
ConformanceReport check_equivalence(const ProcessModel& global,
                                    const std::map<std::string, ProcessModel>& projections,
                                    const ConformanceOptions& options = {});

std::string emit_report(const ConformanceReport& report);

} // namespace chaindecomp

#endif
