#include "chaindecomp/data_access.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "chaindecomp/errors.hpp"

namespace chaindecomp {

namespace {

void set_add(std::vector<std::string>& v, const std::string& id) {
    auto it = std::lower_bound(v.begin(), v.end(), id);
    if (it == v.end() || *it != id) v.insert(it, id);
}

void set_remove(std::vector<std::string>& v, const std::string& id) {
    auto it = std::lower_bound(v.begin(), v.end(), id);
    if (it != v.end() && *it == id) v.erase(it);
}

std::optional<Storage> storage_of(const ProcessModel& model, const std::string& id) {
    const DataObject* o = model.find_object(id);
    if (!o || o->kind != ObjectKind::Global || model.is_decision_var(id)) return std::nullopt;
    return o->storage;
}

// The start/end recording wrapper of a tracked task and their sign steps.
struct Wrapper {
    std::string start, end, sign_start, sign_end;
};

Wrapper wrapper_of(const Graph& g, const std::string& task) {
    Wrapper w;
    for (const Node& n : g.nodes) {
        if (n.ref != task) continue;
        if (n.type == NodeType::StartTask) w.start = n.id;
        if (n.type == NodeType::EndTask) w.end = n.id;
    }
    for (const Node& n : g.nodes) {
        if (n.type != NodeType::Sign) continue;
        if (n.ref == w.start) w.sign_start = n.id;
        if (n.ref == w.end) w.sign_end = n.id;
    }
    if (w.start.empty() || w.end.empty() || w.sign_start.empty() || w.sign_end.empty())
        throw MissingWrapperError("tracked task '" + task +
                                  "' lacks its start/end recording or sign steps; run the "
                                  "platform-specific lowering first");
    return w;
}

ProcessModel apply_recursive(const ProcessModel& model,
                             const std::function<void(ProcessModel&, Graph&)>& rule) {
    ProcessModel out = model;
    std::function<void(Graph&)> walk = [&](Graph& g) {
        for (size_t i = 0; i < g.nodes.size(); ++i)
            if (g.nodes[i].body) walk(*g.nodes[i].body);
        rule(out, g);
    };
    walk(out.graph);
    return out;
}

std::vector<std::string> tracked_tasks(const Graph& g) {
    std::vector<std::string> out;
    for (const Node& n : g.nodes)
        if (n.is_task() && n.exec == ExecMode::Tracked) out.push_back(n.id);
    return out;
}

void onchain_reads_level(ProcessModel& model, Graph& g) {
    for (const std::string& tid : tracked_tasks(g)) {
        for (const std::string& d : std::vector<std::string>(g.at(tid).read)) {
            if (storage_of(model, d) != Storage::OnChain) continue;
            Wrapper w = wrapper_of(g, tid);
            Node& t = g.at(tid);
            std::string replica = model.ensure_replica(ObjectKind::Local, t.actor, d);
            set_add(g.at(w.sign_start).write, replica);
            set_add(g.at(w.start).read, d);
            set_remove(g.at(tid).read, d);
            set_add(g.at(tid).read, replica);
        }
    }
}

void onchain_writes_level(ProcessModel& model, Graph& g) {
    for (const std::string& tid : tracked_tasks(g)) {
        for (const std::string& d : std::vector<std::string>(g.at(tid).write)) {
            if (storage_of(model, d) != Storage::OnChain) continue;
            Wrapper w = wrapper_of(g, tid);
            std::string replica = model.ensure_replica(ObjectKind::Local, g.at(tid).actor, d);
            set_remove(g.at(tid).write, d);
            set_add(g.at(tid).write, replica);
            set_add(g.at(w.sign_end).read, replica);
            set_add(g.at(w.end).write, d);
        }
    }
}

void digest_reads_level(ProcessModel& model, Graph& g) {
    for (const std::string& tid : tracked_tasks(g)) {
        for (const std::string& d : std::vector<std::string>(g.at(tid).read)) {
            if (storage_of(model, d) != Storage::Digest) continue;
            Wrapper w = wrapper_of(g, tid);
            const std::string actor = g.at(tid).actor;
            std::string hash_replica = model.ensure_replica(ObjectKind::Hash, actor, d);
            std::string replica = model.ensure_replica(ObjectKind::Local, actor, d);
            set_add(g.at(w.sign_start).write, hash_replica);
            set_add(g.at(w.start).read, d);

            // One handler per task, directly after the start recording,
            // shared by all of the task's digest reads.
            const std::string dh_id = "dh:" + tid;
            if (!g.contains(dh_id)) {
                Node dh;
                dh.id = dh_id;
                dh.type = NodeType::DataHandler;
                dh.actor = actor;
                auto out = g.out_edges(w.start);
                g.insert_on_edge(out[0], std::move(dh));
            }
            set_add(g.at(dh_id).read, hash_replica);
            set_add(g.at(dh_id).write, replica);
            set_remove(g.at(tid).read, d);
            set_add(g.at(tid).read, replica);
        }
    }
}

void digest_writes_level(ProcessModel& model, Graph& g) {
    for (const std::string& tid : tracked_tasks(g)) {
        for (const std::string& d : std::vector<std::string>(g.at(tid).write)) {
            if (storage_of(model, d) != Storage::Digest) continue;
            Wrapper w = wrapper_of(g, tid);
            std::string replica = model.ensure_replica(ObjectKind::Local, g.at(tid).actor, d);
            set_remove(g.at(tid).write, d);
            set_add(g.at(tid).write, replica);
            set_add(g.at(w.sign_end).read, replica);
            set_add(g.at(w.end).write, d);
        }
    }
}

void offchain_read_oracles_level(ProcessModel& model, Graph& g) {
    std::vector<std::string> tasks;
    for (const Node& n : g.nodes)
        if (n.is_task() && n.exec == ExecMode::OffChain) tasks.push_back(n.id);
    for (const std::string& tid : tasks) {
        std::vector<std::string> onchain;
        for (const std::string& d : g.at(tid).read)
            if (storage_of(model, d) == Storage::OnChain) onchain.push_back(d);
        if (onchain.empty()) continue;

        Node ro;
        ro.id = "ro:gd3:" + tid;
        ro.type = NodeType::RevOracle;
        ro.actor = g.at(tid).actor;
        // On-chain data is readable at any time, so the oracle waits for
        // nothing.
        for (const std::string& d : onchain) {
            std::string replica = model.ensure_replica(ObjectKind::Local, ro.actor, d);
            set_add(ro.read, d);
            set_add(ro.write, replica);
            set_remove(g.at(tid).read, d);
            set_add(g.at(tid).read, replica);
        }
        auto in = g.in_edges(tid);
        g.insert_on_edge(in[0], std::move(ro));
    }
}

std::string base_id(const std::string& unrolled_id) {
    return unrolled_id.substr(0, unrolled_id.find('#'));
}

// Locates the level containing a node id.
Graph* level_of(Graph& g, const std::string& id) {
    if (g.contains(id)) return &g;
    for (Node& n : g.nodes)
        if (n.body)
            if (Graph* found = level_of(*n.body, id)) return found;
    return nullptr;
}

} // namespace

ProcessModel localize_onchain_reads(const ProcessModel& model) {
    return apply_recursive(model, onchain_reads_level);
}

ProcessModel localize_onchain_writes(const ProcessModel& model) {
    return apply_recursive(model, onchain_writes_level);
}

ProcessModel localize_digest_reads(const ProcessModel& model) {
    return apply_recursive(model, digest_reads_level);
}

ProcessModel localize_digest_writes(const ProcessModel& model) {
    return apply_recursive(model, digest_writes_level);
}

ProcessModel insert_offchain_read_oracles(const ProcessModel& model) {
    return apply_recursive(model, offchain_read_oracles_level);
}

ProcessModel insert_early_sends(const ProcessModel& model, int loop_bound, int cap) {
    // Two-fold loop duplication: every pair of (writer, reader) occurrences
    // across the instance types of bound 2 covers intra- and cross-iteration
    // flows.
    std::set<std::tuple<std::string, std::string, std::string>> pairs; // writer, recipient, object
    for (const InstanceType& inst : enumerate_instance_types(model, loop_bound, cap)) {
        ProcessModel flat = unroll(model, inst);
        for (const Node& r : flat.graph.nodes) {
            if (!r.is_task()) continue;
            for (const std::string& d : r.read) {
                if (storage_of(flat, d) != Storage::OffChain) continue;
                for (const std::string& w : origin_of(flat, r.id, d)) {
                    const Node& writer = flat.graph.at(w);
                    if (writer.actor == r.actor || !writer.is_task()) continue;
                    pairs.insert({base_id(w), r.actor, d});
                }
            }
        }
    }

    ProcessModel out = model;
    for (const auto& [writer, recipient, object] : pairs) {
        Graph* g = level_of(out.graph, writer);
        if (!g) continue;
        const std::string sender = g->at(writer).actor;
        const std::string stem = "es:" + writer + ":" + recipient + ":" + object;
        Node snd;
        snd.id = "snd:" + stem;
        snd.type = NodeType::Send;
        snd.actor = sender;
        snd.res = recipient;
        snd.read = {object};
        Node rcv;
        rcv.id = "rcv:" + stem;
        rcv.type = NodeType::Receive;
        rcv.actor = recipient;
        rcv.res = sender;
        rcv.write = {object};

        // The pair goes directly after the writer; later pairs of the same
        // writer stack behind it in ascending order.
        std::string tail = writer;
        for (;;) {
            auto outs = g->out_edges(tail);
            const Node& next = g->at(outs[0].to);
            bool stacked = (next.type == NodeType::Send || next.type == NodeType::Receive) &&
                           next.id.size() > 4 && next.id.compare(4, 3, "es:") == 0;
            if (!stacked) break;
            tail = next.id;
        }
        auto outs = g->out_edges(tail);
        g->insert_on_edge(outs[0], std::move(snd));
        g->insert_on_edge(g->out_edges("snd:" + stem)[0], std::move(rcv));
    }
    return out;
}

ProcessModel apply_data_access(const ProcessModel& model, int loop_bound, int cap) {
    ProcessModel out = model;
    out = localize_onchain_reads(out);
    out = localize_onchain_writes(out);
    out = localize_digest_reads(out);
    out = localize_digest_writes(out);
    out = insert_offchain_read_oracles(out);
    out = insert_early_sends(out, loop_bound, cap);
    return out;
}

} // namespace chaindecomp
