#include "chaindecomp/conformance.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <random>

#include "chaindecomp/errors.hpp"

namespace chaindecomp {

namespace {

std::string suffix_of(const std::string& id) {
    auto pos = id.find('#');
    return pos == std::string::npos ? "" : id.substr(pos);
}

std::string pair_stem(const std::string& id) {
    if (id.rfind("snd:", 0) == 0 || id.rfind("rcv:", 0) == 0) return id.substr(4);
    return "";
}

// One replay universe: the unrolled models plus the synchronization state
// derivable from their completion sets.
class Execution {
public:
    Execution(std::vector<ProcessModel> models, int chain_model, int cap)
        : cap_(cap), chain_model_(chain_model) {
        for (ProcessModel& m : models) prepare(std::move(m));
    }

    TraceSet traces() {
        memo_.clear();
        State s = initial_state();
        return explore(s);
    }

    bool feasible(const Trace& t) {
        feas_memo_.clear();
        State s = initial_state();
        return search(s, t, 0);
    }

    Trace sample(std::mt19937_64& rng) {
        State s = initial_state();
        Trace t;
        for (;;) {
            auto events = enabled_events(s);
            if (events.empty()) {
                check_terminal(s);
                return t;
            }
            const Event& e = events[rng() % events.size()];
            fire(s, e, t);
        }
    }

private:
    struct NodeInfo {
        Node node;
        std::vector<int> preds;
        bool observable = false;
        bool is_send = false, is_receive = false;
        std::string channel; // pairing key for send/receive
        bool needs_sign = false;
        bool needs_submit = false; // oracle apply half
    };

    struct Model {
        std::string target;
        std::vector<NodeInfo> nodes;
        std::map<std::string, int> index;
    };

    using State = std::vector<std::vector<bool>>;

    struct Event {
        int model_a, node_a;
        int model_b = -1, node_b = -1; // receive side of a rendezvous
    };

    int cap_;
    int chain_model_;
    std::vector<Model> models_;
    std::map<State, TraceSet> memo_;
    std::map<State, bool> feas_memo_;

    void prepare(ProcessModel model) {
        Model m;
        m.target = "";
        for (const Node& n : model.graph.nodes) {
            m.index[n.id] = static_cast<int>(m.nodes.size());
            NodeInfo info;
            info.node = n;
            info.observable = n.is_task();
            info.is_send = n.type == NodeType::Send;
            info.is_receive = n.type == NodeType::Receive;
            if (info.is_send || info.is_receive) {
                std::string stem = pair_stem(n.id);
                if (!stem.empty()) {
                    info.channel = "pair:" + stem;
                } else {
                    // Fallback channel for hand-written models: sender,
                    // recipient, payload bases, iteration.
                    const auto& payload = info.is_send ? n.read : n.write;
                    std::string bases;
                    for (const std::string& d : payload) {
                        const DataObject* o = model.find_object(d);
                        bases += (o && !o->basis.empty() ? o->basis : d) + ",";
                    }
                    std::string sender = info.is_send ? n.actor : n.res;
                    std::string recipient = info.is_send ? n.res : n.actor;
                    info.channel =
                        "chan:" + sender + "|" + recipient + "|" + bases + "|" + suffix_of(n.id);
                }
            }
            m.nodes.push_back(std::move(info));
        }
        for (const Edge& e : model.graph.edges)
            m.nodes[m.index.at(e.to)].preds.push_back(m.index.at(e.from));
        models_.push_back(std::move(m));
    }

public:
    // Chain-model gating depends on knowing which prepared model is the
    // chain's; set up after construction.
    void finalize(const std::vector<std::string>& targets) {
        for (size_t i = 0; i < models_.size(); ++i) {
            models_[i].target = targets[i];
            bool is_chain = static_cast<int>(i) == chain_model_;
            for (NodeInfo& info : models_[i].nodes) {
                const Node& n = info.node;
                if (!is_chain) continue;
                bool participant_owned = n.actor != kChainActor;
                if (participant_owned &&
                    ((n.is_task() && n.exec == ExecMode::OnChain) ||
                     n.type == NodeType::StartTask || n.type == NodeType::EndTask))
                    info.needs_sign = true;
                if (n.type == NodeType::Oracle && participant_owned) info.needs_submit = true;
            }
        }
    }

private:
    State initial_state() const {
        State s;
        for (const Model& m : models_) s.push_back(std::vector<bool>(m.nodes.size(), false));
        return s;
    }

    // Sign/submit/chain-completion records are functions of the completion
    // sets, recomputed on demand.
    bool sign_recorded(const State& s, const std::string& ref) const {
        for (size_t i = 0; i < models_.size(); ++i)
            for (size_t j = 0; j < models_[i].nodes.size(); ++j) {
                const Node& n = models_[i].nodes[j].node;
                if (s[i][j] && n.type == NodeType::Sign && n.ref == ref) return true;
            }
        return false;
    }

    bool submit_recorded(const State& s, const std::string& oracle_id) const {
        for (size_t i = 0; i < models_.size(); ++i) {
            if (static_cast<int>(i) == chain_model_) continue;
            const Model& m = models_[i];
            auto it = m.index.find(oracle_id);
            if (it != m.index.end() && s[i][it->second]) return true;
        }
        return false;
    }

    bool chain_completed(const State& s, const std::string& id) const {
        if (chain_model_ < 0) return false;
        const Model& m = models_[chain_model_];
        auto it = m.index.find(id);
        if (it != m.index.end() && s[chain_model_][it->second]) return true;
        // A tracked task completes on-chain through its end recording task.
        for (size_t j = 0; j < m.nodes.size(); ++j) {
            const Node& n = m.nodes[j].node;
            if (s[chain_model_][j] && n.type == NodeType::EndTask && n.ref == id) return true;
        }
        return false;
    }

    bool guard_ok(const State& s, int mi, const NodeInfo& info) const {
        const Node& n = info.node;
        if (info.needs_sign && !sign_recorded(s, n.id)) return false;
        if (info.needs_submit && !submit_recorded(s, n.id)) return false;
        if (n.type == NodeType::RevOracle && !n.wait_for.empty()) {
            if (n.wait_event == WaitEvent::Entry)
                return chain_completed(s, n.wait_for + "@enter#1");
            return chain_completed(s, n.wait_for);
        }
        (void)mi;
        return true;
    }

    bool dag_ready(const State& s, int mi, int ni) const {
        if (s[mi][ni]) return false;
        for (int p : models_[mi].nodes[ni].preds)
            if (!s[mi][p]) return false;
        return true;
    }

    std::vector<Event> enabled_events(const State& s) const {
        std::vector<Event> events;
        std::vector<std::tuple<std::string, int, int>> sends, receives;
        for (size_t i = 0; i < models_.size(); ++i) {
            for (size_t j = 0; j < models_[i].nodes.size(); ++j) {
                const NodeInfo& info = models_[i].nodes[j];
                if (!dag_ready(s, i, j)) continue;
                if (info.is_send) {
                    sends.emplace_back(info.channel, i, j);
                } else if (info.is_receive) {
                    receives.emplace_back(info.channel, i, j);
                } else if (guard_ok(s, static_cast<int>(i), info)) {
                    events.push_back({static_cast<int>(i), static_cast<int>(j)});
                }
            }
        }
        std::sort(sends.begin(), sends.end());
        std::sort(receives.begin(), receives.end());
        for (const auto& [chan, si, sj] : sends)
            for (const auto& [rchan, ri, rj] : receives)
                if (chan == rchan)
                    events.push_back({si, sj, static_cast<int>(ri), static_cast<int>(rj)});
        return events;
    }

    void fire(State& s, const Event& e, Trace& t) const {
        s[e.model_a][e.node_a] = true;
        const NodeInfo& a = models_[e.model_a].nodes[e.node_a];
        if (a.observable) t.push_back(a.node.id);
        if (e.model_b >= 0) {
            s[e.model_b][e.node_b] = true;
            const NodeInfo& b = models_[e.model_b].nodes[e.node_b];
            if (b.observable) t.push_back(b.node.id);
        }
    }

    bool model_complete(const State& s, size_t i) const {
        for (size_t j = 0; j < models_[i].nodes.size(); ++j)
            if (!s[i][j]) return false;
        return true;
    }

    // A local process that never fired anything but silent start markers was
    // simply never spawned in this instance.
    bool model_unspawned(const State& s, size_t i) const {
        for (size_t j = 0; j < models_[i].nodes.size(); ++j)
            if (s[i][j] && models_[i].nodes[j].node.type != NodeType::Start) return false;
        return true;
    }

    void check_terminal(const State& s) const {
        std::string blocked;
        bool dead = false;
        for (size_t i = 0; i < models_.size(); ++i) {
            if (model_complete(s, i) || model_unspawned(s, i)) continue;
            dead = true;
            for (size_t j = 0; j < models_[i].nodes.size(); ++j)
                if (dag_ready(s, i, j))
                    blocked += (blocked.empty() ? "" : ", ") + models_[i].target + ":" +
                               models_[i].nodes[j].node.id;
        }
        if (dead)
            throw DeadlockError("composed replay cannot make progress; blocked at: " +
                                (blocked.empty() ? "(no ready node)" : blocked));
    }

    TraceSet explore(const State& s) {
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
        auto events = enabled_events(s);
        TraceSet result;
        if (events.empty()) {
            check_terminal(s);
            result.insert(Trace{});
        } else {
            for (const Event& e : events) {
                State next = s;
                Trace label;
                fire(next, e, label);
                for (const Trace& suffix : explore(next)) {
                    Trace t = label;
                    t.insert(t.end(), suffix.begin(), suffix.end());
                    result.insert(std::move(t));
                }
                if (result.size() > static_cast<size_t>(cap_))
                    throw CapacityError("trace enumeration exceeds cap of " + std::to_string(cap_));
            }
        }
        if (memo_.size() > 500000)
            throw CapacityError("replay state space exceeds capacity");
        return memo_.emplace(s, std::move(result)).first->second;
    }

    bool search(const State& s, const Trace& t, size_t pos) {
        auto it = feas_memo_.find(s);
        if (it != feas_memo_.end()) return it->second;
        auto events = enabled_events(s);
        bool ok = false;
        if (events.empty()) {
            ok = pos == t.size();
            bool clean = true;
            for (size_t i = 0; i < models_.size() && clean; ++i)
                if (!model_complete(s, i) && !model_unspawned(s, i)) clean = false;
            ok = ok && clean;
        } else {
            for (const Event& e : events) {
                State next = s;
                Trace label;
                fire(next, e, label);
                size_t npos = pos;
                bool match = true;
                for (const std::string& id : label) {
                    if (npos >= t.size() || t[npos] != id) {
                        match = false;
                        break;
                    }
                    ++npos;
                }
                if (match && search(next, t, npos)) {
                    ok = true;
                    break;
                }
            }
        }
        if (feas_memo_.size() > 500000)
            throw CapacityError("replay state space exceeds capacity");
        feas_memo_[s] = ok;
        return ok;
    }
};

Execution make_global_execution(const ProcessModel& model, const InstanceType& instance,
                                int cap) {
    std::vector<ProcessModel> flat;
    flat.push_back(unroll(model, instance));
    Execution ex(std::move(flat), -1, cap);
    ex.finalize({"global"});
    return ex;
}

Execution make_composed_execution(const std::map<std::string, ProcessModel>& projections,
                                  const InstanceType& instance, int cap) {
    std::vector<ProcessModel> flat;
    std::vector<std::string> targets;
    int chain_index = -1;
    for (const auto& [target, model] : projections) {
        if (target == kChainActor) chain_index = static_cast<int>(flat.size());
        flat.push_back(unroll_for_execution(model, instance));
        targets.push_back(target);
    }
    Execution ex(std::move(flat), chain_index, cap);
    ex.finalize(targets);
    return ex;
}

} // namespace

TraceSet replay_global(const ProcessModel& model, const InstanceType& instance, int cap) {
    return make_global_execution(model, instance, cap).traces();
}

TraceSet replay_composed(const std::map<std::string, ProcessModel>& projections,
                         const InstanceType& instance, int cap) {
    return make_composed_execution(projections, instance, cap).traces();
}

namespace {

std::string render(const Trace& t) {
    std::string out;
    for (const std::string& id : t) out += (out.empty() ? "" : " ") + id;
    return out;
}

} // namespace

ConformanceReport check_equivalence(const ProcessModel& global,
                                    const std::map<std::string, ProcessModel>& projections,
                                    const ConformanceOptions& options) {
    ConformanceReport report;
    report.loop_bound = options.loop_bound;
    report.seed = options.seed;
    report.ok = true;

    std::vector<InstanceType> instances;
    try {
        instances = enumerate_instance_types(global, options.loop_bound, options.instance_cap);
    } catch (const CapacityError& e) {
        report.ok = false;
        InstanceResult r;
        r.mode = "error";
        r.note = e.what();
        report.instances.push_back(std::move(r));
        return report;
    }

    for (const InstanceType& inst : instances) {
        InstanceResult r;
        r.instance = inst.key();
        try {
            TraceSet g = replay_global(global, inst, options.trace_cap);
            TraceSet c = replay_composed(projections, inst, options.trace_cap);
            r.mode = "exhaustive";
            r.global_traces = g.size();
            r.composed_traces = c.size();
            r.equal = g == c;
            if (!r.equal) {
                for (const Trace& t : g)
                    if (!c.count(t) && r.missing.size() < 5) r.missing.push_back(render(t));
                for (const Trace& t : c)
                    if (!g.count(t) && r.extra.size() < 5) r.extra.push_back(render(t));
            }
        } catch (const CapacityError&) {
            // Sampled fallback: random traces of each side must be feasible
            // on the other.
            try {
                std::mt19937_64 rng(options.seed);
                Execution ge = make_global_execution(global, inst, options.trace_cap);
                Execution ce = make_composed_execution(projections, inst, options.trace_cap);
                r.mode = "sampled";
                r.equal = true;
                for (int i = 0; i < options.sample_count && r.equal; ++i) {
                    Trace t = ge.sample(rng);
                    ++r.global_traces;
                    if (!ce.feasible(t)) {
                        r.equal = false;
                        r.missing.push_back(render(t));
                    }
                }
                for (int i = 0; i < options.sample_count && r.equal; ++i) {
                    Trace t = ce.sample(rng);
                    ++r.composed_traces;
                    if (!ge.feasible(t)) {
                        r.equal = false;
                        r.extra.push_back(render(t));
                    }
                }
                r.note = "trace cap exceeded; compared " +
                         std::to_string(options.sample_count) + " sampled traces per side";
            } catch (const Error& e) {
                r.mode = "error";
                r.equal = false;
                r.note = e.what();
            }
        } catch (const DeadlockError& e) {
            r.mode = "error";
            r.equal = false;
            r.note = e.what();
        }
        report.ok = report.ok && r.equal;
        report.instances.push_back(std::move(r));
    }
    return report;
}

std::string emit_report(const ConformanceReport& report) {
    nlohmann::json j;
    j["ok"] = report.ok;
    j["loopBound"] = report.loop_bound;
    j["seed"] = report.seed;
    j["instances"] = nlohmann::json::array();
    for (const InstanceResult& r : report.instances) {
        nlohmann::json ij;
        ij["instance"] = r.instance;
        ij["mode"] = r.mode;
        ij["globalTraces"] = r.global_traces;
        ij["composedTraces"] = r.composed_traces;
        ij["equal"] = r.equal;
        if (!r.missing.empty()) ij["missing"] = r.missing;
        if (!r.extra.empty()) ij["extra"] = r.extra;
        if (!r.note.empty()) ij["note"] = r.note;
        j["instances"].push_back(ij);
    }
    return j.dump(2) + "\n";
}

} // namespace chaindecomp
