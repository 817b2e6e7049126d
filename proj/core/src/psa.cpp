#include "chaindecomp/psa.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/errors.hpp"

namespace chaindecomp {

namespace {

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

// --- decision distribution -------------------------------------------------

// A rule task followed by the contiguous communications carrying its
// decision variable.
struct DecisionChain {
    std::string rule_task;
    std::string variable;
    std::vector<std::string> comms;
};

std::vector<DecisionChain> decision_chains(const Graph& g) {
    std::vector<DecisionChain> out;
    for (const Node& n : g.nodes) {
        if (n.type != NodeType::BusinessRuleTask || n.write.size() != 1) continue;
        DecisionChain chain{n.id, n.write[0], {}};
        std::string cur = n.id;
        for (;;) {
            auto succs = g.out_edges(cur);
            if (succs.size() != 1) break;
            const Node& s = g.at(succs[0].to);
            if (s.type != NodeType::CommunicationTask || s.read != std::vector<std::string>{chain.variable})
                break;
            chain.comms.push_back(s.id);
            cur = s.id;
        }
        if (!chain.comms.empty()) out.push_back(std::move(chain));
    }
    return out;
}

Node make_rev_oracle(std::string id, std::string actor, std::vector<std::string> read,
                     std::string wait_for, WaitEvent ev = WaitEvent::Completion) {
    Node ro;
    ro.id = std::move(id);
    ro.type = NodeType::RevOracle;
    ro.actor = std::move(actor);
    ro.read = std::move(read);
    ro.wait_for = std::move(wait_for);
    ro.wait_event = ev;
    return ro;
}

Node make_oracle(std::string id, std::string actor, std::vector<std::string> read) {
    Node o;
    o.id = std::move(id);
    o.type = NodeType::Oracle;
    o.actor = std::move(actor);
    o.read = std::move(read);
    return o;
}

void decisions_recorded_on_chain_level(ProcessModel&, Graph& g) {
    for (const DecisionChain& chain : decision_chains(g)) {
        const Node& br = g.at(chain.rule_task);
        bool recorded = br.actor == kChainActor || br.exec == ExecMode::OnChain ||
                        br.exec == ExecMode::Tracked;
        if (!recorded) continue;
        for (const std::string& cid : chain.comms) {
            const std::string recipient = g.at(cid).res;
            if (recipient == kChainActor)
                g.contract_node(cid);
            else
                g.replace_node(cid, make_rev_oracle("ro:" + cid, recipient, {chain.variable},
                                                    chain.rule_task));
        }
    }
}

void decisions_via_oracle_level(ProcessModel&, Graph& g) {
    for (const DecisionChain& chain : decision_chains(g)) {
        const Node& br = g.at(chain.rule_task);
        if (br.exec != ExecMode::OffChain || br.actor == kChainActor) continue;
        bool chain_recipient = false;
        for (const std::string& cid : chain.comms)
            if (g.at(cid).res == kChainActor) chain_recipient = true;
        if (!chain_recipient) continue;

        const std::string oracle_id = "or:" + chain.rule_task + ":store";
        const std::string sender = br.actor;
        for (const std::string& cid : chain.comms) {
            const std::string recipient = g.at(cid).res;
            if (recipient == kChainActor)
                g.contract_node(cid);
            else
                g.replace_node(cid, make_rev_oracle("ro:" + cid, recipient, {chain.variable},
                                                    oracle_id));
        }
        auto out = g.out_edges(chain.rule_task);
        g.insert_on_edge(out[0], make_oracle(oracle_id, sender, {chain.variable}));
    }
}

void decisions_via_messages_level(ProcessModel& model, Graph& g) {
    for (const DecisionChain& chain : decision_chains(g)) {
        const Node& br = g.at(chain.rule_task);
        if (br.exec != ExecMode::OffChain || br.actor == kChainActor) continue;
        bool involves_chain = false;
        for (const std::string& cid : chain.comms)
            if (g.at(cid).res == kChainActor || g.at(cid).actor == kChainActor)
                involves_chain = true;
        if (involves_chain) continue;

        for (const std::string& cid : chain.comms) {
            const Node c = g.at(cid);
            std::string replica = model.ensure_replica(ObjectKind::Local, c.res, chain.variable);
            Node snd;
            snd.id = "snd:" + cid;
            snd.type = NodeType::Send;
            snd.actor = c.actor;
            snd.res = c.res;
            snd.read = {chain.variable};
            Node rcv;
            rcv.id = "rcv:" + cid;
            rcv.type = NodeType::Receive;
            rcv.actor = c.res;
            rcv.res = c.actor;
            rcv.write = {replica};
            auto in = g.in_edges(cid);
            auto out = g.out_edges(cid);
            g.remove_edge(in[0]);
            g.remove_edge(out[0]);
            g.remove_node(cid);
            g.add_node(std::move(snd));
            g.add_node(std::move(rcv));
            g.add_edge({in[0].from, "snd:" + cid, in[0].label});
            g.add_edge({"snd:" + cid, "rcv:" + cid, in[0].label});
            g.add_edge({"rcv:" + cid, out[0].to, out[0].label});
        }
    }
}

// --- control-flow handover -------------------------------------------------

enum class HandoverRule {
    Unresolved,
    Drop,             // source state already on-chain, target chain-owned
    ToOracle,         // off-chain source notifies the chain
    ToRevOracle,      // chain notifies a participant of the last on-chain step
    ToRevOracleEntry, // chain notifies a participant of a loop activation
    ToMessages,       // off-chain to off-chain
    ToRevOracleAfterTracked, // participant to participant via the chain
};

struct HandoverResolution {
    HandoverRule rule = HandoverRule::Unresolved;
    std::string anchor;       // on-chain node the state update stems from
    bool pred_visible = false;
};

// Classifies every empty-payload communication of one level against its
// effective predecessor: chains of communications inherit the on-chain
// anchor of the first resolved member, and a communication that becomes an
// oracle anchors everything after it.
std::map<std::string, HandoverResolution> classify_handovers(const Graph& g) {
    std::map<std::string, HandoverResolution> plan;
    for (const std::string& id : g.topological_order()) {
        const Node& c = g.at(id);
        if (c.type != NodeType::CommunicationTask || !c.read.empty()) continue;

        HandoverResolution r;
        auto in = g.in_edges(id);
        auto out = g.out_edges(id);
        if (in.size() != 1 || out.size() != 1) continue; // leave unresolved

        const Node& pred = g.at(in[0].from);
        if (pred.type == NodeType::CommunicationTask) {
            auto it = plan.find(pred.id);
            if (it != plan.end()) {
                r.pred_visible = it->second.pred_visible;
                r.anchor = it->second.anchor;
                if (it->second.rule == HandoverRule::ToOracle) {
                    r.pred_visible = true;
                    r.anchor = "or:" + pred.id;
                }
            }
        } else {
            r.pred_visible = on_chain_visible(pred);
            if (r.pred_visible) r.anchor = pred.id;
        }

        // A chain-actor handover that kicks off a chain-owned loop waits for
        // the loop's activation, not for a completed step.
        std::string fwd = out[0].to;
        while (g.at(fwd).type == NodeType::CommunicationTask) {
            auto next = g.out_edges(fwd);
            if (next.size() != 1) break;
            fwd = next[0].to;
        }
        const Node& target = g.at(fwd);
        bool starts_chain_loop = target.type == NodeType::SubProcess &&
                                 !target.loop_condition.empty() && target.actor == kChainActor;

        if (c.actor == kChainActor && c.res != kChainActor && starts_chain_loop) {
            r.rule = HandoverRule::ToRevOracleEntry;
            r.anchor = target.id;
        } else if (c.res == kChainActor) {
            r.rule = r.pred_visible ? HandoverRule::Drop : HandoverRule::ToOracle;
        } else if (c.actor == kChainActor) {
            r.rule = r.pred_visible ? HandoverRule::ToRevOracle : HandoverRule::Unresolved;
        } else {
            r.rule = r.pred_visible ? HandoverRule::ToRevOracleAfterTracked
                                    : HandoverRule::ToMessages;
        }
        plan[id] = r;
    }
    return plan;
}

void apply_handover(Graph& g, const std::string& cid, const HandoverResolution& r) {
    const Node c = g.at(cid);
    switch (r.rule) {
    case HandoverRule::Drop:
        g.contract_node(cid);
        break;
    case HandoverRule::ToOracle:
        g.replace_node(cid, make_oracle("or:" + cid, c.actor, {}));
        break;
    case HandoverRule::ToRevOracle:
    case HandoverRule::ToRevOracleAfterTracked:
        g.replace_node(cid, make_rev_oracle("ro:" + cid, c.res, {}, r.anchor));
        break;
    case HandoverRule::ToRevOracleEntry:
        g.replace_node(cid,
                       make_rev_oracle("ro:" + cid, c.res, {}, r.anchor, WaitEvent::Entry));
        break;
    case HandoverRule::ToMessages: {
        Node snd;
        snd.id = "snd:" + cid;
        snd.type = NodeType::Send;
        snd.actor = c.actor;
        snd.res = c.res;
        Node rcv;
        rcv.id = "rcv:" + cid;
        rcv.type = NodeType::Receive;
        rcv.actor = c.res;
        rcv.res = c.actor;
        auto in = g.in_edges(cid);
        auto out = g.out_edges(cid);
        g.remove_edge(in[0]);
        g.remove_edge(out[0]);
        g.remove_node(cid);
        g.add_node(std::move(snd));
        g.add_node(std::move(rcv));
        g.add_edge({in[0].from, "snd:" + cid, in[0].label});
        g.add_edge({"snd:" + cid, "rcv:" + cid, in[0].label});
        g.add_edge({"rcv:" + cid, out[0].to, out[0].label});
        break;
    }
    case HandoverRule::Unresolved:
        break;
    }
}

void handovers_level(Graph& g, std::initializer_list<HandoverRule> rules) {
    auto plan = classify_handovers(g);
    for (const auto& [cid, r] : plan)
        if (std::find(rules.begin(), rules.end(), r.rule) != rules.end())
            apply_handover(g, cid, r);
}

// --- task rules --------------------------------------------------------------

void wrap_tracked_level(ProcessModel&, Graph& g) {
    std::vector<std::string> tracked;
    for (const Node& n : g.nodes)
        if (n.is_task() && n.exec == ExecMode::Tracked) tracked.push_back(n.id);
    for (const std::string& tid : tracked) {
        const std::string actor = g.at(tid).actor;
        Node st;
        st.id = "st:" + tid;
        st.type = NodeType::StartTask;
        st.actor = actor;
        st.ref = tid;
        Node et;
        et.id = "et:" + tid;
        et.type = NodeType::EndTask;
        et.actor = actor;
        et.ref = tid;
        auto in = g.in_edges(tid);
        auto out = g.out_edges(tid);
        g.insert_on_edge(in[0], std::move(st));
        g.insert_on_edge(out[0], std::move(et));
    }
}

void sign_tasks_level(ProcessModel&, Graph& g) {
    std::vector<std::string> targets;
    for (const Node& n : g.nodes) {
        if (n.actor == kChainActor) continue;
        bool on_chain_task = n.is_task() && n.exec == ExecMode::OnChain;
        bool recording = n.type == NodeType::StartTask || n.type == NodeType::EndTask;
        if (on_chain_task || recording) targets.push_back(n.id);
    }
    for (const std::string& tid : targets) {
        Node sign;
        sign.id = "sg:" + tid;
        sign.type = NodeType::Sign;
        sign.actor = g.at(tid).actor;
        sign.ref = tid;
        auto in = g.in_edges(tid);
        g.insert_on_edge(in[0], std::move(sign));
    }
}

} // namespace

ProcessModel lower_decisions_recorded_on_chain(const ProcessModel& model) {
    return apply_recursive(model, decisions_recorded_on_chain_level);
}

ProcessModel lower_decisions_via_oracle(const ProcessModel& model) {
    return apply_recursive(model, decisions_via_oracle_level);
}

ProcessModel lower_decisions_via_messages(const ProcessModel& model) {
    return apply_recursive(model, decisions_via_messages_level);
}

ProcessModel remove_redundant_chain_handovers(const ProcessModel& model) {
    return apply_recursive(model, [](ProcessModel&, Graph& g) {
        handovers_level(g, {HandoverRule::Drop});
    });
}

ProcessModel lower_handover_to_oracle(const ProcessModel& model) {
    return apply_recursive(model, [](ProcessModel&, Graph& g) {
        handovers_level(g, {HandoverRule::ToOracle});
    });
}

ProcessModel lower_handover_to_reverse_oracle(const ProcessModel& model) {
    return apply_recursive(model, [](ProcessModel&, Graph& g) {
        handovers_level(g, {HandoverRule::ToRevOracle, HandoverRule::ToRevOracleEntry});
    });
}

ProcessModel lower_handover_to_messages(const ProcessModel& model) {
    return apply_recursive(model, [](ProcessModel&, Graph& g) {
        handovers_level(g, {HandoverRule::ToMessages});
    });
}

ProcessModel lower_handover_after_tracked(const ProcessModel& model) {
    return apply_recursive(model, [](ProcessModel&, Graph& g) {
        handovers_level(g, {HandoverRule::ToRevOracleAfterTracked});
    });
}

ProcessModel wrap_tracked_tasks(const ProcessModel& model) {
    return apply_recursive(model, wrap_tracked_level);
}

ProcessModel insert_sign_tasks(const ProcessModel& model) {
    return apply_recursive(model, sign_tasks_level);
}

ProcessModel derive_psa(const ProcessModel& model) {
    ProcessModel out = model;
    out = lower_decisions_recorded_on_chain(out);
    out = lower_decisions_via_oracle(out);
    out = lower_decisions_via_messages(out);
    out = apply_recursive(out, [](ProcessModel&, Graph& g) {
        handovers_level(g, {HandoverRule::Drop, HandoverRule::ToOracle, HandoverRule::ToRevOracle,
                            HandoverRule::ToRevOracleEntry, HandoverRule::ToMessages,
                            HandoverRule::ToRevOracleAfterTracked});
    });
    out = wrap_tracked_tasks(out);
    out = insert_sign_tasks(out);

    std::vector<std::string> leftover;
    std::function<void(const Graph&)> scan = [&](const Graph& g) {
        for (const Node& n : g.nodes) {
            if (n.type == NodeType::CommunicationTask) leftover.push_back(n.id);
            if (n.body) scan(*n.body);
        }
    };
    scan(out.graph);
    if (!leftover.empty()) {
        std::string ids;
        for (const std::string& id : leftover) ids += (ids.empty() ? "" : ", ") + id;
        throw UnresolvedCommunicationError("communication tasks survived the lowering: " + ids);
    }
    return out;
}

} // namespace chaindecomp
