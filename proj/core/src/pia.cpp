#include "chaindecomp/pia.hpp"

#include <algorithm>
#include <functional>

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/errors.hpp"

namespace chaindecomp {

namespace {

Node make_comm(std::string id, std::string actor, std::string recipient,
               std::vector<std::string> read = {}) {
    Node c;
    c.id = std::move(id);
    c.type = NodeType::CommunicationTask;
    c.actor = std::move(actor);
    c.res = std::move(recipient);
    c.read = std::move(read);
    return c;
}

// Inserts comms directly before `target` in the given order; the last comm
// ends up adjacent to the target.
void insert_chain_before(Graph& g, const std::string& target, std::vector<Node> comms) {
    for (Node& c : comms) {
        auto in = g.in_edges(target);
        if (in.size() != 1)
            throw PreconditionError("cannot insert before '" + target + "' with in-degree " +
                                    std::to_string(in.size()));
        g.insert_on_edge(in[0], std::move(c));
    }
}

// Inserts comms directly after `source` in the given order; the first comm
// ends up adjacent to the source.
void insert_chain_after(Graph& g, const std::string& source, std::vector<Node> comms) {
    std::string tail = source;
    for (Node& c : comms) {
        auto out = g.out_edges(tail);
        if (out.size() != 1)
            throw PreconditionError("cannot insert after '" + tail + "' with out-degree " +
                                    std::to_string(out.size()));
        std::string id = c.id;
        g.insert_on_edge(out[0], std::move(c));
        tail = id;
    }
}

// Recipients ordered chain-first, then ascending; used for decision
// distribution so the platform-specific rewrites are deterministic.
std::vector<std::string> chain_first_order(std::set<std::string> recipients) {
    std::vector<std::string> out;
    if (recipients.erase(kChainActor)) out.push_back(kChainActor);
    out.insert(out.end(), recipients.begin(), recipients.end());
    return out;
}

std::set<std::string> owners_of_ancestors(const Graph& g, const std::string& id) {
    std::set<std::string> owners;
    for (const std::string& a : ancestors_of(g, id)) {
        const Node& n = g.at(a);
        owners.insert(n.actor);
        if (n.body) {
            auto inner = actors_of(*n.body);
            owners.insert(inner.begin(), inner.end());
        }
    }
    return owners;
}

void augment_loops_level(Graph& g) {
    std::vector<std::string> loops;
    for (const Node& n : g.nodes)
        if (n.type == NodeType::SubProcess && !n.loop_condition.empty()) loops.push_back(n.id);

    for (const std::string& lid : loops) {
        const std::string loop_actor = g.at(lid).actor;
        const std::string loop_cond = g.at(lid).loop_condition;
        auto dependents = dependent_actors_loop(g, lid);

        // Kickoff: participants inside the loop that own nothing before it
        // need a communication from the loop actor to start the block.
        auto before = owners_of_ancestors(g, lid);
        std::vector<Node> kickoff;
        auto in0 = g.in_edges(lid);
        for (const std::string& p : dependents) {
            if (p == loop_actor || before.count(p)) continue;
            kickoff.push_back(make_comm("L1:" + in0[0].from + "->" + lid + ":" + p, loop_actor, p));
        }
        insert_chain_before(g, lid, std::move(kickoff));

        // Decision distribution: after the body's rule task, first to the
        // loop actor, then to the remaining dependents.
        Graph& body = *g.at(lid).body;
        std::string rule_task, body_end;
        for (const Edge& e : body.edges) {
            const Node* b = body.find(e.from);
            const Node* t = body.find(e.to);
            if (b && t && b->type == NodeType::BusinessRuleTask && t->type == NodeType::End &&
                b->writes(loop_cond)) {
                rule_task = b->id;
                body_end = t->id;
            }
        }
        if (rule_task.empty())
            throw PreconditionError("loop '" + lid +
                                    "' body lacks the rule-task-to-end edge writing '" +
                                    loop_cond + "'");
        const std::string sender = body.at(rule_task).actor;
        std::vector<std::string> recipients;
        if (loop_actor != sender) recipients.push_back(loop_actor);
        for (const std::string& p : dependents)
            if (p != sender && p != loop_actor) recipients.push_back(p);
        std::vector<Node> dist;
        for (const std::string& p : recipients)
            dist.push_back(make_comm("L1:" + rule_task + "->" + body_end + ":" + p, sender, p,
                                     {loop_cond}));
        insert_chain_after(body, rule_task, std::move(dist));
    }
}

void augment_xor_level(Graph& g) {
    std::vector<std::string> splits;
    for (const Node& n : g.nodes)
        if (n.type == NodeType::XorSplit) splits.push_back(n.id);

    for (const std::string& xs : splits) {
        const std::string split_actor = g.at(xs).actor;
        const std::string condition = g.at(xs).condition;
        auto preds = g.predecessors(xs);
        if (preds.size() != 1 || preds[0]->type != NodeType::BusinessRuleTask ||
            !preds[0]->writes(condition))
            throw PreconditionError("xor split '" + xs +
                                    "' is not preceded by the rule task writing its condition");
        const std::string rule_task = preds[0]->id;
        const std::string sender = preds[0]->actor;

        Block block = block_of(g, xs);
        // The split's executor needs the variable for routing, in addition
        // to the dependents of the block.
        std::set<std::string> recipients = dependent_actors_xor(g, block);
        recipients.insert(split_actor);
        recipients.erase(sender);
        std::vector<Node> dist;
        for (const std::string& p : chain_first_order(std::move(recipients)))
            dist.push_back(
                make_comm("X1:" + rule_task + "->" + xs + ":" + p, sender, p, {condition}));
        insert_chain_before(g, xs, std::move(dist));

        // Handover into each branch and out of each branch where actors
        // change; branch labels survive on both halves of the split edge.
        for (const Edge& e : g.out_edges(xs)) {
            const std::string to_actor = g.at(e.to).actor;
            if (to_actor != split_actor)
                g.insert_on_edge(e, make_comm("X1:" + xs + "->" + e.to, split_actor, to_actor));
        }
        const std::string join_actor = g.at(block.join).actor;
        for (const Edge& e : g.in_edges(block.join)) {
            const std::string from_actor = g.at(e.from).actor;
            if (from_actor != join_actor)
                g.insert_on_edge(e, make_comm("X1:" + e.from + "->" + block.join, from_actor,
                                              join_actor));
        }
    }
}

void augment_par_level(Graph& g) {
    std::vector<std::string> splits;
    for (const Node& n : g.nodes)
        if (n.type == NodeType::ParSplit) splits.push_back(n.id);

    for (const std::string& ps : splits) {
        const std::string split_actor = g.at(ps).actor;
        Block block = block_of(g, ps);

        for (const Edge& e : g.out_edges(ps)) {
            const std::string to_actor = g.at(e.to).actor;
            if (to_actor != split_actor)
                g.insert_on_edge(e, make_comm("P1:" + ps + "->" + e.to, split_actor, to_actor));
        }
        const std::string join_actor = g.at(block.join).actor;
        for (const Edge& e : g.in_edges(block.join)) {
            const std::string from_actor = g.at(e.from).actor;
            if (from_actor != join_actor)
                g.insert_on_edge(e, make_comm("P1:" + e.from + "->" + block.join, from_actor,
                                              join_actor));
        }

        // Actors active in both branches with no node before the split
        // cannot start their local par block; the split's actor kicks them
        // off.
        auto branch_actors = [&](const std::vector<std::string>& ids) {
            std::set<std::string> out;
            for (const std::string& id : ids) {
                const Node& n = g.at(id);
                out.insert(n.actor);
                if (n.body) {
                    auto inner = actors_of(*n.body);
                    out.insert(inner.begin(), inner.end());
                }
            }
            return out;
        };
        std::set<std::string> a0 = branch_actors(block.branches[0]);
        std::set<std::string> a1 = branch_actors(block.branches[1]);
        auto before = owners_of_ancestors(g, ps);
        auto in0 = g.in_edges(ps);
        std::vector<Node> kickoff;
        for (const std::string& a : a0) {
            if (!a1.count(a) || a == split_actor || before.count(a)) continue;
            kickoff.push_back(make_comm("P1:" + in0[0].from + "->" + ps + ":" + a, split_actor, a));
        }
        insert_chain_before(g, ps, std::move(kickoff));
    }
}

bool handover_source(const Node& n) {
    switch (n.type) {
    case NodeType::Activity:
    case NodeType::BusinessRuleTask:
    case NodeType::SubProcess:
    case NodeType::XorJoin:
    case NodeType::ParJoin:
        return true;
    default:
        return false;
    }
}

bool handover_target(const Node& n) {
    switch (n.type) {
    case NodeType::Activity:
    case NodeType::BusinessRuleTask:
    case NodeType::SubProcess:
    case NodeType::XorSplit:
    case NodeType::ParSplit:
    case NodeType::CommunicationTask:
        return true;
    default:
        return false;
    }
}

void handover_level(Graph& g) {
    // One pass over a snapshot; inserted communications are not re-examined.
    std::vector<Edge> snapshot = g.edges;
    for (const Edge& e : snapshot) {
        const Node& m = g.at(e.from);
        const Node& n = g.at(e.to);
        if (m.actor == n.actor || !handover_source(m) || !handover_target(n)) continue;
        g.insert_on_edge(e, make_comm("S1:" + e.from + "->" + e.to, m.actor, n.actor));
    }
}

ProcessModel apply_recursive(const ProcessModel& model, const std::function<void(Graph&)>& rule) {
    ProcessModel out = model;
    std::function<void(Graph&)> walk = [&](Graph& g) {
        for (Node& n : g.nodes)
            if (n.body) walk(*n.body);
        rule(g);
    };
    walk(out.graph);
    return out;
}

} // namespace

ProcessModel augment_loops(const ProcessModel& model) {
    return apply_recursive(model, augment_loops_level);
}

ProcessModel augment_xor_blocks(const ProcessModel& model) {
    return apply_recursive(model, augment_xor_level);
}

ProcessModel augment_par_blocks(const ProcessModel& model) {
    return apply_recursive(model, augment_par_level);
}

ProcessModel insert_handover_communications(const ProcessModel& model) {
    return apply_recursive(model, handover_level);
}

ProcessModel derive_pia(const ProcessModel& model) {
    return insert_handover_communications(
        augment_par_blocks(augment_xor_blocks(augment_loops(model))));
}

} // namespace chaindecomp
