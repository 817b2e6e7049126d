#include "chaindecomp/projection.hpp"

#include <algorithm>
#include <functional>

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/errors.hpp"

namespace chaindecomp {

namespace {

std::set<std::string> gateway_targets(const ProcessModel&, const Graph& level, const Node& n) {
    std::set<std::string> targets;
    std::string split_id;
    if (n.type == NodeType::XorSplit || n.type == NodeType::ParSplit) {
        split_id = n.id;
    } else {
        for (const Node& m : level.nodes) {
            if ((n.type == NodeType::XorJoin && m.type == NodeType::XorSplit) ||
                (n.type == NodeType::ParJoin && m.type == NodeType::ParSplit)) {
                if (find_matching_join(level, m.id) == n.id) split_id = m.id;
            }
        }
        if (split_id.empty())
            throw StructureError("join '" + n.id + "' has no matching split");
    }
    Block block = block_of(level, split_id);
    const Node& split = level.at(split_id);
    if (split.type == NodeType::XorSplit) {
        targets = dependent_actors_xor(level, block);
    } else {
        // Par gateways go to every actor active in either branch.
        for (int b : {0, 1})
            for (const std::string& id : block.branches[b]) {
                const Node& inner = level.at(id);
                targets.insert(inner.actor);
                if (inner.body) {
                    auto more = actors_of(*inner.body);
                    targets.insert(more.begin(), more.end());
                }
            }
    }
    if (split.actor == kChainActor) targets.insert(kChainActor);
    targets.erase("");
    return targets;
}

} // namespace

std::set<std::string> projection_targets(const ProcessModel& model, const Graph& level,
                                         const std::string& node) {
    const Node& n = level.at(node);
    switch (n.type) {
    case NodeType::Activity:
    case NodeType::BusinessRuleTask:
        if (n.exec == ExecMode::OnChain) return {kChainActor};
        return {n.actor};
    case NodeType::Send:
    case NodeType::Receive:
    case NodeType::Sign:
    case NodeType::RevOracle:
    case NodeType::DataHandler:
    case NodeType::CommunicationTask:
    case NodeType::Start:
    case NodeType::End:
        return {n.actor};
    case NodeType::StartTask:
    case NodeType::EndTask:
        return {kChainActor};
    case NodeType::Oracle:
        // Submit half runs at the participant, apply half on the chain.
        return {n.actor, kChainActor};
    case NodeType::XorSplit:
    case NodeType::XorJoin:
    case NodeType::ParSplit:
    case NodeType::ParJoin:
        return gateway_targets(model, level, n);
    case NodeType::SubProcess: {
        std::set<std::string> targets{n.actor};
        if (n.body)
            for (const Node& b : n.body->nodes) {
                auto inner = projection_targets(model, *n.body, b.id);
                targets.insert(inner.begin(), inner.end());
            }
        return targets;
    }
    }
    return {n.actor};
}

namespace {

struct Projector {
    const ProcessModel& model;
    std::string target;

    Graph project_level(const Graph& g, const std::string& scope) {
        std::set<std::string> kept;
        for (const Node& n : g.nodes)
            if (projection_targets(model, g, n.id).count(target)) kept.insert(n.id);

        Graph out;
        for (const Node& n : g.nodes) {
            if (!kept.count(n.id)) continue;
            Node copy = n;
            if (copy.body)
                copy.body = std::make_unique<Graph>(project_level(*n.body, n.id));
            out.add_node(std::move(copy));
        }

        // Edges between kept nodes survive; a kept node reconnects to the
        // nearest kept transitive successors otherwise. The branch label of
        // the first hop is what the local model still needs for routing.
        std::set<Edge> new_edges;
        for (const Node& n : g.nodes) {
            if (!kept.count(n.id)) continue;
            for (const Edge& e : g.out_edges(n.id)) {
                std::set<std::string> seen;
                std::function<void(const std::string&)> reach = [&](const std::string& id) {
                    if (!seen.insert(id).second) return;
                    if (kept.count(id)) {
                        new_edges.insert({n.id, id, e.label});
                        return;
                    }
                    for (const Edge& next : g.out_edges(id)) reach(next.to);
                };
                reach(e.to);
            }
        }
        for (const Edge& e : new_edges) out.add_edge(e);

        synthesize_boundary(out, scope);
        return out;
    }

    void synthesize_boundary(Graph& out, const std::string& scope) {
        const std::string tag = scope.empty() ? target : target + "@" + scope;
        if (out.nodes.empty()) {
            Node s, e;
            s.id = "start:" + tag;
            s.type = NodeType::Start;
            s.actor = target;
            e.id = "end:" + tag;
            e.type = NodeType::End;
            e.actor = target;
            out.add_node(std::move(s));
            out.add_node(std::move(e));
            out.add_edge({"start:" + tag, "end:" + tag, ""});
            return;
        }
        std::vector<std::string> entries, exits;
        for (const Node& n : out.nodes) {
            if (out.in_edges(n.id).empty()) entries.push_back(n.id);
            if (out.out_edges(n.id).empty()) exits.push_back(n.id);
        }
        if (entries.size() != 1 || exits.size() != 1)
            throw StructureError("projection for '" + target + "' has " +
                                 std::to_string(entries.size()) + " entry and " +
                                 std::to_string(exits.size()) + " exit points");
        if (out.at(entries[0]).type != NodeType::Start) {
            Node s;
            s.id = "start:" + tag;
            s.type = NodeType::Start;
            s.actor = target;
            out.add_node(std::move(s));
            out.add_edge({"start:" + tag, entries[0], ""});
        }
        if (out.at(exits[0]).type != NodeType::End) {
            Node e;
            e.id = "end:" + tag;
            e.type = NodeType::End;
            e.actor = target;
            out.add_node(std::move(e));
            out.add_edge({exits[0], "end:" + tag, ""});
        }
    }
};

void referenced_objects(const Graph& g, std::set<std::string>& out) {
    for (const Node& n : g.nodes) {
        out.insert(n.read.begin(), n.read.end());
        out.insert(n.write.begin(), n.write.end());
        if (!n.condition.empty()) out.insert(n.condition);
        if (!n.loop_condition.empty()) out.insert(n.loop_condition);
        if (n.body) referenced_objects(*n.body, out);
    }
}

} // namespace

std::set<std::string> project_data_objects(const ProcessModel& model, const std::string& target) {
    Projector p{model, target};
    Graph projected = p.project_level(model.graph, "");
    std::set<std::string> used;
    referenced_objects(projected, used);
    std::set<std::string> out;
    for (const std::string& id : used) {
        const DataObject* o = model.find_object(id);
        if (!o) continue;
        if (o->kind == ObjectKind::Global || o->owner == target) out.insert(id);
    }
    return out;
}

ProcessModel project(const ProcessModel& model, const std::string& target) {
    Projector p{model, target};
    ProcessModel out;
    out.graph = p.project_level(model.graph, "");
    out.actors = model.actors;

    std::set<std::string> used;
    referenced_objects(out.graph, used);
    for (const DataObject& o : model.objects) {
        if (!used.count(o.id)) continue;
        if (o.kind != ObjectKind::Global && o.owner != target) continue;
        out.add_object(o);
    }
    for (const std::string& d : model.decision_vars)
        if (out.find_object(d)) out.decision_vars.push_back(d);
    return out;
}

std::map<std::string, ProcessModel> project_all(const ProcessModel& model) {
    std::map<std::string, ProcessModel> out;
    for (const std::string& actor : model.actors) out[actor] = project(model, actor);
    if (!out.count(kChainActor)) out[kChainActor] = project(model, kChainActor);
    return out;
}

} // namespace chaindecomp
