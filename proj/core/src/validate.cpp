#include "chaindecomp/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "chaindecomp/errors.hpp"

namespace chaindecomp {

const char* to_string(DiagnosticCode c) {
    switch (c) {
    case DiagnosticCode::Struct: return "STRUCT";
    case DiagnosticCode::XorRulePred: return "XOR_RULE_PRED";
    case DiagnosticCode::LoopBodyRule: return "LOOP_BODY_RULE";
    case DiagnosticCode::DataflowNonUnique: return "DATAFLOW_NONUNIQUE";
    case DiagnosticCode::DataflowUninit: return "DATAFLOW_UNINIT";
    case DiagnosticCode::OnChainDataAccess: return "ONCHAIN_DA";
    case DiagnosticCode::OffChainDataAccess: return "OFFCHAIN_DA";
    case DiagnosticCode::BcControlFlowXor: return "BC_CF_XOR";
    case DiagnosticCode::BcControlFlowPar: return "BC_CF_PAR";
    case DiagnosticCode::BcControlFlowLoop: return "BC_CF_LOOP";
    }
    return "?";
}

namespace {

void sort_diagnostics(std::vector<Diagnostic>& d) {
    std::sort(d.begin(), d.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.subject != b.subject) return a.subject < b.subject;
        if (a.code != b.code) return a.code < b.code;
        return a.message < b.message;
    });
    d.erase(std::unique(d.begin(), d.end()), d.end());
}

struct StructureChecker {
    const ProcessModel& model;
    std::vector<Diagnostic>& out;

    void add(DiagnosticCode code, const std::string& subject, const std::string& message) {
        out.push_back({code, subject, message});
    }

    void check_cardinality(const Graph& g, const Node& n) {
        size_t in = g.in_edges(n.id).size();
        size_t out_deg = g.out_edges(n.id).size();
        size_t want_in = 1, want_out = 1;
        switch (n.type) {
        case NodeType::Start: want_in = 0; break;
        case NodeType::End: want_out = 0; break;
        case NodeType::XorSplit:
        case NodeType::ParSplit: want_out = 2; break;
        case NodeType::XorJoin:
        case NodeType::ParJoin: want_in = 2; break;
        default: break; // activity-like: one in, one out
        }
        if (in != want_in)
            add(DiagnosticCode::Struct, n.id,
                std::string(to_string(n.type)) + " node must have " + std::to_string(want_in) +
                    " incoming edge(s), found " + std::to_string(in) + " (node type constraints)");
        if (out_deg != want_out)
            add(DiagnosticCode::Struct, n.id,
                std::string(to_string(n.type)) + " node must have " + std::to_string(want_out) +
                    " outgoing edge(s), found " + std::to_string(out_deg) +
                    " (node type constraints)");
    }

    void check_graph(const Graph& g) {
        // Edge endpoints and acyclicity first; the remaining checks assume
        // a resolvable DAG.
        bool edges_ok = true;
        for (const Edge& e : g.edges) {
            if (!g.contains(e.from)) {
                add(DiagnosticCode::Struct, e.from, "edge source does not exist");
                edges_ok = false;
            }
            if (!g.contains(e.to)) {
                add(DiagnosticCode::Struct, e.to, "edge target does not exist");
                edges_ok = false;
            }
        }
        if (!edges_ok) return;
        try {
            g.topological_order();
        } catch (const StructureError&) {
            add(DiagnosticCode::Struct, "", "graph is not acyclic");
            return;
        }

        int starts = 0, ends = 0;
        for (const Node& n : g.nodes) {
            check_cardinality(g, n);
            if (n.type == NodeType::Start) ++starts;
            if (n.type == NodeType::End) ++ends;
            if (!model.has_actor(n.actor))
                add(DiagnosticCode::Struct, n.id, "actor '" + n.actor + "' is not declared");
            for (const std::string& d : n.read)
                if (!model.find_object(d))
                    add(DiagnosticCode::Struct, n.id, "read set references unknown object '" + d + "'");
            for (const std::string& d : n.write)
                if (!model.find_object(d))
                    add(DiagnosticCode::Struct, n.id, "write set references unknown object '" + d + "'");

            switch (n.type) {
            case NodeType::BusinessRuleTask:
                if (n.write.size() != 1 || !model.is_decision_var(n.write.empty() ? "" : n.write[0]))
                    add(DiagnosticCode::Struct, n.id,
                        "business rule task must write exactly one decision variable");
                break;
            case NodeType::XorSplit: {
                if (!model.is_decision_var(n.condition))
                    add(DiagnosticCode::Struct, n.id,
                        "xor split condition '" + n.condition + "' is not a decision variable");
                // Outgoing labels must be exactly c and !c.
                std::vector<std::string> labels;
                for (const Edge& e : g.out_edges(n.id)) labels.push_back(e.label);
                std::sort(labels.begin(), labels.end());
                std::vector<std::string> want = {"!" + n.condition, n.condition};
                std::sort(want.begin(), want.end());
                if (labels != want)
                    add(DiagnosticCode::Struct, n.id,
                        "xor split branches must be labeled '" + n.condition + "' and '!" +
                            n.condition + "'");
                auto preds = g.predecessors(n.id);
                if (preds.size() == 1) {
                    const Node& b = *preds[0];
                    if (b.type != NodeType::BusinessRuleTask || !b.writes(n.condition))
                        add(DiagnosticCode::XorRulePred, n.id,
                            "xor split must be directly preceded by the business rule task "
                            "writing '" + n.condition + "'");
                }
                break;
            }
            case NodeType::SubProcess: {
                if (!n.body) {
                    add(DiagnosticCode::Struct, n.id, "sub-process has no body");
                    break;
                }
                check_graph(*n.body);
                if (!n.loop_condition.empty()) {
                    if (!model.is_decision_var(n.loop_condition))
                        add(DiagnosticCode::Struct, n.id,
                            "loop condition '" + n.loop_condition + "' is not a decision variable");
                    bool found = false;
                    for (const Edge& e : n.body->edges) {
                        const Node* b = n.body->find(e.from);
                        const Node* t = n.body->find(e.to);
                        if (b && t && b->type == NodeType::BusinessRuleTask &&
                            t->type == NodeType::End && b->writes(n.loop_condition))
                            found = true;
                    }
                    if (!found)
                        add(DiagnosticCode::LoopBodyRule, n.id,
                            "loop body must end with a business rule task writing '" +
                                n.loop_condition + "' directly before the end event");
                }
                break;
            }
            default:
                break;
            }
        }
        if (starts != 1)
            add(DiagnosticCode::Struct, "", "each level must have exactly one start event");
        if (ends != 1)
            add(DiagnosticCode::Struct, "", "each level must have exactly one end event");

        // Full-blockedness: every split closes at a unique join of the
        // corresponding type and blocks nest properly.
        check_blocks(g);
    }

    void check_blocks(const Graph& g) {
        std::vector<std::pair<size_t, size_t>> intervals;
        std::vector<std::string> topo;
        try {
            topo = g.topological_order();
        } catch (const StructureError&) {
            return;
        }
        auto pos = [&](const std::string& id) {
            return std::find(topo.begin(), topo.end(), id) - topo.begin();
        };
        for (const Node& n : g.nodes) {
            if (n.type != NodeType::XorSplit && n.type != NodeType::ParSplit) continue;
            try {
                std::string join = find_matching_join(g, n.id);
                intervals.emplace_back(pos(n.id), pos(join));
            } catch (const StructureError& e) {
                add(DiagnosticCode::Struct, n.id, std::string("model is not full-blocked: ") + e.what());
            }
        }
        for (size_t i = 0; i < intervals.size(); ++i)
            for (size_t j = i + 1; j < intervals.size(); ++j) {
                auto [a1, b1] = intervals[i];
                auto [a2, b2] = intervals[j];
                bool disjoint = b1 < a2 || b2 < a1;
                bool nested = (a1 < a2 && b2 < b1) || (a2 < a1 && b1 < b2);
                if (!disjoint && !nested)
                    add(DiagnosticCode::Struct, topo[a1],
                        "blocks overlap without proper nesting");
            }
    }
};

} // namespace

std::vector<Diagnostic> validate_structure(const ProcessModel& model) {
    std::vector<Diagnostic> out;

    if (!model.has_actor(kChainActor))
        out.push_back({DiagnosticCode::Struct, kChainActor,
                       "the reserved actor 'chain' must be declared"});
    for (const std::string& d : model.decision_vars)
        if (!model.find_object(d))
            out.push_back({DiagnosticCode::Struct, d,
                           "decision variable '" + d + "' is not a declared object"});
    for (const DataObject& o : model.objects) {
        bool decision = model.is_decision_var(o.id);
        if (o.kind == ObjectKind::Global) {
            if (decision && o.storage)
                out.push_back({DiagnosticCode::Struct, o.id,
                               "decision variables carry no storage model"});
            if (!decision && !o.storage)
                out.push_back({DiagnosticCode::Struct, o.id,
                               "global data object must declare its storage model"});
        } else {
            if (o.owner.empty() || o.basis.empty())
                out.push_back({DiagnosticCode::Struct, o.id,
                               "local/hash object must carry owner and basis"});
            else if (!model.find_object(o.basis))
                out.push_back({DiagnosticCode::Struct, o.id,
                               "replica basis '" + o.basis + "' is not a declared object"});
        }
    }
    // (kind, owner, basis) must be a key among replicas.
    for (size_t i = 0; i < model.objects.size(); ++i)
        for (size_t j = i + 1; j < model.objects.size(); ++j) {
            const DataObject& a = model.objects[i];
            const DataObject& b = model.objects[j];
            if (a.kind != ObjectKind::Global && a.kind == b.kind && a.owner == b.owner &&
                a.basis == b.basis)
                out.push_back({DiagnosticCode::Struct, b.id,
                               "duplicate replica for (" + a.owner + ", " + a.basis + ")"});
        }

    // Each decision variable is written by exactly one business rule task.
    std::map<std::string, int> writers;
    std::function<void(const Graph&)> count = [&](const Graph& g) {
        for (const Node& n : g.nodes) {
            if (n.type == NodeType::BusinessRuleTask)
                for (const std::string& w : n.write)
                    if (model.is_decision_var(w)) ++writers[w];
            if (n.body) count(*n.body);
        }
    };
    count(model.graph);
    for (const std::string& d : model.decision_vars)
        if (writers[d] != 1)
            out.push_back({DiagnosticCode::Struct, d,
                           "decision variable must be assigned to exactly one business rule "
                           "task, found " + std::to_string(writers[d])});

    StructureChecker checker{model, out};
    checker.check_graph(model.graph);
    sort_diagnostics(out);
    return out;
}

std::vector<Diagnostic> validate_data_flow(const ProcessModel& model, int loop_bound, int cap) {
    std::vector<Diagnostic> out;
    auto instances = enumerate_instance_types(model, loop_bound, cap);
    for (const InstanceType& inst : instances) {
        ProcessModel flat = unroll(model, inst);
        for (const Node& n : flat.graph.nodes) {
            for (const std::string& d : n.read) {
                auto origins = origin_of(flat, n.id, d);
                if (origins.empty())
                    out.push_back({DiagnosticCode::DataflowUninit, n.id,
                                   "read of '" + d + "' has no writer on any path "
                                   "(uninitialized; origin must be unique)"});
                else if (origins.size() > 1) {
                    std::string who;
                    for (const std::string& w : origins) who += (who.empty() ? "" : ", ") + w;
                    out.push_back({DiagnosticCode::DataflowNonUnique, n.id,
                                   "read of '" + d + "' has ambiguous origin {" + who +
                                       "} (origin must be unique)"});
                }
            }
        }
    }
    sort_diagnostics(out);
    return out;
}

namespace {

void check_data_access(const ProcessModel& model, const Graph& g, std::vector<Diagnostic>& out) {
    for (const Node& n : g.nodes) {
        if (n.body) check_data_access(model, *n.body, out);
        if (!n.is_task()) continue;
        auto storage_of = [&](const std::string& id) -> std::optional<Storage> {
            const DataObject* o = model.find_object(id);
            if (!o || model.is_decision_var(id)) return std::nullopt; // decisions exempt
            return o->storage;
        };
        if (n.exec == ExecMode::OnChain) {
            for (const std::string& d : n.read)
                if (auto s = storage_of(d); s && *s != Storage::OnChain)
                    out.push_back({DiagnosticCode::OnChainDataAccess, n.id,
                                   "on-chain task reads '" + d +
                                       "' which is not stored on-chain (on-chain data access)"});
            for (const std::string& d : n.write)
                if (auto s = storage_of(d); s && *s != Storage::OnChain)
                    out.push_back({DiagnosticCode::OnChainDataAccess, n.id,
                                   "on-chain task writes '" + d +
                                       "' which is not stored on-chain (on-chain data access)"});
        } else if (n.exec == ExecMode::OffChain) {
            for (const std::string& d : n.write)
                if (auto s = storage_of(d); s && *s != Storage::OffChain)
                    out.push_back({DiagnosticCode::OffChainDataAccess, n.id,
                                   "off-chain task writes '" + d +
                                       "' which is not stored off-chain (off-chain data access)"});
            for (const std::string& d : n.read)
                if (auto s = storage_of(d); s && *s == Storage::Digest)
                    out.push_back({DiagnosticCode::OffChainDataAccess, n.id,
                                   "off-chain task reads digest object '" + d +
                                       "' (off-chain tasks must not access tracked data)"});
        }
        // Tracked tasks may read and write all storage types.
    }
}

bool on_chain_relevant(const Node& n) {
    if (n.actor == kChainActor) return true;
    return n.is_task() && (n.exec == ExecMode::OnChain || n.exec == ExecMode::Tracked);
}

bool any_relevant(const Graph& g, const std::vector<std::string>& ids) {
    for (const std::string& id : ids) {
        const Node& n = g.at(id);
        if (on_chain_relevant(n)) return true;
        if (n.body) {
            std::function<bool(const Graph&)> rec = [&](const Graph& b) {
                for (const Node& m : b.nodes) {
                    if (on_chain_relevant(m)) return true;
                    if (m.body && rec(*m.body)) return true;
                }
                return false;
            };
            if (rec(*n.body)) return true;
        }
    }
    return false;
}

void check_control_flow(const Graph& g, std::vector<Diagnostic>& out) {
    for (const Node& n : g.nodes) {
        if (n.body) check_control_flow(*n.body, out);
        if (n.type == NodeType::SubProcess) {
            std::function<bool(const Graph&)> rec = [&](const Graph& b) {
                for (const Node& m : b.nodes) {
                    if (on_chain_relevant(m)) return true;
                    if (m.body && rec(*m.body)) return true;
                }
                return false;
            };
            if (n.body && rec(*n.body) && n.actor != kChainActor)
                out.push_back({DiagnosticCode::BcControlFlowLoop, n.id,
                               "sub-process contains on-chain relevant nodes; its actor must "
                               "be 'chain' (blockchain-based control flow)"});
        }
        if (n.type != NodeType::XorSplit && n.type != NodeType::ParSplit) continue;

        Block block;
        try {
            block = block_of(g, n.id);
        } catch (const StructureError&) {
            continue; // structure checks already reported this
        }
        bool b0 = any_relevant(g, block.branches[0]);
        bool b1 = any_relevant(g, block.branches[1]);
        const Node& join = g.at(block.join);

        if (n.type == NodeType::XorSplit) {
            std::set<std::string> inside(block.branches[0].begin(), block.branches[0].end());
            inside.insert(block.branches[1].begin(), block.branches[1].end());
            inside.insert(block.split);
            inside.insert(block.join);
            std::vector<std::string> outside;
            for (const Node& m : g.nodes)
                if (!inside.count(m.id)) outside.push_back(m.id);
            bool other = any_relevant(g, outside);
            bool must_be_chain = (b0 && (b1 || other)) || (b1 && (b0 || other));
            if (must_be_chain && (n.actor != kChainActor || join.actor != kChainActor))
                out.push_back({DiagnosticCode::BcControlFlowXor, n.id,
                               "xor block is on-chain relevant; both gateways must be owned "
                               "by 'chain' (blockchain-based control flow)"});
        } else {
            if (b0 && b1 && (n.actor != kChainActor || join.actor != kChainActor))
                out.push_back({DiagnosticCode::BcControlFlowPar, n.id,
                               "par block has on-chain relevant nodes in both branches; both "
                               "gateways must be owned by 'chain' (blockchain-based control flow)"});
        }
    }
}

} // namespace

std::vector<Diagnostic> validate_blockchain_data_access(const ProcessModel& model) {
    std::vector<Diagnostic> out;
    check_data_access(model, model.graph, out);
    sort_diagnostics(out);
    return out;
}

std::vector<Diagnostic> validate_blockchain_control_flow(const ProcessModel& model) {
    std::vector<Diagnostic> out;
    check_control_flow(model.graph, out);
    sort_diagnostics(out);
    return out;
}

std::vector<Diagnostic> validate(const ProcessModel& model, int loop_bound, int cap) {
    std::vector<Diagnostic> out = validate_structure(model);
    if (!out.empty()) return out; // later checks assume sound structure
    auto append = [&](std::vector<Diagnostic> d) {
        out.insert(out.end(), d.begin(), d.end());
    };
    append(validate_data_flow(model, loop_bound, cap));
    append(validate_blockchain_data_access(model));
    append(validate_blockchain_control_flow(model));
    sort_diagnostics(out);
    return out;
}

ProcessModel fix_control_flow_actors(const ProcessModel& model) {
    ProcessModel fixed = model;
    // Retargeting may make an outer block relevant, so iterate to a fixpoint.
    for (size_t round = 0; round <= fixed.graph.all_ids_recursive().size(); ++round) {
        auto findings = validate_blockchain_control_flow(fixed);
        if (findings.empty()) break;
        for (const Diagnostic& d : findings) {
            std::function<bool(Graph&)> retarget = [&](Graph& g) {
                Node* n = g.find(d.subject);
                if (n) {
                    n->actor = kChainActor;
                    if (n->type == NodeType::XorSplit || n->type == NodeType::ParSplit)
                        g.at(find_matching_join(g, n->id)).actor = kChainActor;
                    return true;
                }
                for (Node& m : g.nodes)
                    if (m.body && retarget(*m.body)) return true;
                return false;
            };
            retarget(fixed.graph);
        }
    }
    return fixed;
}

} // namespace chaindecomp
