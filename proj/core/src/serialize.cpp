#include "chaindecomp/serialize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

#include "chaindecomp/errors.hpp"

namespace chaindecomp {

using json = nlohmann::json;

namespace {

const std::map<std::string, NodeType>& node_type_names() {
    static const std::map<std::string, NodeType> names = {
        {"Activity", NodeType::Activity},
        {"BusinessRuleTask", NodeType::BusinessRuleTask},
        {"Start", NodeType::Start},
        {"End", NodeType::End},
        {"XorSplit", NodeType::XorSplit},
        {"XorJoin", NodeType::XorJoin},
        {"ParSplit", NodeType::ParSplit},
        {"ParJoin", NodeType::ParJoin},
        {"SubProcess", NodeType::SubProcess},
        {"CommunicationTask", NodeType::CommunicationTask},
        {"Sign", NodeType::Sign},
        {"StartT", NodeType::StartTask},
        {"EndT", NodeType::EndTask},
        {"Oracle", NodeType::Oracle},
        {"RevOracle", NodeType::RevOracle},
        {"Send", NodeType::Send},
        {"Receive", NodeType::Receive},
        {"DataHandler", NodeType::DataHandler},
    };
    return names;
}

NodeType parse_node_type(const std::string& s) {
    auto it = node_type_names().find(s);
    if (it == node_type_names().end()) throw ParseError("unknown node type '" + s + "'");
    return it->second;
}

ExecMode parse_exec(const std::string& s) {
    if (s == "offChain") return ExecMode::OffChain;
    if (s == "tracked") return ExecMode::Tracked;
    if (s == "onChain") return ExecMode::OnChain;
    throw ParseError("unknown exec mode '" + s + "'");
}

Storage parse_storage(const std::string& s) {
    if (s == "offchain") return Storage::OffChain;
    if (s == "onchain") return Storage::OnChain;
    if (s == "digest") return Storage::Digest;
    throw ParseError("unknown storage model '" + s + "'");
}

ObjectKind parse_kind(const std::string& s) {
    if (s == "global") return ObjectKind::Global;
    if (s == "local") return ObjectKind::Local;
    if (s == "hash") return ObjectKind::Hash;
    throw ParseError("unknown data object kind '" + s + "'");
}

std::string get_string(const json& j, const char* field, const std::string& where,
                       bool required = true) {
    if (!j.contains(field)) {
        if (required) throw ParseError(where + ": missing field '" + field + "'");
        return "";
    }
    if (!j.at(field).is_string())
        throw ParseError(where + ": field '" + field + "' must be a string");
    return j.at(field).get<std::string>();
}

std::vector<std::string> get_string_list(const json& j, const char* field,
                                         const std::string& where) {
    std::vector<std::string> out;
    if (!j.contains(field)) return out;
    if (!j.at(field).is_array())
        throw ParseError(where + ": field '" + field + "' must be an array");
    for (const json& v : j.at(field)) {
        if (!v.is_string()) throw ParseError(where + ": entries of '" + field + "' must be strings");
        out.push_back(v.get<std::string>());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Graph parse_graph(const json& j, const std::string& where);

Node parse_node(const json& j, const std::string& where) {
    Node n;
    n.id = get_string(j, "id", where);
    if (n.id.empty()) throw ParseError(where + ": node id must not be empty");
    if (n.id.find('#') != std::string::npos)
        throw ParseError(where + ": node id '" + n.id + "' must not contain '#'");
    const std::string ctx = where + ": node '" + n.id + "'";
    n.type = parse_node_type(get_string(j, "type", ctx));
    n.actor = get_string(j, "actor", ctx);
    if (j.contains("exec")) n.exec = parse_exec(get_string(j, "exec", ctx));
    n.label = get_string(j, "label", ctx, false);
    n.read = get_string_list(j, "read", ctx);
    n.write = get_string_list(j, "write", ctx);
    n.condition = get_string(j, "condition", ctx, false);
    n.loop_condition = get_string(j, "loopCondition", ctx, false);
    n.res = get_string(j, "res", ctx, false);
    n.ref = get_string(j, "ref", ctx, false);
    n.wait_for = get_string(j, "waitFor", ctx, false);
    std::string ev = get_string(j, "waitEvent", ctx, false);
    if (ev == "entry")
        n.wait_event = WaitEvent::Entry;
    else if (!ev.empty() && ev != "completion")
        throw ParseError(ctx + ": unknown wait event '" + ev + "'");
    if (j.contains("body")) {
        if (n.type != NodeType::SubProcess)
            throw ParseError(ctx + ": only sub-processes carry a body");
        n.body = std::make_unique<Graph>(parse_graph(j.at("body"), ctx + " body"));
    }
    if (n.type == NodeType::SubProcess && !n.body)
        throw ParseError(ctx + ": sub-process requires a body");
    return n;
}

Graph parse_graph(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    Graph g;
    if (!j.contains("nodes") || !j.at("nodes").is_array())
        throw ParseError(where + ": missing 'nodes' array");
    for (const json& nj : j.at("nodes")) {
        Node n = parse_node(nj, where);
        if (g.contains(n.id)) throw ParseError(where + ": duplicate node id '" + n.id + "'");
        g.add_node(std::move(n));
    }
    if (j.contains("edges")) {
        if (!j.at("edges").is_array()) throw ParseError(where + ": 'edges' must be an array");
        for (const json& ej : j.at("edges")) {
            Edge e;
            e.from = get_string(ej, "from", where + " edge");
            e.to = get_string(ej, "to", where + " edge");
            e.label = get_string(ej, "label", where + " edge", false);
            g.add_edge(std::move(e));
        }
    }
    return g;
}

void resolve_references(const ProcessModel& model, const Graph& g, const std::string& where) {
    for (const Edge& e : g.edges) {
        if (!g.contains(e.from))
            throw ReferenceError(where + ": edge references unknown node '" + e.from + "'");
        if (!g.contains(e.to))
            throw ReferenceError(where + ": edge references unknown node '" + e.to + "'");
    }
    for (const Node& n : g.nodes) {
        if (!model.has_actor(n.actor))
            throw ReferenceError(where + ": node '" + n.id + "' has undeclared actor '" + n.actor +
                                 "'");
        if (!n.res.empty() && !model.has_actor(n.res))
            throw ReferenceError(where + ": node '" + n.id + "' has undeclared recipient '" +
                                 n.res + "'");
        for (const std::string& d : n.read)
            if (!model.find_object(d))
                throw ReferenceError(where + ": node '" + n.id + "' reads unknown object '" + d +
                                     "'");
        for (const std::string& d : n.write)
            if (!model.find_object(d))
                throw ReferenceError(where + ": node '" + n.id + "' writes unknown object '" + d +
                                     "'");
        if (!n.condition.empty() && !model.find_object(n.condition))
            throw ReferenceError(where + ": node '" + n.id + "' uses unknown condition '" +
                                 n.condition + "'");
        if (!n.loop_condition.empty() && !model.find_object(n.loop_condition))
            throw ReferenceError(where + ": node '" + n.id + "' uses unknown loop condition '" +
                                 n.loop_condition + "'");
        // ref and waitFor may point into a sibling projection (a sign step
        // references the chain model's task), so they are not resolved here.
        if (n.body) resolve_references(model, *n.body, where + "/" + n.id);
    }
}

json graph_to_json(const Graph& g);

json node_to_json(const Node& n) {
    json j = json::object();
    j["id"] = n.id;
    j["type"] = to_string(n.type);
    j["actor"] = n.actor;
    if (n.is_task()) j["exec"] = to_string(n.exec);
    if (!n.label.empty()) j["label"] = n.label;
    if (!n.read.empty()) j["read"] = n.read;
    if (!n.write.empty()) j["write"] = n.write;
    if (!n.condition.empty()) j["condition"] = n.condition;
    if (!n.loop_condition.empty()) j["loopCondition"] = n.loop_condition;
    if (!n.res.empty()) j["res"] = n.res;
    if (!n.ref.empty()) j["ref"] = n.ref;
    if (!n.wait_for.empty()) j["waitFor"] = n.wait_for;
    if (n.wait_event == WaitEvent::Entry) j["waitEvent"] = "entry";
    if (n.body) j["body"] = graph_to_json(*n.body);
    return j;
}

json graph_to_json(const Graph& g) {
    json j = json::object();
    j["nodes"] = json::array();
    for (const Node& n : g.nodes) j["nodes"].push_back(node_to_json(n));
    j["edges"] = json::array();
    for (const Edge& e : g.edges) {
        json ej = json::object();
        ej["from"] = e.from;
        ej["to"] = e.to;
        if (!e.label.empty()) ej["label"] = e.label;
        j["edges"].push_back(ej);
    }
    return j;
}

} // namespace

ProcessModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("document root must be an object");

    ProcessModel model;
    for (const std::string& a : get_string_list(j, "actors", "document")) model.add_actor(a);
    if (j.contains("dataObjects")) {
        if (!j.at("dataObjects").is_array()) throw ParseError("'dataObjects' must be an array");
        for (const json& oj : j.at("dataObjects")) {
            DataObject o;
            o.id = get_string(oj, "id", "data object");
            const std::string ctx = "data object '" + o.id + "'";
            if (oj.contains("kind")) o.kind = parse_kind(get_string(oj, "kind", ctx));
            if (oj.contains("storage")) o.storage = parse_storage(get_string(oj, "storage", ctx));
            o.owner = get_string(oj, "owner", ctx, false);
            o.basis = get_string(oj, "basis", ctx, false);
            if (model.find_object(o.id)) throw ParseError("duplicate data object id '" + o.id + "'");
            model.add_object(std::move(o));
        }
    }
    model.decision_vars = get_string_list(j, "decisionVars", "document");
    for (const std::string& d : model.decision_vars)
        if (!model.find_object(d))
            throw ReferenceError("decision variable '" + d + "' is not a declared data object");
    for (const DataObject& o : model.objects) {
        if (o.kind != ObjectKind::Global) {
            if (!model.has_actor(o.owner))
                throw ReferenceError("data object '" + o.id + "' has undeclared owner '" + o.owner +
                                     "'");
            if (!model.find_object(o.basis))
                throw ReferenceError("data object '" + o.id + "' replicates unknown object '" +
                                     o.basis + "'");
        }
    }

    model.graph = parse_graph(j, "document");
    resolve_references(model, model.graph, "document");
    return model;
}

std::string emit_model(const ProcessModel& model) {
    json j = graph_to_json(model.graph);
    j["actors"] = model.actors;
    j["dataObjects"] = json::array();
    for (const DataObject& o : model.objects) {
        json oj = json::object();
        oj["id"] = o.id;
        if (o.kind != ObjectKind::Global) oj["kind"] = to_string(o.kind);
        if (o.storage) oj["storage"] = to_string(*o.storage);
        if (!o.owner.empty()) oj["owner"] = o.owner;
        if (!o.basis.empty()) oj["basis"] = o.basis;
        j["dataObjects"].push_back(oj);
    }
    j["decisionVars"] = model.decision_vars;
    return j.dump(2) + "\n";
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string dot_shape(NodeType t) {
    switch (t) {
    case NodeType::Start:
    case NodeType::End: return "circle";
    case NodeType::XorSplit:
    case NodeType::XorJoin:
    case NodeType::ParSplit:
    case NodeType::ParJoin: return "diamond";
    case NodeType::SubProcess: return "box3d";
    case NodeType::CommunicationTask: return "cds";
    default: return "box";
    }
}

void collect_dot_nodes(const Graph& g, std::map<std::string, std::vector<std::string>>& lanes,
                       std::vector<std::string>& edges) {
    for (const Node& n : g.nodes) {
        std::string label = n.id;
        if (n.type == NodeType::XorSplit) label += "\\nxor " + n.condition;
        if (n.type == NodeType::SubProcess && !n.loop_condition.empty())
            label += "\\nloop " + n.loop_condition;
        if (!n.res.empty()) label += "\\nto " + n.res;
        label += "\\n[" + n.actor + "]";
        std::string chain = "none";
        if (n.is_task() && n.exec == ExecMode::OnChain) chain = "onchain";
        else if (n.is_task() && n.exec == ExecMode::Tracked) chain = "tracked";
        else if (on_chain_visible(n)) chain = "onchain";
        std::string attrs = "label=\"" + dot_escape(label) + "\", shape=" + dot_shape(n.type) +
                            ", chain=\"" + chain + "\"";
        if (chain == "onchain") attrs += ", penwidth=2";
        if (chain == "tracked") attrs += ", style=dashed";
        lanes[n.actor].push_back("\"" + dot_escape(n.id) + "\" [" + attrs + "];");
        if (n.body) {
            collect_dot_nodes(*n.body, lanes, edges);
            // Dashed containment edges show body entry and exit.
            for (const Node& b : n.body->nodes) {
                if (n.body->in_edges(b.id).empty())
                    edges.push_back("\"" + dot_escape(n.id) + "\" -> \"" + dot_escape(b.id) +
                                    "\" [style=dashed, label=\"body\"];");
                if (n.body->out_edges(b.id).empty())
                    edges.push_back("\"" + dot_escape(b.id) + "\" -> \"" + dot_escape(n.id) +
                                    "\" [style=dashed];");
            }
        }
    }
    for (const Edge& e : g.edges) {
        std::string attr = e.label.empty() ? "" : " [label=\"" + dot_escape(e.label) + "\"]";
        edges.push_back("\"" + dot_escape(e.from) + "\" -> \"" + dot_escape(e.to) + "\"" + attr +
                        ";");
    }
}

} // namespace

std::string emit_dot(const ProcessModel& model) {
    std::map<std::string, std::vector<std::string>> lanes; // actor -> node lines
    std::vector<std::string> edges;
    collect_dot_nodes(model.graph, lanes, edges);

    std::ostringstream out;
    out << "digraph model {\n  rankdir=LR;\n";
    size_t lane = 0;
    for (const auto& [actor, lines] : lanes) {
        out << "  subgraph cluster_" << lane++ << " {\n";
        out << "    label=\"" << dot_escape(actor) << "\";\n";
        for (const std::string& line : lines) out << "    " << line << "\n";
        out << "  }\n";
    }
    for (const std::string& line : edges) out << "  " << line << "\n";
    out << "}\n";
    return out.str();
}

std::string emit_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    json j = json::array();
    for (const Diagnostic& d : diagnostics) {
        json dj = json::object();
        dj["code"] = to_string(d.code);
        dj["severity"] = "error";
        dj["subject"] = d.subject;
        dj["message"] = d.message;
        j.push_back(dj);
    }
    return j.dump(2) + "\n";
}

} // namespace chaindecomp
