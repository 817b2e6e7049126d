#include "chaindecomp/model.hpp"

#include <algorithm>
#include <deque>

#include "chaindecomp/errors.hpp"

namespace chaindecomp {

const char* to_string(NodeType t) {
    switch (t) {
    case NodeType::Activity: return "Activity";
    case NodeType::BusinessRuleTask: return "BusinessRuleTask";
    case NodeType::Start: return "Start";
    case NodeType::End: return "End";
    case NodeType::XorSplit: return "XorSplit";
    case NodeType::XorJoin: return "XorJoin";
    case NodeType::ParSplit: return "ParSplit";
    case NodeType::ParJoin: return "ParJoin";
    case NodeType::SubProcess: return "SubProcess";
    case NodeType::CommunicationTask: return "CommunicationTask";
    case NodeType::Sign: return "Sign";
    case NodeType::StartTask: return "StartT";
    case NodeType::EndTask: return "EndT";
    case NodeType::Oracle: return "Oracle";
    case NodeType::RevOracle: return "RevOracle";
    case NodeType::Send: return "Send";
    case NodeType::Receive: return "Receive";
    case NodeType::DataHandler: return "DataHandler";
    }
    return "?";
}

const char* to_string(ExecMode e) {
    switch (e) {
    case ExecMode::OffChain: return "offChain";
    case ExecMode::Tracked: return "tracked";
    case ExecMode::OnChain: return "onChain";
    }
    return "?";
}

const char* to_string(Storage s) {
    switch (s) {
    case Storage::OffChain: return "offchain";
    case Storage::OnChain: return "onchain";
    case Storage::Digest: return "digest";
    }
    return "?";
}

const char* to_string(ObjectKind k) {
    switch (k) {
    case ObjectKind::Global: return "global";
    case ObjectKind::Local: return "local";
    case ObjectKind::Hash: return "hash";
    }
    return "?";
}

Node::Node(const Node& other)
    : id(other.id),
      type(other.type),
      actor(other.actor),
      exec(other.exec),
      label(other.label),
      read(other.read),
      write(other.write),
      condition(other.condition),
      loop_condition(other.loop_condition),
      body(other.body ? std::make_unique<Graph>(*other.body) : nullptr),
      res(other.res),
      ref(other.ref),
      wait_for(other.wait_for),
      wait_event(other.wait_event) {}

Node& Node::operator=(const Node& other) {
    if (this != &other) {
        Node tmp(other);
        *this = std::move(tmp);
    }
    return *this;
}

Node::~Node() = default;

bool Node::reads(const std::string& object) const {
    return std::binary_search(read.begin(), read.end(), object);
}

bool Node::writes(const std::string& object) const {
    return std::binary_search(write.begin(), write.end(), object);
}

bool Node::is_task() const {
    return type == NodeType::Activity || type == NodeType::BusinessRuleTask;
}

bool Node::is_gateway() const {
    return type == NodeType::XorSplit || type == NodeType::XorJoin ||
           type == NodeType::ParSplit || type == NodeType::ParJoin;
}

namespace {

auto node_lower_bound(const std::vector<Node>& nodes, const std::string& id) {
    return std::lower_bound(nodes.begin(), nodes.end(), id,
                            [](const Node& n, const std::string& key) { return n.id < key; });
}

} // namespace

const Node* Graph::find(const std::string& id) const {
    auto it = node_lower_bound(nodes, id);
    if (it != nodes.end() && it->id == id) return &*it;
    return nullptr;
}

Node* Graph::find(const std::string& id) {
    return const_cast<Node*>(static_cast<const Graph*>(this)->find(id));
}

const Node& Graph::at(const std::string& id) const {
    const Node* n = find(id);
    if (!n) throw ReferenceError("unknown node '" + id + "'");
    return *n;
}

Node& Graph::at(const std::string& id) {
    return const_cast<Node&>(static_cast<const Graph*>(this)->at(id));
}

bool Graph::contains(const std::string& id) const {
    return find(id) != nullptr;
}

void Graph::add_node(Node n) {
    auto it = node_lower_bound(nodes, n.id);
    if (it != nodes.end() && it->id == n.id)
        throw StructureError("duplicate node id '" + n.id + "'");
    nodes.insert(it, std::move(n));
}

void Graph::remove_node(const std::string& id) {
    auto it = node_lower_bound(nodes, id);
    if (it == nodes.end() || it->id != id)
        throw ReferenceError("unknown node '" + id + "'");
    nodes.erase(it);
}

void Graph::add_edge(Edge e) {
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    edges.insert(it, std::move(e));
}

void Graph::remove_edge(const Edge& e) {
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || !(*it == e))
        throw ReferenceError("unknown edge " + e.from + " -> " + e.to);
    edges.erase(it);
}

std::vector<const Node*> Graph::predecessors(const std::string& id) const {
    std::vector<const Node*> out;
    for (const Edge& e : edges)
        if (e.to == id) out.push_back(&at(e.from));
    return out;
}

std::vector<const Node*> Graph::successors(const std::string& id) const {
    std::vector<const Node*> out;
    for (const Edge& e : edges)
        if (e.from == id) out.push_back(&at(e.to));
    return out;
}

std::vector<Edge> Graph::in_edges(const std::string& id) const {
    std::vector<Edge> out;
    for (const Edge& e : edges)
        if (e.to == id) out.push_back(e);
    return out;
}

std::vector<Edge> Graph::out_edges(const std::string& id) const {
    std::vector<Edge> out;
    for (const Edge& e : edges)
        if (e.from == id) out.push_back(e);
    return out;
}

void Graph::insert_on_edge(const Edge& e, Node n) {
    const std::string id = n.id;
    remove_edge(e);
    add_node(std::move(n));
    add_edge({e.from, id, e.label});
    add_edge({id, e.to, e.label});
}

void Graph::contract_node(const std::string& id) {
    auto in = in_edges(id);
    auto out = out_edges(id);
    if (in.size() != 1 || out.size() != 1)
        throw StructureError("cannot contract node '" + id + "' with degree " +
                             std::to_string(in.size()) + "/" + std::to_string(out.size()));
    remove_edge(in[0]);
    remove_edge(out[0]);
    remove_node(id);
    const std::string& label = !in[0].label.empty() ? in[0].label : out[0].label;
    add_edge({in[0].from, out[0].to, label});
}

void Graph::replace_node(const std::string& id, Node n) {
    for (Edge& e : edges) {
        if (e.from == id) e.from = n.id;
        if (e.to == id) e.to = n.id;
    }
    remove_node(id);
    add_node(std::move(n));
    std::sort(edges.begin(), edges.end());
}

std::vector<std::string> Graph::topological_order() const {
    std::vector<std::string> order;
    order.reserve(nodes.size());
    std::vector<std::pair<std::string, int>> indegree;
    for (const Node& n : nodes) indegree.emplace_back(n.id, 0);
    auto deg = [&](const std::string& id) -> int& {
        auto it = std::lower_bound(indegree.begin(), indegree.end(), id,
                                   [](const auto& p, const std::string& k) { return p.first < k; });
        return it->second;
    };
    for (const Edge& e : edges) ++deg(e.to);
    // Ascending id order among ready nodes keeps the result deterministic.
    std::deque<std::string> ready;
    for (const auto& [id, d] : indegree)
        if (d == 0) ready.push_back(id);
    while (!ready.empty()) {
        std::string id = ready.front();
        ready.pop_front();
        order.push_back(id);
        for (const Edge& e : out_edges(id))
            if (--deg(e.to) == 0) ready.push_back(e.to);
        std::sort(ready.begin(), ready.end());
    }
    if (order.size() != nodes.size())
        throw StructureError("graph contains a cycle");
    return order;
}

std::vector<std::string> Graph::all_ids_recursive() const {
    std::vector<std::string> out;
    for (const Node& n : nodes) {
        out.push_back(n.id);
        if (n.body) {
            auto inner = n.body->all_ids_recursive();
            out.insert(out.end(), inner.begin(), inner.end());
        }
    }
    return out;
}

bool Graph::operator==(const Graph& other) const {
    if (edges != other.edges || nodes.size() != other.nodes.size()) return false;
    for (size_t i = 0; i < nodes.size(); ++i) {
        const Node& a = nodes[i];
        const Node& b = other.nodes[i];
        if (a.id != b.id || a.type != b.type || a.actor != b.actor || a.exec != b.exec ||
            a.label != b.label || a.read != b.read || a.write != b.write ||
            a.condition != b.condition || a.loop_condition != b.loop_condition ||
            a.res != b.res || a.ref != b.ref || a.wait_for != b.wait_for ||
            a.wait_event != b.wait_event)
            return false;
        if (static_cast<bool>(a.body) != static_cast<bool>(b.body)) return false;
        if (a.body && !(*a.body == *b.body)) return false;
    }
    return true;
}

const DataObject* ProcessModel::find_object(const std::string& id) const {
    auto it = std::lower_bound(objects.begin(), objects.end(), id,
                               [](const DataObject& o, const std::string& k) { return o.id < k; });
    if (it != objects.end() && it->id == id) return &*it;
    return nullptr;
}

DataObject* ProcessModel::find_object(const std::string& id) {
    return const_cast<DataObject*>(static_cast<const ProcessModel*>(this)->find_object(id));
}

bool ProcessModel::is_decision_var(const std::string& id) const {
    return std::binary_search(decision_vars.begin(), decision_vars.end(), id);
}

bool ProcessModel::has_actor(const std::string& a) const {
    return std::binary_search(actors.begin(), actors.end(), a);
}

void ProcessModel::add_object(DataObject o) {
    auto it = std::lower_bound(objects.begin(), objects.end(), o.id,
                               [](const DataObject& x, const std::string& k) { return x.id < k; });
    if (it != objects.end() && it->id == o.id)
        throw StructureError("duplicate data object id '" + o.id + "'");
    objects.insert(it, std::move(o));
}

void ProcessModel::add_actor(const std::string& a) {
    auto it = std::lower_bound(actors.begin(), actors.end(), a);
    if (it == actors.end() || *it != a) actors.insert(it, a);
}

std::string ProcessModel::ensure_replica(ObjectKind kind, const std::string& owner,
                                         const std::string& basis) {
    for (const DataObject& o : objects)
        if (o.kind == kind && o.owner == owner && o.basis == basis) return o.id;
    DataObject o;
    o.id = basis + "@" + owner + (kind == ObjectKind::Hash ? "@h" : "");
    o.kind = kind;
    o.owner = owner;
    o.basis = basis;
    std::string id = o.id;
    add_object(std::move(o));
    return id;
}

bool on_chain_visible(const Node& n) {
    if (n.actor == kChainActor) return true;
    switch (n.type) {
    case NodeType::Oracle:
    case NodeType::StartTask:
    case NodeType::EndTask:
        return true;
    case NodeType::Activity:
    case NodeType::BusinessRuleTask:
        return n.exec == ExecMode::OnChain || n.exec == ExecMode::Tracked;
    default:
        return false;
    }
}

bool is_augmentation_type(NodeType t) {
    switch (t) {
    case NodeType::CommunicationTask:
    case NodeType::Sign:
    case NodeType::StartTask:
    case NodeType::EndTask:
    case NodeType::Oracle:
    case NodeType::RevOracle:
    case NodeType::Send:
    case NodeType::Receive:
    case NodeType::DataHandler:
        return true;
    default:
        return false;
    }
}

} // namespace chaindecomp
