#ifndef CHAINDECOMP_MODEL_HPP
#define CHAINDECOMP_MODEL_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace chaindecomp {

/// Reserved actor name: the blockchain itself.
inline const std::string kChainActor = "chain";

enum class NodeType {
    Activity,
    BusinessRuleTask,
    Start,
    End,
    XorSplit,
    XorJoin,
    ParSplit,
    ParJoin,
    SubProcess,
    CommunicationTask,
    Sign,
    StartTask,
    EndTask,
    Oracle,
    RevOracle,
    Send,
    Receive,
    DataHandler,
};

/// Where a task runs: fully on a local engine, on a local engine with
/// start/end recorded on-chain, or as smart-contract code.
enum class ExecMode { OffChain, Tracked, OnChain };

/// Storage model of a global data object.
enum class Storage { OffChain, OnChain, Digest };

/// Global objects live in the shared model; local/hash objects are
/// per-participant replicas keyed by (owner, basis).
enum class ObjectKind { Global, Local, Hash };

/// What a reverse oracle waits for: the completion of the referenced
/// on-chain node, or its first activation (used for loop starts).
enum class WaitEvent { Completion, Entry };

const char* to_string(NodeType t);
const char* to_string(ExecMode e);
const char* to_string(Storage s);
const char* to_string(ObjectKind k);

struct DataObject {
    std::string id;
    ObjectKind kind = ObjectKind::Global;
    std::optional<Storage> storage; // global non-decision objects only
    std::string owner;              // local/hash only
    std::string basis;              // local/hash only: replicated global object

    bool operator==(const DataObject&) const = default;
};

struct Edge {
    std::string from;
    std::string to;
    std::string label; // empty, or the xor branch condition "c" / "!c"

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

struct Graph;

struct Node {
    std::string id;
    NodeType type = NodeType::Activity;
    std::string actor;
    ExecMode exec = ExecMode::OffChain; // activities / business rule tasks
    std::string label;
    std::vector<std::string> read;  // sorted object ids
    std::vector<std::string> write; // sorted object ids
    std::string condition;          // XorSplit: decision variable
    std::string loop_condition;     // SubProcess: decision variable (empty = run once)
    std::unique_ptr<Graph> body;    // SubProcess only
    std::string res;                // CommunicationTask/Send/Receive: counterpart actor
    std::string ref;                // Sign/StartTask/EndTask: referenced node
    std::string wait_for;           // RevOracle: on-chain node awaited (empty = none)
    WaitEvent wait_event = WaitEvent::Completion;

    Node() = default;
    Node(const Node& other);
    Node& operator=(const Node& other);
    Node(Node&&) noexcept = default;
    Node& operator=(Node&&) noexcept = default;
    ~Node();

    bool reads(const std::string& object) const;
    bool writes(const std::string& object) const;
    bool is_task() const; // Activity or BusinessRuleTask
    bool is_gateway() const;
};

/// Nodes and edges of one nesting level. Object/actor universes live on
/// the enclosing ProcessModel; sub-process bodies are plain graphs.
struct Graph {
    std::vector<Node> nodes; // kept sorted by id
    std::vector<Edge> edges; // kept sorted by (from, to, label)

    const Node* find(const std::string& id) const;
    Node* find(const std::string& id);
    const Node& at(const std::string& id) const;
    Node& at(const std::string& id);
    bool contains(const std::string& id) const;

    void add_node(Node n);
    void remove_node(const std::string& id);
    void add_edge(Edge e);
    void remove_edge(const Edge& e);

    std::vector<const Node*> predecessors(const std::string& id) const;
    std::vector<const Node*> successors(const std::string& id) const;
    std::vector<Edge> in_edges(const std::string& id) const;
    std::vector<Edge> out_edges(const std::string& id) const;

    /// Splits every edge (from, to) by routing it through a new node:
    /// from -> node -> to, preserving the label on both halves.
    void insert_on_edge(const Edge& e, Node n);

    /// Removes a node with exactly one incoming and one outgoing edge,
    /// reconnecting its neighbours. The surviving edge keeps the incoming
    /// label if set, otherwise the outgoing one.
    void contract_node(const std::string& id);

    /// Replaces a node in place, keeping all edges (the new node inherits
    /// the old id's position in the graph under its own id).
    void replace_node(const std::string& id, Node n);

    /// Node ids in topological order; throws StructureError on a cycle.
    std::vector<std::string> topological_order() const;

    /// All node ids of this level plus nested bodies.
    std::vector<std::string> all_ids_recursive() const;

    bool operator==(const Graph&) const;
};

/// A blockchain-extended process model: one graph level plus the shared
/// universes of data objects, decision variables, and actors.
struct ProcessModel {
    Graph graph;
    std::vector<DataObject> objects;        // sorted by id
    std::vector<std::string> decision_vars; // subset of objects, sorted
    std::vector<std::string> actors;        // sorted, contains "chain"

    const DataObject* find_object(const std::string& id) const;
    DataObject* find_object(const std::string& id);
    bool is_decision_var(const std::string& id) const;
    bool has_actor(const std::string& a) const;

    void add_object(DataObject o);
    void add_actor(const std::string& a);

    /// Finds or creates the local/hash replica of a global object for an
    /// owner; (kind, owner, basis) is a key. Returns its id.
    std::string ensure_replica(ObjectKind kind, const std::string& owner, const std::string& basis);

    bool operator==(const ProcessModel&) const = default;
};

/// True if the node is recorded on-chain: chain-owned, executed or tracked
/// on-chain, or one of the intrinsically on-chain task types.
bool on_chain_visible(const Node& n);

/// True for the node types introduced by the augmentation stages.
bool is_augmentation_type(NodeType t);

} // namespace chaindecomp

#endif
