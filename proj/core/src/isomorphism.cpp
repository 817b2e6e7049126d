#include "chaindecomp/isomorphism.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace chaindecomp {

namespace {

std::string normalize_object(const ProcessModel& model, const std::string& id) {
    const DataObject* o = model.find_object(id);
    if (!o || o->kind == ObjectKind::Global) return "g:" + id;
    return std::string(to_string(o->kind)) + ":" + o->owner + ":" + o->basis;
}

std::vector<std::string> normalize_set(const ProcessModel& model,
                                       const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (const std::string& id : ids) out.push_back(normalize_object(model, id));
    std::sort(out.begin(), out.end());
    return out;
}

std::string signature(const ProcessModel& model, const Node& n, bool with_data) {
    std::ostringstream sig;
    sig << to_string(n.type) << "|" << n.actor << "|" << n.res << "|" << n.condition << "|"
        << n.loop_condition << "|" << (n.wait_event == WaitEvent::Entry ? "entry" : "done");
    if (n.is_task()) sig << "|" << to_string(n.exec);
    if (with_data) {
        sig << "|r[";
        for (const std::string& t : normalize_set(model, n.read)) sig << t << ";";
        sig << "]w[";
        for (const std::string& t : normalize_set(model, n.write)) sig << t << ";";
        sig << "]";
    }
    return sig.str();
}

struct GraphMatcher {
    const ProcessModel& ma;
    const ProcessModel& mb;
    bool with_data;

    bool match(const Graph& a, const Graph& b) {
        if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;

        // Fast path: identical node ids (erasure comparisons preserve ids).
        bool same_ids = true;
        for (const Node& n : a.nodes)
            if (!b.contains(n.id)) same_ids = false;
        if (same_ids) {
            std::map<std::string, std::string> identity;
            bool ok = true;
            for (const Node& n : a.nodes) {
                const Node& c = b.at(n.id);
                if (signature(ma, n, with_data) != signature(mb, c, with_data) ||
                    static_cast<bool>(n.body) != static_cast<bool>(c.body) ||
                    (n.body && !GraphMatcher{ma, mb, with_data}.match(*n.body, *c.body))) {
                    ok = false;
                    break;
                }
                identity[n.id] = n.id;
            }
            if (ok && verify(a, b, identity)) return true;
        }

        // Topological assignment order keeps each new node adjacent to an
        // already-mapped one, so the edge check prunes early.
        std::vector<std::string> order;
        try {
            order = a.topological_order();
        } catch (...) {
            for (const Node& n : a.nodes) order.push_back(n.id);
        }
        std::map<std::string, std::string> mapping;
        return assign(a, b, order, 0, mapping);
    }

    bool assign(const Graph& a, const Graph& b, const std::vector<std::string>& order, size_t idx,
                std::map<std::string, std::string>& mapping) {
        if (idx == order.size()) return verify(a, b, mapping);
        const Node& n = a.at(order[idx]);
        std::string sig = signature(ma, n, with_data);
        std::set<std::string> used;
        for (const auto& [from, to] : mapping) used.insert(to);
        for (const Node& c : b.nodes) {
            if (used.count(c.id)) continue;
            if (signature(mb, c, with_data) != sig) continue;
            if (!edges_consistent(a, b, n.id, c.id, mapping)) continue;
            if (static_cast<bool>(n.body) != static_cast<bool>(c.body)) continue;
            if (n.body && !GraphMatcher{ma, mb, with_data}.match(*n.body, *c.body)) continue;
            mapping[n.id] = c.id;
            if (assign(a, b, order, idx + 1, mapping)) return true;
            mapping.erase(n.id);
        }
        return false;
    }

    // Every edge between already-mapped nodes must exist identically on the
    // other side (and no extra edges between the images).
    bool edges_consistent(const Graph& a, const Graph& b, const std::string& na,
                          const std::string& nb,
                          const std::map<std::string, std::string>& mapping) {
        for (const auto& [from, to] : mapping) {
            for (const std::string& label : edge_labels(a, na, from))
                if (edge_count(a, na, from, label) != edge_count(b, nb, to, label)) return false;
            for (const std::string& label : edge_labels(a, from, na))
                if (edge_count(a, from, na, label) != edge_count(b, to, nb, label)) return false;
            // Absent edges must stay absent.
            if (edge_count(a, na, from, "", true) != edge_count(b, nb, to, "", true)) return false;
            if (edge_count(a, from, na, "", true) != edge_count(b, to, nb, "", true)) return false;
        }
        return true;
    }

    static std::set<std::string> edge_labels(const Graph& g, const std::string& from,
                                             const std::string& to) {
        std::set<std::string> labels;
        for (const Edge& e : g.edges)
            if (e.from == from && e.to == to) labels.insert(e.label);
        return labels;
    }

    static size_t edge_count(const Graph& g, const std::string& from, const std::string& to,
                             const std::string& label, bool any_label = false) {
        size_t n = 0;
        for (const Edge& e : g.edges)
            if (e.from == from && e.to == to && (any_label || e.label == label)) ++n;
        return n;
    }

    bool verify(const Graph& a, const Graph& b, const std::map<std::string, std::string>& mapping) {
        // Edge multisets must coincide under the mapping.
        std::vector<Edge> mapped;
        for (const Edge& e : a.edges) mapped.push_back({mapping.at(e.from), mapping.at(e.to), e.label});
        std::sort(mapped.begin(), mapped.end());
        std::vector<Edge> bs = b.edges;
        std::sort(bs.begin(), bs.end());
        if (mapped != bs) return false;

        // Node references must commute with the mapping; references leaving
        // the level (projection wait targets) must agree literally.
        for (const Node& n : a.nodes) {
            const Node& c = b.at(mapping.at(n.id));
            for (auto [ra, rb] : {std::pair{&n.ref, &c.ref}, std::pair{&n.wait_for, &c.wait_for}}) {
                if (ra->empty() != rb->empty()) return false;
                if (ra->empty()) continue;
                auto it = mapping.find(*ra);
                if (it != mapping.end()) {
                    if (it->second != *rb) return false;
                } else if (*ra != *rb) {
                    return false;
                }
            }
        }
        return true;
    }
};

} // namespace

bool isomorphic(const ProcessModel& a, const ProcessModel& b) {
    return GraphMatcher{a, b, true}.match(a.graph, b.graph);
}

bool isomorphic_control_flow(const ProcessModel& a, const ProcessModel& b) {
    return GraphMatcher{a, b, false}.match(a.graph, b.graph);
}

ProcessModel erase_augmentation(const ProcessModel& model) {
    ProcessModel out = model;
    std::function<void(Graph&)> erase = [&](Graph& g) {
        for (Node& n : g.nodes)
            if (n.body) erase(*n.body);
        std::vector<std::string> doomed;
        for (const Node& n : g.nodes)
            if (is_augmentation_type(n.type)) doomed.push_back(n.id);
        for (const std::string& id : doomed) g.contract_node(id);
    };
    erase(out.graph);
    return out;
}

std::string isomorphism_mismatch(const ProcessModel& a, const ProcessModel& b) {
    if (isomorphic(a, b)) return "";
    std::ostringstream out;
    if (a.graph.nodes.size() != b.graph.nodes.size())
        out << "node counts differ: " << a.graph.nodes.size() << " vs " << b.graph.nodes.size()
            << "; ";
    if (a.graph.edges.size() != b.graph.edges.size())
        out << "edge counts differ: " << a.graph.edges.size() << " vs " << b.graph.edges.size()
            << "; ";
    std::map<std::string, int> sa, sb;
    for (const Node& n : a.graph.nodes) ++sa[signature(a, n, true)];
    for (const Node& n : b.graph.nodes) ++sb[signature(b, n, true)];
    for (const auto& [sig, count] : sa)
        if (sb[sig] != count)
            out << "signature '" << sig << "': " << count << " vs " << sb[sig] << "; ";
    for (const auto& [sig, count] : sb)
        if (!sa.count(sig)) out << "signature '" << sig << "': 0 vs " << count << "; ";
    std::string s = out.str();
    return s.empty() ? "models differ in wiring (same node signatures)" : s;
}

} // namespace chaindecomp
