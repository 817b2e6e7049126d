#include "chaindecomp/analysis.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "chaindecomp/errors.hpp"

namespace chaindecomp {

namespace {

bool is_split(const Node& n) {
    return n.type == NodeType::XorSplit || n.type == NodeType::ParSplit;
}

bool is_join(const Node& n) {
    return n.type == NodeType::XorJoin || n.type == NodeType::ParJoin;
}

// Depth scan from `id` towards the join closing the block opened `depth`
// levels up. All paths must agree on the result.
std::string scan_to_join(const Graph& g, const std::string& id, int depth,
                         std::map<std::pair<std::string, int>, std::string>& memo) {
    auto key = std::make_pair(id, depth);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    const Node& n = g.at(id);
    std::string result;
    if (is_join(n)) {
        if (depth == 0) {
            result = id;
            memo[key] = result;
            return result;
        }
        --depth;
    } else if (is_split(n)) {
        ++depth;
    }
    auto out = g.out_edges(id);
    if (out.empty())
        throw StructureError("no matching join reachable from '" + id + "'");
    for (const Edge& e : out) {
        std::string r = scan_to_join(g, e.to, depth, memo);
        if (result.empty())
            result = r;
        else if (result != r)
            throw StructureError("paths from '" + id + "' disagree on the matching join");
    }
    memo[key] = result;
    return result;
}

} // namespace

std::string find_matching_join(const Graph& g, const std::string& split) {
    const Node& s = g.at(split);
    if (!is_split(s))
        throw StructureError("'" + split + "' is not a split node");
    std::map<std::pair<std::string, int>, std::string> memo;
    std::string join;
    for (const Edge& e : g.out_edges(split)) {
        std::string r = scan_to_join(g, e.to, 0, memo);
        if (join.empty())
            join = r;
        else if (join != r)
            throw StructureError("branches of '" + split + "' close at different joins");
    }
    if (join.empty())
        throw StructureError("split '" + split + "' has no outgoing edges");
    const Node& j = g.at(join);
    bool type_ok = (s.type == NodeType::XorSplit && j.type == NodeType::XorJoin) ||
                   (s.type == NodeType::ParSplit && j.type == NodeType::ParJoin);
    if (!type_ok)
        throw StructureError("split '" + split + "' closes at mismatched join '" + join + "'");
    return join;
}

namespace {

// Nodes strictly between `entry` and `stop`, in topological order.
std::vector<std::string> collect_branch(const Graph& g, const std::string& entry,
                                        const std::string& stop) {
    std::set<std::string> seen;
    std::deque<std::string> work;
    if (entry != stop) work.push_back(entry);
    while (!work.empty()) {
        std::string id = work.front();
        work.pop_front();
        if (id == stop || seen.count(id)) continue;
        seen.insert(id);
        for (const Edge& e : g.out_edges(id)) work.push_back(e.to);
    }
    std::vector<std::string> ordered;
    for (const std::string& id : g.topological_order())
        if (seen.count(id)) ordered.push_back(id);
    return ordered;
}

} // namespace

Block block_of(const Graph& g, const std::string& split) {
    Block b;
    b.split = split;
    b.join = find_matching_join(g, split);
    auto out = g.out_edges(split);
    if (out.size() != 2)
        throw StructureError("split '" + split + "' must have exactly two outgoing edges");
    // Branch 0 is the true branch of a xor split; par branches are ordered
    // by entry node id.
    const Node& s = g.at(split);
    if (s.type == NodeType::XorSplit && out[0].label != s.condition)
        std::swap(out[0], out[1]);
    b.branches[0] = collect_branch(g, out[0].to, b.join);
    b.branches[1] = collect_branch(g, out[1].to, b.join);
    return b;
}

std::set<std::string> ancestors_of(const Graph& g, const std::string& id) {
    std::set<std::string> seen;
    std::deque<std::string> work;
    for (const Edge& e : g.in_edges(id)) work.push_back(e.from);
    while (!work.empty()) {
        std::string cur = work.front();
        work.pop_front();
        if (!seen.insert(cur).second) continue;
        for (const Edge& e : g.in_edges(cur)) work.push_back(e.from);
    }
    return seen;
}

bool InstanceType::value(const std::string& var, const std::string& suffix) const {
    auto it = valuation.find({var, suffix});
    if (it == valuation.end())
        throw InstanceMismatchError("instance type lacks a value for decision '" + var +
                                    "' at iteration '" + suffix + "'");
    return it->second;
}

std::string InstanceType::key() const {
    std::string out;
    for (const auto& [k, v] : valuation) {
        if (!out.empty()) out += ";";
        out += k.first + "@" + k.second + "=" + (v ? "1" : "0");
    }
    return out;
}

namespace {

using Valuation = std::map<std::pair<std::string, std::string>, bool>;

void check_cap(size_t n, int cap) {
    if (cap > 0 && n > static_cast<size_t>(cap))
        throw CapacityError("instance type enumeration exceeds cap of " + std::to_string(cap));
}

std::vector<Valuation> cross(const std::vector<Valuation>& a, const std::vector<Valuation>& b,
                             int cap) {
    check_cap(a.size() * b.size(), cap);
    std::vector<Valuation> out;
    out.reserve(a.size() * b.size());
    for (const Valuation& x : a)
        for (const Valuation& y : b) {
            Valuation m = x;
            m.insert(y.begin(), y.end());
            out.push_back(std::move(m));
        }
    return out;
}

const Node& entry_node(const Graph& g) {
    const Node* entry = nullptr;
    for (const Node& n : g.nodes) {
        if (g.in_edges(n.id).empty()) {
            if (entry) throw StructureError("graph has more than one entry node");
            entry = &n;
        }
    }
    if (!entry) throw StructureError("graph has no entry node");
    return *entry;
}

std::string single_successor(const Graph& g, const std::string& id) {
    auto out = g.out_edges(id);
    if (out.size() != 1)
        throw StructureError("node '" + id + "' must have exactly one successor here");
    return out[0].to;
}

// Valuations of the fragment starting at `id` up to (exclusive) `stop`.
// An empty `stop` means "walk to the level's end node".
std::vector<Valuation> enumerate_fragment(const Graph& g, const std::string& id,
                                          const std::string& stop, const std::string& suffix,
                                          int loop_bound, int cap) {
    if (id == stop) return {Valuation{}};
    const Node& n = g.at(id);
    switch (n.type) {
    case NodeType::End:
        return {Valuation{}};
    case NodeType::XorSplit: {
        std::string join = find_matching_join(g, id);
        std::vector<Valuation> taken;
        for (bool v : {false, true}) {
            std::string want = v ? n.condition : "!" + n.condition;
            std::string entry;
            for (const Edge& e : g.out_edges(id))
                if (e.label == want) entry = e.to;
            if (entry.empty())
                throw StructureError("xor split '" + id + "' lacks a branch labeled '" + want + "'");
            auto branch = enumerate_fragment(g, entry, join, suffix, loop_bound, cap);
            for (Valuation& val : branch) {
                val[{n.condition, suffix}] = v;
                taken.push_back(std::move(val));
            }
            check_cap(taken.size(), cap);
        }
        auto after = enumerate_fragment(g, single_successor(g, join), stop, suffix, loop_bound, cap);
        return cross(taken, after, cap);
    }
    case NodeType::ParSplit: {
        std::string join = find_matching_join(g, id);
        auto out = g.out_edges(id);
        auto left = enumerate_fragment(g, out[0].to, join, suffix, loop_bound, cap);
        auto right = enumerate_fragment(g, out[1].to, join, suffix, loop_bound, cap);
        auto both = cross(left, right, cap);
        auto after = enumerate_fragment(g, single_successor(g, join), stop, suffix, loop_bound, cap);
        return cross(both, after, cap);
    }
    case NodeType::SubProcess: {
        if (!n.body) throw StructureError("sub-process '" + id + "' has no body");
        const std::string body_entry = single_successor(*n.body, entry_node(*n.body).id);
        std::vector<Valuation> runs;
        if (n.loop_condition.empty()) {
            runs = enumerate_fragment(*n.body, body_entry, "", suffix + "#1", loop_bound, cap);
        } else {
            // Do-while: the body runs n times, the condition is true after
            // every iteration but the last.
            for (int total = 1; total <= loop_bound; ++total) {
                std::vector<Valuation> chain = {Valuation{}};
                for (int k = 1; k <= total; ++k) {
                    std::string iter = suffix + "#" + std::to_string(k);
                    auto body = enumerate_fragment(*n.body, body_entry, "", iter, loop_bound, cap);
                    for (Valuation& val : body) val[{n.loop_condition, iter}] = (k < total);
                    chain = cross(chain, body, cap);
                }
                runs.insert(runs.end(), chain.begin(), chain.end());
                check_cap(runs.size(), cap);
            }
        }
        auto after = enumerate_fragment(g, single_successor(g, id), stop, suffix, loop_bound, cap);
        return cross(runs, after, cap);
    }
    default:
        return enumerate_fragment(g, single_successor(g, id), stop, suffix, loop_bound, cap);
    }
}

} // namespace

std::vector<InstanceType> enumerate_instance_types(const ProcessModel& model, int loop_bound,
                                                   int cap) {
    if (loop_bound < 1) throw PreconditionError("loop bound must be at least 1");
    const Node& start = entry_node(model.graph);
    auto valuations = enumerate_fragment(model.graph, start.id, "", "", loop_bound, cap);
    std::vector<InstanceType> out;
    out.reserve(valuations.size());
    for (Valuation& v : valuations) {
        InstanceType inst;
        inst.valuation = std::move(v);
        inst.loop_bound = loop_bound;
        out.push_back(std::move(inst));
    }
    std::sort(out.begin(), out.end(),
              [](const InstanceType& a, const InstanceType& b) { return a.key() < b.key(); });
    return out;
}

namespace {

struct UnrollBuilder {
    const InstanceType& inst;
    bool exec_markers;
    Graph out;

    std::string emit(Node n, const std::string& tail) {
        std::string id = n.id;
        out.add_node(std::move(n));
        if (!tail.empty()) out.add_edge({tail, id, ""});
        return id;
    }

    std::string marker(const std::string& id, const std::string& actor, const std::string& tail) {
        Node m;
        m.id = id;
        m.type = NodeType::Start; // silent pass-through step
        m.actor = actor;
        return emit(std::move(m), tail);
    }

    // Walks the fragment [from, stop) of `g`, appending copies suffixed with
    // `suffix` after `tail`. Returns the id of the last emitted node.
    std::string build(const Graph& g, const std::string& from, const std::string& stop,
                      const std::string& suffix, std::string tail) {
        std::string id = from;
        while (id != stop) {
            const Node& n = g.at(id);
            switch (n.type) {
            case NodeType::End:
                if (stop.empty() && !suffix.empty()) return tail; // spliced body exit
                tail = copy_plain(n, suffix, tail);
                return tail;
            case NodeType::XorSplit: {
                std::string join = find_matching_join(g, id);
                bool v = inst.value(n.condition, suffix);
                std::string want = v ? n.condition : "!" + n.condition;
                std::string entry;
                for (const Edge& e : g.out_edges(id))
                    if (e.label == want) entry = e.to;
                if (entry.empty())
                    throw StructureError("xor split '" + id + "' lacks branch '" + want + "'");
                if (exec_markers) tail = marker(id + suffix, n.actor, tail);
                tail = build(g, entry, join, suffix, tail);
                if (exec_markers) tail = marker(join + suffix, g.at(join).actor, tail);
                id = single_successor(g, join);
                break;
            }
            case NodeType::ParSplit: {
                std::string join = find_matching_join(g, id);
                auto out_e = g.out_edges(id);
                Node split = n;
                split.id = id + suffix;
                std::string split_id = emit(std::move(split), tail);
                std::string t1 = build(g, out_e[0].to, join, suffix, split_id);
                std::string t2 = build(g, out_e[1].to, join, suffix, split_id);
                Node join_copy = g.at(join);
                join_copy.id = join + suffix;
                std::string join_id = emit(std::move(join_copy), t1);
                out.add_edge({t2, join_id, ""});
                tail = join_id;
                id = single_successor(g, join);
                break;
            }
            case NodeType::SubProcess: {
                if (!n.body) throw StructureError("sub-process '" + id + "' has no body");
                const std::string body_entry = single_successor(*n.body, entry_node(*n.body).id);
                int total = 1;
                if (!n.loop_condition.empty()) {
                    while (inst.value(n.loop_condition, suffix + "#" + std::to_string(total)))
                        ++total;
                }
                for (int k = 1; k <= total; ++k) {
                    std::string iter = suffix + "#" + std::to_string(k);
                    if (exec_markers)
                        tail = marker(id + suffix + "@enter#" + std::to_string(k), n.actor, tail);
                    tail = build(*n.body, body_entry, "", iter, tail);
                }
                if (exec_markers) tail = marker(id + suffix, n.actor, tail);
                id = single_successor(g, id);
                break;
            }
            default:
                tail = copy_plain(n, suffix, tail);
                id = single_successor(g, id);
                break;
            }
        }
        return tail;
    }

    std::string copy_plain(const Node& n, const std::string& suffix, const std::string& tail) {
        Node c = n;
        c.id = n.id + suffix;
        c.body.reset();
        // Same-level references move with the copy.
        if (!c.ref.empty()) c.ref += suffix;
        if (!c.wait_for.empty()) c.wait_for += suffix;
        return emit(std::move(c), tail);
    }
};

ProcessModel unroll_impl(const ProcessModel& model, const InstanceType& instance,
                         bool exec_markers) {
    UnrollBuilder b{instance, exec_markers, Graph{}};
    const Node& start = entry_node(model.graph);
    b.build(model.graph, start.id, "", "", "");
    ProcessModel out;
    out.graph = std::move(b.out);
    out.objects = model.objects;
    out.decision_vars = model.decision_vars;
    out.actors = model.actors;
    return out;
}

} // namespace

ProcessModel unroll(const ProcessModel& model, const InstanceType& instance) {
    return unroll_impl(model, instance, false);
}

ProcessModel unroll_for_execution(const ProcessModel& model, const InstanceType& instance) {
    return unroll_impl(model, instance, true);
}

OriginResult origin_of_detailed(const ProcessModel& unrolled, const std::string& reader,
                                const std::string& object) {
    const Graph& g = unrolled.graph;
    std::map<std::string, OriginResult> memo;
    std::function<const OriginResult&(const std::string&)> from = [&](const std::string& id)
        -> const OriginResult& {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        OriginResult r;
        auto in = g.in_edges(id);
        if (in.empty()) {
            r.uninitialized_path = true;
        } else {
            for (const Edge& e : in) {
                const Node& p = g.at(e.from);
                if (p.writes(object)) {
                    r.writers.insert(p.id);
                } else {
                    const OriginResult& sub = from(p.id);
                    r.writers.insert(sub.writers.begin(), sub.writers.end());
                    r.uninitialized_path |= sub.uninitialized_path;
                }
            }
        }
        return memo.emplace(id, std::move(r)).first->second;
    };
    g.at(reader);
    return from(reader);
}

std::set<std::string> origin_of(const ProcessModel& unrolled, const std::string& reader,
                                const std::string& object) {
    return origin_of_detailed(unrolled, reader, object).writers;
}

std::set<std::string> actors_of(const Graph& g) {
    std::set<std::string> out;
    for (const Node& n : g.nodes) {
        out.insert(n.actor);
        if (n.body) {
            auto inner = actors_of(*n.body);
            out.insert(inner.begin(), inner.end());
        }
    }
    return out;
}

namespace {

std::set<std::string> actors_of_ids(const Graph& g, const std::vector<std::string>& ids) {
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
}

} // namespace

std::set<std::string> dependent_actors_xor(const Graph& g, const Block& block) {
    auto a0 = actors_of_ids(g, block.branches[0]);
    auto a1 = actors_of_ids(g, block.branches[1]);

    std::set<std::string> inside(block.branches[0].begin(), block.branches[0].end());
    inside.insert(block.branches[1].begin(), block.branches[1].end());
    inside.insert(block.split);
    inside.insert(block.join);
    std::vector<std::string> outside_ids;
    for (const Node& n : g.nodes)
        if (!inside.count(n.id)) outside_ids.push_back(n.id);
    auto outside = actors_of_ids(g, outside_ids);

    std::set<std::string> result;
    for (const std::string& a : a0)
        if (a1.count(a) || outside.count(a)) result.insert(a);
    for (const std::string& a : a1)
        if (a0.count(a) || outside.count(a)) result.insert(a);
    return result;
}

std::set<std::string> dependent_actors_loop(const Graph& g, const std::string& loop) {
    const Node& l = g.at(loop);
    if (l.type != NodeType::SubProcess)
        throw PreconditionError("'" + loop + "' is not a sub-process");
    std::set<std::string> out;
    out.insert(l.actor);
    if (l.body) {
        auto inner = actors_of(*l.body);
        out.insert(inner.begin(), inner.end());
    }
    return out;
}

} // namespace chaindecomp
