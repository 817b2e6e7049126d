#include "chaindecomp/generate.hpp"

#include <algorithm>
#include <random>

#include "chaindecomp/analysis.hpp"
#include "chaindecomp/errors.hpp"
#include "chaindecomp/validate.hpp"

namespace chaindecomp {

namespace {

struct Generator {
    const GeneratorOptions& opts;
    std::mt19937_64 rng;
    ProcessModel model;
    int tasks = 0, decisions = 0, objects = 0, xors = 0, pars = 0, loops = 0;
    int tasks_left, decisions_left, loops_left;

    explicit Generator(const GeneratorOptions& o, std::uint64_t seed)
        : opts(o), rng(seed), tasks_left(o.max_tasks), decisions_left(o.max_decisions),
          loops_left(o.max_loops) {}

    int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

    std::string participant() { return "p" + std::to_string(1 + pick(opts.participants)); }

    std::string gateway_actor() { return pick(4) == 0 ? kChainActor : participant(); }

    ExecMode random_exec() {
        int r = pick(10);
        if (r < 5) return ExecMode::OffChain;
        if (r < 8) return ExecMode::Tracked;
        return ExecMode::OnChain;
    }

    std::string fresh_decision() {
        std::string id = "c" + std::to_string(++decisions);
        DataObject o;
        o.id = id;
        model.add_object(o);
        model.decision_vars.insert(
            std::lower_bound(model.decision_vars.begin(), model.decision_vars.end(), id), id);
        return id;
    }

    std::string fresh_object(Storage s) {
        std::string id = "d" + std::to_string(++objects);
        DataObject o;
        o.id = id;
        o.storage = s;
        model.add_object(o);
        return id;
    }

    bool readable(const std::string& id, ExecMode reader) {
        Storage s = *model.find_object(id)->storage;
        switch (reader) {
        case ExecMode::OnChain: return s == Storage::OnChain;
        case ExecMode::OffChain: return s != Storage::Digest;
        case ExecMode::Tracked: return true;
        }
        return false;
    }

    Node make_task(std::vector<std::string>& pool) {
        Node t;
        t.id = "t" + std::to_string(++tasks);
        t.type = NodeType::Activity;
        t.actor = participant();
        t.exec = random_exec();
        if (opts.with_data) {
            // Reads come from objects certainly written on every path here.
            std::vector<std::string> candidates;
            for (const std::string& d : pool)
                if (readable(d, t.exec)) candidates.push_back(d);
            std::shuffle(candidates.begin(), candidates.end(), rng);
            int reads = pick(3);
            for (int i = 0; i < reads && i < static_cast<int>(candidates.size()); ++i)
                t.read.push_back(candidates[i]);
            std::sort(t.read.begin(), t.read.end());
            if (pick(2) == 0) {
                Storage s = Storage::OffChain;
                if (t.exec == ExecMode::OnChain) s = Storage::OnChain;
                if (t.exec == ExecMode::Tracked) {
                    int r = pick(3);
                    s = r == 0 ? Storage::OnChain : r == 1 ? Storage::Digest : Storage::OffChain;
                }
                std::string d = fresh_object(s);
                t.write.push_back(d);
                pool.push_back(d);
            }
        }
        return t;
    }

    // Appends one block element after `prev`, returns the new tail.
    std::string element(Graph& g, int depth, std::string prev, std::vector<std::string>& pool) {
        int kind = pick(10);
        bool can_nest = depth > 0 && decisions_left > 0;
        if (kind < 2 && can_nest) return xor_block(g, depth, std::move(prev), pool);
        if (kind < 4 && depth > 0) return par_block(g, depth, std::move(prev), pool);
        if (kind < 5 && can_nest && loops_left > 0) return loop_block(g, std::move(prev), pool);
        if (tasks_left <= 0) return prev;
        --tasks_left;
        Node t = make_task(pool);
        std::string id = t.id;
        g.add_node(std::move(t));
        g.add_edge({prev, id, ""});
        return id;
    }

    std::string sequence(Graph& g, int depth, std::string prev, std::vector<std::string>& pool,
                         int min_len = 1) {
        int len = min_len + pick(3 - min_len + 1);
        for (int i = 0; i < len; ++i) prev = element(g, depth, std::move(prev), pool);
        return prev;
    }

    std::string xor_block(Graph& g, int depth, std::string prev, std::vector<std::string>& pool) {
        --decisions_left;
        ++xors;
        std::string c = fresh_decision();
        const std::string br_id = "br:" + c;
        const std::string split_id = "xs" + std::to_string(xors);
        const std::string join_id = "xj" + std::to_string(xors);

        Node br;
        br.id = br_id;
        br.type = NodeType::BusinessRuleTask;
        br.actor = participant();
        br.exec = random_exec();
        br.write = {c};
        Node xs;
        xs.id = split_id;
        xs.type = NodeType::XorSplit;
        xs.actor = gateway_actor();
        xs.condition = c;
        Node xj;
        xj.id = join_id;
        xj.type = NodeType::XorJoin;
        xj.actor = xs.actor;
        g.add_node(std::move(br));
        g.add_node(std::move(xs));
        g.add_node(std::move(xj));
        g.add_edge({prev, br_id, ""});
        g.add_edge({br_id, split_id, ""});

        for (bool val : {true, false}) {
            std::vector<std::string> branch_pool = pool;
            std::string label = val ? c : "!" + c;
            std::string tail = branch_sequence(g, depth - 1, split_id, branch_pool, label);
            g.add_edge({tail, join_id, tail == split_id ? label : ""});
            for (const std::string& d : branch_pool)
                if (std::find(pool.begin(), pool.end(), d) == pool.end()) pool.push_back(d);
        }
        return join_id;
    }

    // Builds a branch whose first edge carries `label`; returns the tail.
    std::string branch_sequence(Graph& g, int depth, const std::string& split,
                                std::vector<std::string>& pool, const std::string& label) {
        if (tasks_left <= 0) return split; // degenerate empty branch
        --tasks_left;
        Node first = make_task(pool);
        std::string tail = first.id;
        g.add_node(std::move(first));
        g.add_edge({split, tail, label});
        int extra = pick(2);
        for (int i = 0; i < extra; ++i) tail = element(g, depth, std::move(tail), pool);
        return tail;
    }

    std::string par_block(Graph& g, int depth, std::string prev, std::vector<std::string>& pool) {
        ++pars;
        Node ps;
        ps.id = "ps" + std::to_string(pars);
        ps.type = NodeType::ParSplit;
        ps.actor = gateway_actor();
        Node pj;
        pj.id = "pj" + std::to_string(pars);
        pj.type = NodeType::ParJoin;
        pj.actor = ps.actor;
        std::string split_id = ps.id, join_id = pj.id;
        g.add_node(std::move(ps));
        g.add_node(std::move(pj));
        g.add_edge({prev, split_id, ""});
        for (int b = 0; b < 2; ++b) {
            std::vector<std::string> branch_pool = pool;
            std::string tail = branch_sequence(g, depth - 1, split_id, branch_pool, "");
            g.add_edge({tail, join_id, ""});
            for (const std::string& d : branch_pool)
                if (std::find(pool.begin(), pool.end(), d) == pool.end()) pool.push_back(d);
        }
        return join_id;
    }

    std::string loop_block(Graph& g, std::string prev, std::vector<std::string>& pool) {
        --decisions_left;
        --loops_left;
        ++loops;
        std::string lc = fresh_decision();
        Node loop;
        loop.id = "loop" + std::to_string(loops);
        loop.type = NodeType::SubProcess;
        loop.actor = gateway_actor();
        loop.loop_condition = lc;
        loop.body = std::make_unique<Graph>();
        Graph& body = *loop.body;

        Node bs, be, br;
        bs.id = loop.id + ":start";
        bs.type = NodeType::Start;
        bs.actor = kChainActor;
        be.id = loop.id + ":end";
        be.type = NodeType::End;
        be.actor = kChainActor;
        br.id = "br" + std::to_string(xors + loops);
        br.type = NodeType::BusinessRuleTask;
        br.actor = participant();
        br.exec = random_exec();
        br.write = {lc};
        std::string br_id = br.id;
        body.add_node(std::move(bs));
        body.add_node(std::move(be));
        body.add_node(std::move(br));

        std::vector<std::string> body_pool = pool;
        std::string tail = sequence(body, 0, loop.id + ":start", body_pool, 1);
        if (tail == loop.id + ":start") {
            // Keep the body non-trivial even when the task budget ran out.
            Node filler;
            filler.id = "t" + std::to_string(++tasks);
            filler.type = NodeType::Activity;
            filler.actor = participant();
            filler.exec = ExecMode::OffChain;
            tail = filler.id;
            body.add_node(std::move(filler));
            body.add_edge({loop.id + ":start", tail, ""});
        }
        body.add_edge({tail, br_id, ""});
        body.add_edge({br_id, loop.id + ":end", ""});
        for (const std::string& d : body_pool)
            if (std::find(pool.begin(), pool.end(), d) == pool.end()) pool.push_back(d);

        std::string id = loop.id;
        g.add_node(std::move(loop));
        g.add_edge({prev, id, ""});
        return id;
    }

    ProcessModel build() {
        model.add_actor(kChainActor);
        for (int i = 1; i <= opts.participants; ++i) model.add_actor("p" + std::to_string(i));

        Node start, end;
        start.id = "start";
        start.type = NodeType::Start;
        start.actor = kChainActor;
        end.id = "end";
        end.type = NodeType::End;
        end.actor = kChainActor;
        model.graph.add_node(std::move(start));
        model.graph.add_node(std::move(end));

        std::vector<std::string> pool;
        std::string tail = sequence(model.graph, opts.max_depth, "start", pool, 2);
        if (tail == "start") {
            Node t;
            t.id = "t" + std::to_string(++tasks);
            t.type = NodeType::Activity;
            t.actor = participant();
            t.exec = ExecMode::OffChain;
            tail = t.id;
            model.graph.add_node(std::move(t));
            model.graph.add_edge({"start", tail, ""});
        }
        model.graph.add_edge({tail, "end", ""});
        return fix_control_flow_actors(model);
    }
};

} // namespace

ProcessModel random_valid_model(const GeneratorOptions& options) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        Generator gen(options, options.seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b9u);
        ProcessModel m = gen.build();
        try {
            if (!validate(m, kDefaultLoopBound, options.max_instances).empty()) continue;
            if (enumerate_instance_types(m, kDefaultLoopBound, options.max_instances).empty())
                continue;
        } catch (const CapacityError&) {
            continue;
        }
        return m;
    }
    throw Error("random model generation failed to produce a valid model for seed " +
                std::to_string(options.seed));
}

} // namespace chaindecomp
