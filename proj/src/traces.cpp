#include "concai/traces.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_set>

namespace concai {

namespace {

std::size_t local_index(const VarTable& vars, VarId v) {
    if (v < vars.n_globals) throw std::logic_error("global used as local");
    return v - vars.n_globals;
}

std::int64_t as_int(const ConcreteVal& v) {
    if (v.index() != 0) throw std::logic_error("thread id used as integer");
    return std::get<0>(v);
}

ConcreteVal written_value(const Cfg& cfg, const Action& act, const ConcreteState& pre) {
    if (act.src.is_lit) return ConcreteVal{act.src.lit};
    return pre.locals[local_index(cfg.vars(), act.src.var)];
}

// ------------------------------------------------------- causality graph

struct Graph {
    std::vector<std::uint32_t> offset;
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> succ, pred;

    Graph(const Cfg& cfg, const LocalTrace& t) {
        const auto& threads = t.threads();
        offset.resize(threads.size());
        for (std::size_t i = 0; i < threads.size(); ++i) {
            offset[i] = static_cast<std::uint32_t>(n);
            n += threads[i].n_nodes();
        }
        succ.resize(n);
        pred.resize(n);
        for (std::size_t i = 0; i < threads.size(); ++i)
            for (std::size_t j = 1; j < threads[i].n_nodes(); ++j)
                link(offset[i] + j - 1, offset[i] + j);
        // create edges: creator node -> child start
        for (std::size_t i = 0; i < threads.size(); ++i) {
            if (threads[i].id.is_root()) continue;
            std::uint32_t k = threads[i].id.path.back();
            ThreadId parent = threads[i].id.parent();
            for (std::size_t pi = 0; pi < threads.size(); ++pi)
                if (threads[pi].id == parent) link(offset[pi] + k - 1, offset[i]);
        }
        (void)cfg;
        for (const auto& chain : t.chains())
            for (const auto& l : chain) link(idx(t, l.from), idx(t, l.to));
    }

    void link(std::uint32_t a, std::uint32_t b) {
        succ[a].push_back(b);
        pred[b].push_back(a);
    }

    std::uint32_t idx(const LocalTrace&, NodeRef r) const {
        return offset[r.thread] + r.index;
    }

    std::vector<bool> reach(std::uint32_t from, bool forward) const {
        std::vector<bool> seen(n, false);
        std::vector<std::uint32_t> stack{from};
        seen[from] = true;
        const auto& adj = forward ? succ : pred;
        while (!stack.empty()) {
            std::uint32_t x = stack.back();
            stack.pop_back();
            for (std::uint32_t y : adj[x])
                if (!seen[y]) {
                    seen[y] = true;
                    stack.push_back(y);
                }
        }
        return seen;
    }

    bool acyclic() const {
        std::vector<std::uint32_t> indeg(n, 0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::uint32_t y : succ[x]) indeg[y]++;
        std::vector<std::uint32_t> stack;
        for (std::size_t x = 0; x < n; ++x)
            if (indeg[x] == 0) stack.push_back(static_cast<std::uint32_t>(x));
        std::size_t seen = 0;
        while (!stack.empty()) {
            std::uint32_t x = stack.back();
            stack.pop_back();
            ++seen;
            for (std::uint32_t y : succ[x])
                if (--indeg[y] == 0) stack.push_back(y);
        }
        return seen == n;
    }
};

std::optional<std::uint32_t> find_thread(const LocalTrace& t, const ThreadId& id) {
    for (std::uint32_t i = 0; i < t.threads().size(); ++i)
        if (t.threads()[i].id == id) return i;
    return std::nullopt;
}

std::optional<std::uint32_t> root_thread(const LocalTrace& t) {
    return find_thread(t, ThreadId{});
}

const Action& edge_action(const Cfg& cfg, EdgeId e) { return cfg.edges[e].act; }

std::vector<WriteEvent> collect_writes(const Cfg& cfg, const LocalTrace& t, VarId g) {
    std::vector<WriteEvent> out;
    for (std::uint32_t i = 0; i < t.threads().size(); ++i) {
        const ThreadTrace& tt = t.threads()[i];
        for (std::uint32_t j = 0; j < tt.steps.size(); ++j) {
            const Action& a = edge_action(cfg, tt.steps[j].edge);
            if (a.kind == Action::Kind::Write && a.g == g)
                out.push_back({NodeRef{i, j + 1}, g, written_value(cfg, a, tt.state_at(j))});
        }
    }
    return out;
}

/// Unique maximal write to g at or below `limit`. nullopt when no write
/// precedes; throws when maximal writes are not unique (cannot happen for
/// atomicity-instrumented programs).
std::optional<WriteEvent> max_write_before(const Cfg& cfg, const LocalTrace& t, VarId g,
                                           NodeRef limit, const Graph& gph) {
    std::vector<WriteEvent> writes = collect_writes(cfg, t, g);
    std::vector<bool> below = gph.reach(gph.idx(t, limit), false);
    std::erase_if(writes, [&](const WriteEvent& w) { return !below[gph.idx(t, w.post)]; });
    if (writes.empty()) return std::nullopt;
    for (const auto& cand : writes) {
        std::vector<bool> anc = gph.reach(gph.idx(t, cand.post), false);
        bool maximal = true;
        for (const auto& other : writes)
            if (!anc[gph.idx(t, other.post)]) {
                maximal = false;
                break;
            }
        if (maximal) return cand; // every other write precedes cand
    }
    throw std::logic_error("ambiguous last write; program not atomicity-instrumented?");
}

// --------------------------------------------------------------- encoding

void encode_state(std::ostringstream& os, const ConcreteState& s) {
    os << "(";
    for (std::size_t i = 0; i < s.locals.size(); ++i) {
        if (i) os << ",";
        os << concrete_val_to_string(s.locals[i]);
    }
    os << ")";
}

std::string encode(const Cfg& cfg, const LocalTrace::Data& d) {
    (void)cfg;
    std::vector<std::uint32_t> order(d.threads.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return d.threads[a].id < d.threads[b].id; });

    std::ostringstream os;
    for (std::uint32_t i : order) {
        const ThreadTrace& t = d.threads[i];
        os << "T" << t.id.to_string() << "@" << t.start;
        encode_state(os, t.init);
        for (const auto& st : t.steps) {
            os << "|e" << st.edge;
            encode_state(os, st.post);
        }
        os << ";";
    }
    auto node_text = [&](NodeRef r) {
        return d.threads[r.thread].id.to_string() + ":" + std::to_string(r.index);
    };
    for (std::size_t m = 0; m < d.chains.size(); ++m) {
        if (d.chains[m].empty()) continue;
        std::vector<std::string> links;
        for (const auto& l : d.chains[m])
            links.push_back(node_text(l.from) + ">" + node_text(l.to));
        std::sort(links.begin(), links.end());
        os << "C" << m << "[";
        for (const auto& s : links) os << s << " ";
        os << "];";
    }
    os << "E" << d.threads[d.ego].id.to_string();
    return os.str();
}

} // namespace

std::string concrete_val_to_string(const ConcreteVal& v) {
    if (v.index() == 0) return std::to_string(std::get<0>(v));
    return "t" + std::get<1>(v).to_string();
}

std::shared_ptr<const LocalTrace> LocalTrace::make(const Cfg& cfg, Data d) {
    std::string key = encode(cfg, d);
    return std::shared_ptr<const LocalTrace>(new LocalTrace(std::move(d), std::move(key)));
}

ConcreteVal eval_concrete(const Program& p, ExprId e, const ConcreteState& sigma,
                          const VarTable& vars) {
    const ExprNode& n = p.exprs.at(e);
    switch (n.kind) {
    case ExprNode::Kind::IntLit: return ConcreteVal{n.lit};
    case ExprNode::Kind::VarRef: return sigma.locals[local_index(vars, n.var)];
    case ExprNode::Kind::Binary: {
        ConcreteVal l = eval_concrete(p, n.lhs, sigma, vars);
        ConcreteVal r = eval_concrete(p, n.rhs, sigma, vars);
        switch (n.op) {
        case BinOp::Add: return ConcreteVal{as_int(l) + as_int(r)};
        case BinOp::Sub: return ConcreteVal{as_int(l) - as_int(r)};
        case BinOp::Mul: return ConcreteVal{as_int(l) * as_int(r)};
        case BinOp::Lt: return ConcreteVal{std::int64_t{as_int(l) < as_int(r)}};
        case BinOp::Le: return ConcreteVal{std::int64_t{as_int(l) <= as_int(r)}};
        case BinOp::Eq: return ConcreteVal{std::int64_t{l == r}};
        case BinOp::Ne: return ConcreteVal{std::int64_t{l != r}};
        }
        break;
    }
    }
    throw std::logic_error("unreachable");
}

TracePtr initial_trace(const Cfg& cfg) {
    const VarTable& vars = cfg.vars();
    ThreadTrace root;
    root.id = ThreadId{};
    root.start = cfg.main_entry();
    root.init.locals.assign(vars.size() - vars.n_globals, ConcreteVal{std::int64_t{0}});
    root.init.locals[local_index(vars, vars.self)] = ConcreteVal{ThreadId{}};
    LocalTrace::Data d;
    d.threads.push_back(std::move(root));
    d.chains.resize(cfg.n_mutexes());
    d.ego = 0;
    return LocalTrace::make(cfg, std::move(d));
}

// --------------------------------------------------------------- validate

std::optional<std::string> validate_trace(const Cfg& cfg, const TraceConfig& conf,
                                          const LocalTrace& t) {
    const VarTable& vars = cfg.vars();
    const auto& threads = t.threads();
    if (threads.empty()) return "no threads";
    if (t.chains().size() != cfg.n_mutexes()) return "bad chain arity";

    // unique ids, root present
    for (std::size_t i = 0; i < threads.size(); ++i)
        for (std::size_t j = i + 1; j < threads.size(); ++j)
            if (threads[i].id == threads[j].id) return "duplicate thread id";
    auto root = root_thread(t);
    if (!root) return "no root thread";
    if (threads[*root].start != cfg.main_entry()) return "root does not start at main";
    for (std::size_t l = 0; l < threads[*root].init.locals.size(); ++l) {
        const ConcreteVal& v = threads[*root].init.locals[l];
        if (l == local_index(vars, vars.self)) {
            if (v != ConcreteVal{ThreadId{}}) return "root self mismatch";
        } else if (v != ConcreteVal{std::int64_t{0}}) {
            return "initial locals must be zero";
        }
    }

    // per-thread replay of program order
    for (const auto& tt : threads) {
        if (tt.init.locals.size() != vars.size() - vars.n_globals) return "bad state arity";
        if (tt.init.locals[local_index(vars, vars.self)] != ConcreteVal{tt.id})
            return "self does not hold the thread id";
        if (tt.steps.size() > conf.max_events_per_thread) return "thread exceeds event bound";
        PointId at = tt.start;
        LockSet held;
        for (std::size_t j = 0; j < tt.steps.size(); ++j) {
            const TraceStep& st = tt.steps[j];
            if (st.edge >= cfg.edges.size()) return "bad edge id";
            const CfgEdge& e = cfg.edges[st.edge];
            if (e.src != at) return "edge does not continue the thread";
            at = e.dst;
            const ConcreteState& pre = tt.state_at(j);
            const ConcreteState& post = st.post;
            ConcreteState expect = pre;
            switch (e.act.kind) {
            case Action::Kind::Guard: {
                ConcreteVal v = eval_concrete(*cfg.program, e.act.expr, pre, vars);
                if ((as_int(v) != 0) != e.act.polarity) return "failed guard replay";
                break;
            }
            case Action::Kind::Assign:
                expect.locals[local_index(vars, e.act.x)] =
                    eval_concrete(*cfg.program, e.act.expr, pre, vars);
                break;
            case Action::Kind::Input: {
                const ConcreteVal& v = post.locals[local_index(vars, e.act.x)];
                if (v.index() != 0 ||
                    std::find(conf.input_values.begin(), conf.input_values.end(),
                              std::get<0>(v)) == conf.input_values.end())
                    return "input value outside the configured set";
                expect.locals[local_index(vars, e.act.x)] = v;
                break;
            }
            case Action::Kind::Create: {
                ThreadId child = tt.id.child(static_cast<std::uint32_t>(j + 1));
                expect.locals[local_index(vars, e.act.x)] = ConcreteVal{child};
                break;
            }
            case Action::Kind::Lock:
                if (held.contains(e.act.m)) return "re-entrant lock";
                held = held.with(e.act.m);
                break;
            case Action::Kind::Unlock:
                if (!held.contains(e.act.m)) return "unlock without holding";
                held = held.without(e.act.m);
                break;
            case Action::Kind::Write: break;
            case Action::Kind::Read:
                // value checked against causality below
                expect.locals[local_index(vars, e.act.x)] =
                    post.locals[local_index(vars, e.act.x)];
                break;
            }
            if (post != expect) return "state replay mismatch";
        }
    }

    // create order
    for (std::uint32_t i = 0; i < threads.size(); ++i) {
        const ThreadTrace& tt = threads[i];
        if (tt.id.is_root()) continue;
        std::uint32_t k = tt.id.path.back();
        if (k == 0) return "bad creation index";
        auto parent = find_thread(t, tt.id.parent());
        if (!parent) return "creator thread missing";
        const ThreadTrace& pt = threads[*parent];
        if (pt.steps.size() < k - 1) return "creator node missing";
        const ConcreteState& creator_state = pt.state_at(k - 1);
        ConcreteState expect = creator_state;
        expect.locals[local_index(vars, vars.self)] = ConcreteVal{tt.id};
        if (tt.init != expect) return "created thread disagrees with creator locals";
        // the creator's point must offer a create edge to this entry
        PointId cp = t.point_of(cfg, NodeRef{*parent, k - 1});
        bool edge_ok = false;
        for (EdgeId eid : cfg.out_edges[cp]) {
            const Action& a = cfg.edges[eid].act;
            if (a.kind == Action::Kind::Create && a.entry == tt.start) edge_ok = true;
        }
        if (!edge_ok) return "no create edge at the creator node";
        if (pt.steps.size() >= k) {
            const Action& a = edge_action(cfg, pt.steps[k - 1].edge);
            if (a.kind != Action::Kind::Create || a.entry != tt.start)
                return "creator event is not the matching create";
            if (pt.state_at(k).locals[local_index(vars, a.x)] != ConcreteVal{tt.id})
                return "creator did not receive the child id";
        }
    }

    // locking order cardinalities
    for (MutexId m = 0; m < t.chains().size(); ++m) {
        const auto& chain = t.chains()[m];
        std::vector<NodeRef> froms, tos;
        for (const auto& l : chain) {
            const ThreadTrace& ft = threads[l.from.thread];
            const ThreadTrace& tt2 = threads[l.to.thread];
            if (l.from.index >= ft.n_nodes() || l.to.index >= tt2.n_nodes())
                return "chain link out of range";
            bool from_initial = ft.id.is_root() && l.from.index == 0;
            if (!from_initial) {
                if (l.from.index == 0) return "chain source is not an unlock";
                const Action& a = edge_action(cfg, ft.steps[l.from.index - 1].edge);
                if (a.kind != Action::Kind::Unlock || a.m != m)
                    return "chain source is not an unlock of the mutex";
            }
            if (l.to.index == 0) return "chain target is not a lock";
            const Action& a = edge_action(cfg, tt2.steps[l.to.index - 1].edge);
            if (a.kind != Action::Kind::Lock || a.m != m)
                return "chain target is not a lock of the mutex";
            froms.push_back(l.from);
            tos.push_back(l.to);
        }
        auto ref_less = [](const NodeRef& a, const NodeRef& b) {
            return std::tie(a.thread, a.index) < std::tie(b.thread, b.index);
        };
        std::sort(froms.begin(), froms.end(), ref_less);
        if (std::adjacent_find(froms.begin(), froms.end()) != froms.end())
            return "unlock followed by more than one lock";
        std::sort(tos.begin(), tos.end(), ref_less);
        if (std::adjacent_find(tos.begin(), tos.end()) != tos.end())
            return "lock preceded by more than one unlock";
        // every lock node of the trace is covered by exactly one link
        std::size_t lock_nodes = 0;
        for (const auto& tt2 : threads)
            for (const auto& st : tt2.steps) {
                const Action& a = edge_action(cfg, st.edge);
                if (a.kind == Action::Kind::Lock && a.m == m) ++lock_nodes;
            }
        if (lock_nodes != tos.size()) return "lock without a preceding unlock link";
    }

    // causality: acyclic, rooted, single sink
    Graph gph(cfg, t);
    if (!gph.acyclic()) return "causality cycle";
    NodeRef rootref{*root, 0};
    auto from_root = gph.reach(gph.idx(t, rootref), true);
    if (std::find(from_root.begin(), from_root.end(), false) != from_root.end())
        return "no unique least element";
    auto to_sink = gph.reach(gph.idx(t, t.sink()), false);
    if (std::find(to_sink.begin(), to_sink.end(), false) != to_sink.end())
        return "sink is not the unique maximal element";

    // globals consistency: reads observe the unique maximal preceding write
    for (std::uint32_t i = 0; i < threads.size(); ++i) {
        const ThreadTrace& tt = threads[i];
        for (std::uint32_t j = 0; j < tt.steps.size(); ++j) {
            const Action& a = edge_action(cfg, tt.steps[j].edge);
            if (a.kind != Action::Kind::Read) continue;
            std::optional<WriteEvent> w;
            try {
                w = max_write_before(cfg, t, a.g, NodeRef{i, j}, gph);
            } catch (const std::logic_error&) {
                return "ambiguous maximal write";
            }
            if (!w) return "read with no preceding write";
            if (tt.state_at(j + 1).locals[local_index(vars, a.x)] != w->value)
                return "read value is not the last written value";
        }
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ steps

namespace {

TracePtr extend_ego(const Cfg& cfg, const LocalTrace& t, EdgeId e, ConcreteState post) {
    LocalTrace::Data d{t.threads(), t.chains(), t.ego_index()};
    d.threads[d.ego].steps.push_back({e, std::move(post)});
    return LocalTrace::make(cfg, std::move(d));
}

void require_valid(const Cfg& cfg, const TraceConfig& conf, const TracePtr& t,
                   const char* op) {
    if (auto err = validate_trace(cfg, conf, *t))
        throw std::logic_error(std::string(op) + " produced an invalid trace: " + *err);
}

} // namespace

std::vector<TracePtr> step_unary(const Cfg& cfg, const TraceConfig& conf, EdgeId e,
                                 const TracePtr& t) {
    const CfgEdge& edge = cfg.edges[e];
    if (t->loc(cfg) != edge.src) throw std::logic_error("step_unary at the wrong point");
    if (t->ego().steps.size() + 1 > conf.max_events_per_thread) return {};
    const VarTable& vars = cfg.vars();
    const ConcreteState& sigma = t->sink_state();
    std::vector<TracePtr> out;

    switch (edge.act.kind) {
    case Action::Kind::Guard: {
        ConcreteVal v = eval_concrete(*cfg.program, edge.act.expr, sigma, vars);
        if ((as_int(v) != 0) != edge.act.polarity) return {};
        out.push_back(extend_ego(cfg, *t, e, sigma));
        break;
    }
    case Action::Kind::Assign: {
        ConcreteState post = sigma;
        post.locals[local_index(vars, edge.act.x)] =
            eval_concrete(*cfg.program, edge.act.expr, sigma, vars);
        out.push_back(extend_ego(cfg, *t, e, std::move(post)));
        break;
    }
    case Action::Kind::Input:
        for (std::int64_t v : conf.input_values) {
            ConcreteState post = sigma;
            post.locals[local_index(vars, edge.act.x)] = ConcreteVal{v};
            out.push_back(extend_ego(cfg, *t, e, std::move(post)));
        }
        break;
    case Action::Kind::Write:
        out.push_back(extend_ego(cfg, *t, e, sigma));
        break;
    case Action::Kind::Read: {
        Graph gph(cfg, *t);
        auto w = max_write_before(cfg, *t, edge.act.g, t->sink(), gph);
        if (!w) return {}; // no preceding write: the read is undefined here
        ConcreteState post = sigma;
        post.locals[local_index(vars, edge.act.x)] = w->value;
        out.push_back(extend_ego(cfg, *t, e, std::move(post)));
        break;
    }
    case Action::Kind::Unlock: {
        if (!lockset_at(cfg, *t, t->sink()).contains(edge.act.m)) return {};
        out.push_back(extend_ego(cfg, *t, e, sigma));
        break;
    }
    case Action::Kind::Lock:
    case Action::Kind::Create: throw std::logic_error("wrong step operation for this edge");
    }
    for (const auto& r : out) require_valid(cfg, conf, r, "step_unary");
    return out;
}

CreateResult step_create(const Cfg& cfg, const TraceConfig& conf, EdgeId e,
                         const TracePtr& t) {
    const CfgEdge& edge = cfg.edges[e];
    if (t->loc(cfg) != edge.src) throw std::logic_error("step_create at the wrong point");
    if (edge.act.kind != Action::Kind::Create)
        throw std::logic_error("step_create on a non-create edge");
    CreateResult result;
    const VarTable& vars = cfg.vars();
    std::uint32_t k = static_cast<std::uint32_t>(t->ego().steps.size() + 1);
    ThreadId child = t->id().child(k);

    if (t->ego().steps.size() + 1 <= conf.max_events_per_thread) {
        ConcreteState post = t->sink_state();
        post.locals[local_index(vars, edge.act.x)] = ConcreteVal{child};
        result.extended.push_back(extend_ego(cfg, *t, e, std::move(post)));
    }

    ThreadTrace spawned;
    spawned.id = child;
    spawned.start = edge.act.entry;
    spawned.init = t->sink_state();
    spawned.init.locals[local_index(vars, vars.self)] = ConcreteVal{child};
    LocalTrace::Data d{t->threads(), t->chains(), 0};
    d.threads.push_back(std::move(spawned));
    d.ego = static_cast<std::uint32_t>(d.threads.size() - 1);
    result.spawned.push_back(LocalTrace::make(cfg, std::move(d)));

    for (const auto& r : result.extended) require_valid(cfg, conf, r, "step_create");
    for (const auto& r : result.spawned) require_valid(cfg, conf, r, "step_create");
    return result;
}

std::vector<TracePtr> step_lock(const Cfg& cfg, const TraceConfig& conf, EdgeId e,
                                const TracePtr& t0, const TracePtr& t1) {
    const CfgEdge& edge = cfg.edges[e];
    if (t0->loc(cfg) != edge.src) throw std::logic_error("step_lock at the wrong point");
    if (edge.act.kind != Action::Kind::Lock)
        throw std::logic_error("step_lock on a non-lock edge");
    MutexId a = edge.act.m;

    // side condition: partner is initial or just released this mutex
    if (!t1->is_initial()) {
        auto last = t1->last_edge();
        if (!last) return {};
        const Action& act = edge_action(cfg, *last);
        if (act.kind != Action::Kind::Unlock || act.m != a) return {};
    }
    if (t0->ego().steps.size() + 1 > conf.max_events_per_thread) return {};
    if (lockset_at(cfg, *t0, t0->sink()).contains(a)) return {}; // not re-entrant

    // merge thread-wise: common threads must agree on a prefix
    std::vector<ThreadTrace> merged;
    for (const auto& tt : t0->threads()) merged.push_back(tt);
    for (const auto& tt : t1->threads()) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const ThreadTrace& m) { return m.id == tt.id; });
        if (it == merged.end()) {
            merged.push_back(tt);
            continue;
        }
        if (it->start != tt.start || it->init != tt.init) return {};
        const auto& shorter = it->steps.size() <= tt.steps.size() ? it->steps : tt.steps;
        const auto& longer = it->steps.size() <= tt.steps.size() ? tt.steps : it->steps;
        if (!std::equal(shorter.begin(), shorter.end(), longer.begin())) return {};
        if (tt.steps.size() > it->steps.size()) it->steps = tt.steps;
    }

    auto merged_index = [&](const ThreadId& id) -> std::uint32_t {
        for (std::uint32_t i = 0; i < merged.size(); ++i)
            if (merged[i].id == id) return i;
        throw std::logic_error("merge lost a thread");
    };

    // the partner may not extend the ego thread beyond t0's sink
    std::uint32_t ego = merged_index(t0->id());
    if (merged[ego].steps.size() != t0->ego().steps.size()) return {};

    // chains: union of both relations, remapped to merged thread indices
    std::vector<std::vector<ChainLink>> chains(cfg.n_mutexes());
    auto add_links = [&](const LocalTrace& src) {
        for (MutexId m = 0; m < src.chains().size(); ++m)
            for (const auto& l : src.chains()[m]) {
                ChainLink nl{{merged_index(src.threads()[l.from.thread].id), l.from.index},
                             {merged_index(src.threads()[l.to.thread].id), l.to.index}};
                auto& chain = chains[m];
                if (std::find(chain.begin(), chain.end(), nl) == chain.end())
                    chain.push_back(nl);
            }
    };
    add_links(*t0);
    add_links(*t1);

    NodeRef from = t1->is_initial()
                       ? NodeRef{merged_index(ThreadId{}), 0}
                       : NodeRef{merged_index(t1->id()),
                                 static_cast<std::uint32_t>(t1->ego().steps.size())};
    for (const auto& l : chains[a])
        if (l.from == from) return {}; // this release was already consumed

    LocalTrace::Data d{std::move(merged), std::move(chains), ego};
    NodeRef to{ego, static_cast<std::uint32_t>(d.threads[ego].steps.size() + 1)};
    d.chains[a].push_back({from, to});
    d.threads[ego].steps.push_back({e, t0->sink_state()});

    TracePtr candidate = LocalTrace::make(cfg, std::move(d));
    if (validate_trace(cfg, conf, *candidate)) return {}; // incompatible merge
    return {candidate};
}

// ------------------------------------------------------------ enumeration

std::vector<TracePtr> enumerate_global(const Cfg& cfg, const TraceConfig& conf) {
    std::vector<TracePtr> all;
    std::unordered_set<std::string> seen;
    std::vector<std::size_t> worklist;

    std::vector<std::vector<std::size_t>> by_loc(cfg.points.size());
    std::vector<std::vector<std::size_t>> unlockers(cfg.n_mutexes());
    std::vector<std::size_t> initials;

    auto add = [&](const TracePtr& t) {
        if (!seen.insert(t->key()).second) return;
        if (all.size() >= conf.max_traces)
            throw TraceBudgetExceeded("trace budget exceeded at " +
                                      std::to_string(conf.max_traces));
        std::size_t idx = all.size();
        all.push_back(t);
        by_loc[t->loc(cfg)].push_back(idx);
        if (t->is_initial()) initials.push_back(idx);
        if (auto last = t->last_edge()) {
            const Action& a = edge_action(cfg, *last);
            if (a.kind == Action::Kind::Unlock) unlockers[a.m].push_back(idx);
        }
        worklist.push_back(idx);
    };

    add(initial_trace(cfg));

    while (!worklist.empty()) {
        std::size_t idx = worklist.back();
        worklist.pop_back();
        TracePtr t = all[idx];

        // forward: apply every outgoing edge
        for (EdgeId eid : cfg.out_edges[t->loc(cfg)]) {
            const Action& act = cfg.edges[eid].act;
            switch (act.kind) {
            case Action::Kind::Create: {
                CreateResult r = step_create(cfg, conf, eid, t);
                for (const auto& x : r.extended) add(x);
                for (const auto& x : r.spawned) add(x);
                break;
            }
            case Action::Kind::Lock: {
                std::vector<std::size_t> partners = initials;
                partners.insert(partners.end(), unlockers[act.m].begin(),
                                unlockers[act.m].end());
                for (std::size_t p : partners)
                    for (const auto& x : step_lock(cfg, conf, eid, t, all[p])) add(x);
                break;
            }
            default:
                for (const auto& x : step_unary(cfg, conf, eid, t)) add(x);
            }
        }

        // backward: this trace may be a lock partner for existing traces
        std::optional<MutexId> releases;
        if (t->is_initial()) {
            // initial traces partner every mutex's first lock
        } else if (auto last = t->last_edge()) {
            const Action& a = edge_action(cfg, *last);
            if (a.kind == Action::Kind::Unlock) releases = a.m;
        }
        if (t->is_initial() || releases) {
            for (EdgeId eid = 0; eid < cfg.edges.size(); ++eid) {
                const Action& act = cfg.edges[eid].act;
                if (act.kind != Action::Kind::Lock) continue;
                if (releases && act.m != *releases) continue;
                std::vector<std::size_t> holders = by_loc[cfg.edges[eid].src];
                for (std::size_t h : holders)
                    for (const auto& x : step_lock(cfg, conf, eid, all[h], t)) add(x);
            }
        }
    }
    return all;
}

TracePtr prefix_at(const Cfg& cfg, const LocalTrace& t, NodeRef n) {
    Graph gph(cfg, t);
    std::vector<bool> below = gph.reach(gph.idx(t, n), false);
    LocalTrace::Data d;
    std::vector<std::int32_t> remap(t.threads().size(), -1);
    for (std::uint32_t i = 0; i < t.threads().size(); ++i) {
        std::size_t keep = 0;
        const ThreadTrace& tt = t.threads()[i];
        for (std::size_t j = 0; j < tt.n_nodes(); ++j)
            if (below[gph.idx(t, NodeRef{i, static_cast<std::uint32_t>(j)})]) keep = j + 1;
        if (keep == 0) continue;
        ThreadTrace cut = tt;
        cut.steps.resize(keep - 1);
        remap[i] = static_cast<std::int32_t>(d.threads.size());
        d.threads.push_back(std::move(cut));
    }
    d.chains.resize(cfg.n_mutexes());
    for (MutexId m = 0; m < t.chains().size(); ++m)
        for (const auto& l : t.chains()[m]) {
            if (!below[gph.idx(t, l.from)] || !below[gph.idx(t, l.to)]) continue;
            d.chains[m].push_back({{static_cast<std::uint32_t>(remap[l.from.thread]), l.from.index},
                                   {static_cast<std::uint32_t>(remap[l.to.thread]), l.to.index}});
        }
    d.ego = static_cast<std::uint32_t>(remap[n.thread]);
    return LocalTrace::make(cfg, std::move(d));
}

// ---------------------------------------------------------------- queries

LockSet lockset_at(const Cfg& cfg, const LocalTrace& t, NodeRef n) {
    const ThreadTrace& tt = t.threads()[n.thread];
    LockSet held;
    for (std::uint32_t j = 0; j < n.index; ++j) {
        const Action& a = edge_action(cfg, tt.steps[j].edge);
        if (a.kind == Action::Kind::Lock) held = held.with(a.m);
        if (a.kind == Action::Kind::Unlock) held = held.without(a.m);
    }
    return held;
}

TraceQueries trace_queries(const Cfg& cfg, const LocalTrace& t) {
    TraceQueries q;
    q.last_write.resize(cfg.n_globals());
    q.last_tl_write.resize(cfg.n_globals());
    q.last_tl_lock.resize(cfg.n_mutexes());

    Graph gph(cfg, t);
    for (VarId g = 0; g < cfg.n_globals(); ++g)
        q.last_write[g] = max_write_before(cfg, t, g, t.sink(), gph);

    const ThreadTrace& ego = t.ego();
    for (std::uint32_t j = 0; j < ego.steps.size(); ++j) {
        const Action& a = edge_action(cfg, ego.steps[j].edge);
        if (a.kind == Action::Kind::Write)
            q.last_tl_write[a.g] = WriteEvent{NodeRef{t.ego_index(), j + 1}, a.g,
                                              written_value(cfg, a, ego.state_at(j))};
        if (a.kind == Action::Kind::Lock)
            q.last_tl_lock[a.m] = NodeRef{t.ego_index(), j}; // node before the lock
    }
    q.sink_lockset = lockset_at(cfg, t, t.sink());
    return q;
}

MinAntichain min_lockset_since(const Cfg& cfg, const LocalTrace& t, NodeRef n) {
    if (n.thread != t.ego_index())
        throw std::invalid_argument("min_lockset_since: node not on the ego thread");
    MinAntichain f;
    LockSet held = lockset_at(cfg, t, n);
    f = ac_insert(std::move(f), held);
    const ThreadTrace& ego = t.ego();
    for (std::uint32_t j = n.index; j < ego.steps.size(); ++j) {
        const Action& a = edge_action(cfg, ego.steps[j].edge);
        if (a.kind == Action::Kind::Lock) held = held.with(a.m);
        if (a.kind == Action::Kind::Unlock) held = held.without(a.m);
        f = ac_insert(std::move(f), held);
    }
    return f;
}

std::vector<ConcreteVal> eval_last_tl_writes(const Cfg& cfg, VarId g,
                                             const std::vector<TracePtr>& traces) {
    std::vector<ConcreteVal> out;
    for (const auto& t : traces) {
        TraceQueries q = trace_queries(cfg, *t);
        if (q.last_tl_write[g]) out.push_back(q.last_tl_write[g]->value);
    }
    return out;
}

BetaLock beta_lock(const Cfg& cfg, const LocalTrace& t) {
    TraceQueries q = trace_queries(cfg, t);
    BetaLock b;
    b.written_since_lock.resize(cfg.n_mutexes());
    b.lock_background.resize(cfg.n_mutexes());
    for (MutexId a = 0; a < cfg.n_mutexes(); ++a) {
        if (q.last_tl_lock[a]) {
            NodeRef pre = *q.last_tl_lock[a];
            b.lock_background[a] = lockset_at(cfg, t, pre);
            for (VarId g = 0; g < cfg.n_globals(); ++g)
                if (q.last_tl_write[g] && q.last_tl_write[g]->post.index >= pre.index + 1)
                    b.written_since_lock[a] = b.written_since_lock[a].with(g);
        } else {
            for (VarId g = 0; g < cfg.n_globals(); ++g)
                if (q.last_tl_write[g])
                    b.written_since_lock[a] = b.written_since_lock[a].with(g);
        }
    }
    const VarTable& vars = cfg.vars();
    b.sigma.resize(vars.size());
    for (VarId v = 0; v < vars.size(); ++v) {
        if (vars.is_global(v)) {
            if (q.last_tl_write[v]) b.sigma[v] = q.last_tl_write[v]->value;
        } else {
            b.sigma[v] = t.sink_state().locals[v - vars.n_globals];
        }
    }
    return b;
}

BetaWrite beta_write(const Cfg& cfg, const LocalTrace& t) {
    TraceQueries q = trace_queries(cfg, t);
    BetaWrite b;
    b.write_locks.resize(cfg.n_globals());
    b.since_write.resize(cfg.n_globals());
    for (VarId g = 0; g < cfg.n_globals(); ++g) {
        if (q.last_tl_write[g]) {
            NodeRef post = q.last_tl_write[g]->post;
            b.write_locks[g] = lockset_at(cfg, t, post);
            b.since_write[g] = min_lockset_since(cfg, t, post);
        } else {
            b.since_write[g] = MinAntichain::all();
        }
    }
    const VarTable& vars = cfg.vars();
    b.sigma.resize(vars.size());
    for (VarId v = 0; v < vars.size(); ++v) {
        if (vars.is_global(v)) {
            if (q.last_tl_write[v]) b.sigma[v] = q.last_tl_write[v]->value;
        } else {
            b.sigma[v] = t.sink_state().locals[v - vars.n_globals];
        }
    }
    return b;
}

// -------------------------------------------------------------------- dot

std::string LocalTrace::to_dot(const Cfg& cfg) const {
    std::ostringstream os;
    os << "digraph trace {\n  rankdir=LR;\n  node [shape=circle, fontsize=9];\n";
    for (std::uint32_t i = 0; i < d_.threads.size(); ++i) {
        const ThreadTrace& t = d_.threads[i];
        os << "  subgraph cluster_" << i << " {\n    label=\"thread " << t.id.to_string()
           << "\";\n    style=dashed;\n";
        for (std::size_t j = 0; j < t.n_nodes(); ++j) {
            NodeRef r{i, static_cast<std::uint32_t>(j)};
            os << "    n" << i << "_" << j << " [label=\""
               << cfg.point_name(point_of(cfg, r)) << "\"";
            if (r == sink()) os << ", peripheries=2";
            os << "];\n";
        }
        os << "  }\n";
        for (std::size_t j = 0; j < t.steps.size(); ++j)
            os << "  n" << i << "_" << j << " -> n" << i << "_" << j + 1 << " [label=\""
               << cfg.action_text(edge_action(cfg, t.steps[j].edge)) << "\"];\n";
    }
    for (std::uint32_t i = 0; i < d_.threads.size(); ++i) {
        const ThreadTrace& t = d_.threads[i];
        if (t.id.is_root()) continue;
        auto parent = find_thread(*this, t.id.parent());
        if (parent)
            os << "  n" << *parent << "_" << t.id.path.back() - 1 << " -> n" << i
               << "_0 [color=blue, style=dashed, label=\"c\"];\n";
    }
    for (MutexId m = 0; m < d_.chains.size(); ++m)
        for (const auto& l : d_.chains[m])
            os << "  n" << l.from.thread << "_" << l.from.index << " -> n" << l.to.thread
               << "_" << l.to.index << " [color=red, constraint=false, label=\""
               << cfg.mutex_names[m] << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace concai
