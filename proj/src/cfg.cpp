#include "concai/cfg.hpp"

#include <sstream>

namespace concai {

namespace {

class CfgBuilder {
public:
    CfgBuilder(std::shared_ptr<const Program> p, ExprId true_expr)
        : true_expr_(true_expr) {
        cfg_.program = std::move(p);
    }

    Cfg run() {
        const Program& p = *cfg_.program;
        cfg_.mutex_names = p.mutex_names;
        cfg_.n_user_mutexes = p.mutex_names.size() - p.n_globals();
        cfg_.thread_entry.resize(p.threads.size());
        for (std::size_t t = 0; t < p.threads.size(); ++t)
            cfg_.thread_entry[t] = new_point(static_cast<std::uint32_t>(t), p.threads[t].loc);
        for (std::size_t t = 0; t < p.threads.size(); ++t) {
            thread_ = static_cast<std::uint32_t>(t);
            PointId exit = lower(p.threads[t].body, cfg_.thread_entry[t]);
            (void)exit; // thread end point has no outgoing edges
        }
        cfg_.out_edges.resize(cfg_.points.size());
        for (EdgeId e = 0; e < cfg_.edges.size(); ++e)
            cfg_.out_edges[cfg_.edges[e].src].push_back(e);
        return std::move(cfg_);
    }

private:
    PointId new_point(std::uint32_t thread, SourceLoc loc) {
        cfg_.points.push_back({thread, loc});
        return static_cast<PointId>(cfg_.points.size() - 1);
    }

    void add_edge(PointId src, PointId dst, Action act, SourceLoc loc) {
        cfg_.edges.push_back({src, dst, std::move(act), loc});
    }

    PointId lower(const std::vector<Stmt>& body, PointId at) {
        for (const auto& s : body) at = lower_stmt(s, at);
        return at;
    }

    PointId lower_stmt(const Stmt& s, PointId at) {
        switch (s.kind) {
        case Stmt::Kind::Assign: {
            Action a;
            a.kind = Action::Kind::Assign;
            a.x = s.var;
            a.expr = s.expr;
            return chain(at, std::move(a), s.loc);
        }
        case Stmt::Kind::Input: {
            Action a;
            a.kind = Action::Kind::Input;
            a.x = s.var;
            return chain(at, std::move(a), s.loc);
        }
        case Stmt::Kind::Create: {
            Action a;
            a.kind = Action::Kind::Create;
            a.x = s.var;
            a.thread = s.thread;
            a.entry = cfg_.thread_entry[s.thread];
            return chain(at, std::move(a), s.loc);
        }
        case Stmt::Kind::Lock:
        case Stmt::Kind::Unlock: {
            Action a;
            a.kind = s.kind == Stmt::Kind::Lock ? Action::Kind::Lock : Action::Kind::Unlock;
            a.m = s.mutex;
            a.synthetic = s.synthetic;
            return chain(at, std::move(a), s.loc);
        }
        case Stmt::Kind::Write: {
            Action a;
            a.kind = Action::Kind::Write;
            a.g = s.var;
            a.src = s.src;
            return chain(at, std::move(a), s.loc);
        }
        case Stmt::Kind::Read: {
            Action a;
            a.kind = Action::Kind::Read;
            a.x = s.var;
            a.g = s.var2;
            return chain(at, std::move(a), s.loc);
        }
        case Stmt::Kind::If: {
            PointId join = new_point(thread_, s.loc);
            PointId then_entry = new_point(thread_, s.loc);
            add_edge(at, then_entry, guard(s.expr, true), s.loc);
            PointId then_exit = lower(s.body, then_entry);
            add_edge(then_exit, join, jump(), s.loc);
            if (s.else_body.empty()) {
                add_edge(at, join, guard(s.expr, false), s.loc);
            } else {
                PointId else_entry = new_point(thread_, s.loc);
                add_edge(at, else_entry, guard(s.expr, false), s.loc);
                PointId else_exit = lower(s.else_body, else_entry);
                add_edge(else_exit, join, jump(), s.loc);
            }
            return join;
        }
        case Stmt::Kind::While: {
            if (at == cfg_.thread_entry[thread_])
                throw ParseError(s.loc,
                                 "a loop may not start a thread body; "
                                 "insert a statement before it");
            PointId exit = new_point(thread_, s.loc);
            PointId body_entry = new_point(thread_, s.loc);
            add_edge(at, body_entry, guard(s.expr, true), s.loc);
            add_edge(at, exit, guard(s.expr, false), s.loc);
            PointId body_exit = lower(s.body, body_entry);
            add_edge(body_exit, at, jump(), s.loc);
            return exit;
        }
        }
        throw std::logic_error("unreachable");
    }

    PointId chain(PointId at, Action a, SourceLoc loc) {
        PointId next = new_point(thread_, loc);
        add_edge(at, next, std::move(a), loc);
        return next;
    }

    Action guard(ExprId e, bool polarity) {
        Action a;
        a.kind = Action::Kind::Guard;
        a.expr = e;
        a.polarity = polarity;
        return a;
    }

    // Unconditional block exits become always-true guards.
    Action jump() { return guard(true_expr_, true); }

    Cfg cfg_;
    std::uint32_t thread_ = 0;
    ExprId true_expr_;
};

} // namespace

Cfg build_cfg(Program p) {
    if (!p.instrumented)
        throw std::logic_error("build_cfg expects an instrumented program");
    ExprNode one;
    one.kind = ExprNode::Kind::IntLit;
    one.lit = 1;
    ExprId true_expr = p.exprs.add(one);
    auto shared = std::make_shared<const Program>(std::move(p));
    return CfgBuilder(std::move(shared), true_expr).run();
}

std::optional<LockSet> lockset_after(const Action& a, LockSet held) {
    switch (a.kind) {
    case Action::Kind::Lock:
        if (held.contains(a.m)) return std::nullopt; // not re-entrant
        return held.with(a.m);
    case Action::Kind::Unlock:
        if (!held.contains(a.m)) return std::nullopt; // only held locks can be released
        return held.without(a.m);
    default: return held;
    }
}

bool LocksetInfo::reachable(PointId u, LockSet s) const {
    const auto& v = at_point.at(u);
    return std::find(v.begin(), v.end(), s) != v.end();
}

LocksetInfo reachable_locksets(const Cfg& c) {
    LocksetInfo info;
    info.at_point.resize(c.points.size());
    info.protecting.assign(c.n_globals(), LockSet::full(c.n_mutexes()));

    std::vector<std::pair<PointId, LockSet>> work;
    auto visit = [&](PointId u, LockSet s) {
        auto& sets = info.at_point[u];
        if (std::find(sets.begin(), sets.end(), s) != sets.end()) return;
        sets.insert(std::upper_bound(sets.begin(), sets.end(), s), s);
        work.emplace_back(u, s);
    };
    visit(c.main_entry(), LockSet{});

    while (!work.empty()) {
        auto [u, s] = work.back();
        work.pop_back();
        for (EdgeId eid : c.out_edges[u]) {
            const CfgEdge& e = c.edges[eid];
            auto next = lockset_after(e.act, s);
            if (!next) {
                info.dead.emplace_back(eid, s);
                continue;
            }
            if (e.act.kind == Action::Kind::Write)
                info.protecting[e.act.g] = info.protecting[e.act.g].intersect(s);
            if (e.act.kind == Action::Kind::Create) visit(e.act.entry, LockSet{});
            visit(e.dst, *next);
        }
    }
    std::sort(info.dead.begin(), info.dead.end());
    info.dead.erase(std::unique(info.dead.begin(), info.dead.end()), info.dead.end());
    return info;
}

std::string Cfg::action_text(const Action& a) const {
    const VarTable& v = vars();
    switch (a.kind) {
    case Action::Kind::Guard: {
        std::string cond;
        const ExprNode& n = program->exprs.at(a.expr);
        if (n.kind == ExprNode::Kind::IntLit)
            cond = std::to_string(n.lit);
        else if (n.kind == ExprNode::Kind::VarRef)
            cond = v.name(n.var);
        else
            cond = "(...)";
        return std::string(a.polarity ? "" : "!") + "guard " + cond;
    }
    case Action::Kind::Assign: return v.name(a.x) + " = <expr>";
    case Action::Kind::Input: return v.name(a.x) + " = input()";
    case Action::Kind::Create:
        return v.name(a.x) + " = create(" + program->threads[a.thread].name + ")";
    case Action::Kind::Lock: return "lock(" + mutex_names[a.m] + ")";
    case Action::Kind::Unlock: return "unlock(" + mutex_names[a.m] + ")";
    case Action::Kind::Write:
        return v.name(a.g) + " = " +
               (a.src.is_lit ? std::to_string(a.src.lit) : v.name(a.src.var));
    case Action::Kind::Read: return v.name(a.x) + " = " + v.name(a.g);
    }
    return "?";
}

std::string Cfg::lockset_text(LockSet s) const {
    std::string out = "{";
    bool first = true;
    for (auto m : s.members()) {
        if (!first) out += ",";
        first = false;
        out += mutex_names[m];
    }
    return out + "}";
}

std::string Cfg::to_dot() const {
    std::ostringstream os;
    os << "digraph cfg {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
    for (PointId u = 0; u < points.size(); ++u)
        os << "  n" << u << " [label=\"" << point_name(u) << "\"];\n";
    for (const auto& e : edges)
        os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << action_text(e.act)
           << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace concai
