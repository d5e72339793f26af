#include "concai/analyses.hpp"

#include <algorithm>

namespace concai {

std::string analysis_name(Analysis a) {
    switch (a) {
    case Analysis::Protection: return "protection";
    case Analysis::ProtectionOtf: return "protection-otf";
    case Analysis::LockCentered: return "lock";
    case Analysis::WriteCentered: return "write";
    case Analysis::Combined: return "combined";
    case Analysis::Mine: return "mine";
    }
    return "?";
}

std::optional<Analysis> parse_analysis(const std::string& name) {
    for (Analysis a : kAllAnalyses)
        if (analysis_name(a) == name) return a;
    return std::nullopt;
}

ValueD eval_abstract(const Program& p, ExprId e, const AbstractEnv& env) {
    const ExprNode& n = p.exprs.at(e);
    switch (n.kind) {
    case ExprNode::Kind::IntLit: return ValueD::of_int(n.lit);
    case ExprNode::Kind::VarRef: return env.get(n.var);
    case ExprNode::Kind::Binary: {
        ValueD l = eval_abstract(p, n.lhs, env);
        ValueD r = eval_abstract(p, n.rhs, env);
        if (l.is_bot() || r.is_bot()) return ValueD::bot();
        if (l.is_top() || r.is_top()) return ValueD::top();
        std::vector<AbsValue> out;
        for (const AbsValue& a : l.values()) {
            for (const AbsValue& b : r.values()) {
                switch (n.op) {
                case BinOp::Eq: out.emplace_back(std::int64_t{a == b}); continue;
                case BinOp::Ne: out.emplace_back(std::int64_t{a != b}); continue;
                default: break;
                }
                if (a.index() != 0 || b.index() != 0)
                    throw std::logic_error("thread id used in arithmetic");
                std::int64_t x = std::get<0>(a), y = std::get<0>(b);
                switch (n.op) {
                case BinOp::Add: out.emplace_back(x + y); break;
                case BinOp::Sub: out.emplace_back(x - y); break;
                case BinOp::Mul: out.emplace_back(x * y); break;
                case BinOp::Lt: out.emplace_back(std::int64_t{x < y}); break;
                case BinOp::Le: out.emplace_back(std::int64_t{x <= y}); break;
                default: break;
                }
            }
        }
        return ValueD::of_set(std::move(out));
    }
    }
    throw std::logic_error("unreachable");
}

bool guard_passes(const ValueD& cond, bool polarity) {
    if (cond.is_bot()) return false;
    if (auto c = cond.as_singleton_int()) return (*c != 0) == polarity;
    return true;
}

std::vector<ReadSite> read_sites(const Cfg& cfg) {
    std::vector<ReadSite> out;
    for (EdgeId e = 0; e < cfg.edges.size(); ++e) {
        const CfgEdge& edge = cfg.edges[e];
        if (edge.act.kind != Action::Kind::Read) continue;
        ReadSite s;
        s.edge = e;
        s.loc = edge.loc;
        s.local = edge.act.x;
        s.global = edge.act.g;
        s.key = cfg.program->threads[cfg.points[edge.src].thread].name + ":" +
                edge.loc.to_string() + ":" + cfg.vars().name(s.local) + "=" +
                cfg.vars().name(s.global);
        out.push_back(std::move(s));
    }
    return out;
}

// ------------------------------------------------------------ system build

namespace {

using View = AnalysisCS::View;

struct BuildCtx {
    const Cfg& cfg;
    const LocksetInfo& ls;
    Analysis kind;
    StateSizes sizes;
    std::shared_ptr<const VarTable> vars;

    bool on_the_fly() const { return kind == Analysis::ProtectionOtf; }

    LockSet protection_of(View& view, VarId g) const {
        if (on_the_fly()) return av_as<LockSet>(view.get(Unknown::m_prot(g)));
        return ls.protecting[g];
    }

    ValueD write_source(const Action& act, const AbstractEnv& env) const {
        return act.src.is_lit ? ValueD::of_int(act.src.lit) : env.get(act.src.var);
    }

    AbstractEnv spawn_env(const AbstractEnv& env) const {
        return env.with(vars->self, ValueD::top()).with_globals_bot();
    }
};

// The five transfer-function families. Each returns the contribution to the
// successor point unknown and emits its side effects through the view.
// Transfers are strict in the bottom state: nothing flows out of a state no
// trace reaches.

AnalysisValue protection_rhs(const BuildCtx& ctx, const CfgEdge& edge, LockSet held,
                             View& view) {
    const Unknown src = Unknown::pp(edge.src, held);
    const AnalysisValue& in = view.get(src);
    if (av_is_bottom_state(in))
        return ProtState::bottom(ctx.sizes, ctx.vars);
    ProtState st = av_as<ProtState>(in);
    const Action& act = edge.act;
    const Program& prog = *ctx.cfg.program;

    switch (act.kind) {
    case Action::Kind::Guard:
        if (!guard_passes(eval_abstract(prog, act.expr, st.env), act.polarity))
            return ProtState::bottom(ctx.sizes, ctx.vars);
        return st;
    case Action::Kind::Assign:
        st.env = st.env.with(act.x, eval_abstract(prog, act.expr, st.env));
        return st;
    case Action::Kind::Input:
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    case Action::Kind::Create: {
        ProtState spawned{GlobalSet{}, ctx.spawn_env(st.env)};
        view.side_effect(Unknown::pp(act.entry, LockSet{}), std::move(spawned));
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    }
    case Action::Kind::Lock: return st;
    case Action::Kind::Unlock: {
        LockSet rest = held.without(act.m);
        GlobalSet pruned;
        for (auto g : st.protected_written.members())
            if (rest.intersects(ctx.protection_of(view, g))) pruned = pruned.with(g);
        if (ctx.cfg.is_dedicated(act.m)) {
            VarId g = static_cast<VarId>(act.m - ctx.cfg.n_user_mutexes);
            view.side_effect(Unknown::prot_g_unprot(g), st.env.get(g));
            if (ctx.protection_of(view, g) == LockSet::single(act.m))
                view.side_effect(Unknown::prot_g(g), st.env.get(g));
        } else {
            for (VarId g = 0; g < ctx.sizes.n_globals; ++g)
                if (ctx.protection_of(view, g).contains(act.m))
                    view.side_effect(Unknown::prot_g(g), st.env.get(g));
        }
        st.protected_written = pruned;
        return st;
    }
    case Action::Kind::Write: {
        if (ctx.on_the_fly()) view.side_effect(Unknown::m_prot(act.g), held);
        st.protected_written = st.protected_written.with(act.g);
        st.env = st.env.with(act.g, ctx.write_source(act, st.env));
        return st;
    }
    case Action::Kind::Read: {
        const ValueD& own = st.env.get(act.g);
        ValueD result;
        if (st.protected_written.contains(act.g)) {
            if (own.is_bot())
                throw std::logic_error("protected global read with no recorded value");
            result = own;
        } else if (held.intersect(ctx.protection_of(view, act.g)) ==
                   LockSet::single(ctx.cfg.dedicated_mutex(act.g))) {
            result = vd_join(own, av_as<ValueD>(view.get(Unknown::prot_g_unprot(act.g))));
        } else {
            result = vd_join(own, av_as<ValueD>(view.get(Unknown::prot_g(act.g))));
        }
        st.env = st.env.with(act.x, std::move(result));
        return st;
    }
    }
    throw std::logic_error("unreachable");
}

AnalysisValue lock_centered_rhs(const BuildCtx& ctx, const CfgEdge& edge, LockSet held,
                                View& view) {
    const AnalysisValue& in = view.get(Unknown::pp(edge.src, held));
    if (av_is_bottom_state(in))
        return LockState::bottom(ctx.sizes, ctx.vars);
    LockState st = av_as<LockState>(in);
    const Action& act = edge.act;
    const Program& prog = *ctx.cfg.program;

    switch (act.kind) {
    case Action::Kind::Guard:
        if (!guard_passes(eval_abstract(prog, act.expr, st.env), act.polarity))
            return LockState::bottom(ctx.sizes, ctx.vars);
        return st;
    case Action::Kind::Assign:
        st.env = st.env.with(act.x, eval_abstract(prog, act.expr, st.env));
        return st;
    case Action::Kind::Input:
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    case Action::Kind::Create: {
        LockState spawned{std::vector<GlobalSet>(ctx.sizes.n_mutexes),
                          std::vector<MinAntichain>(ctx.sizes.n_mutexes),
                          ctx.spawn_env(st.env)};
        view.side_effect(Unknown::pp(act.entry, LockSet{}), std::move(spawned));
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    }
    case Action::Kind::Lock:
        st.written_since[act.m] = GlobalSet{};
        st.acquired_at[act.m] = MinAntichain::family_of(held);
        return st;
    case Action::Kind::Unlock:
        for (VarId g = 0; g < ctx.sizes.n_globals; ++g)
            view.side_effect(Unknown::sync_g(g, act.m, held.without(act.m)),
                             st.env.get(g));
        return st;
    case Action::Kind::Write: {
        for (MutexId m = 0; m < ctx.sizes.n_mutexes; ++m)
            st.written_since[m] = st.written_since[m].with(act.g);
        st.env = st.env.with(act.g, ctx.write_source(act, st.env));
        return st;
    }
    case Action::Kind::Read: {
        ValueD gathered = ValueD::bot();
        for (MutexId a = 0; a < ctx.sizes.n_mutexes; ++a) {
            if (st.written_since[a].contains(act.g)) continue;
            if (st.acquired_at[a].empty()) continue;
            for (auto& [unk, val] :
                 view.family(FamilyPattern{Unknown::Kind::SyncG, act.g, a})) {
                bool admissible = false;
                for (LockSet b : st.acquired_at[a].elements())
                    if (!b.intersects(unk.background)) admissible = true;
                if (admissible) gathered = vd_join(gathered, av_as<ValueD>(*val));
            }
        }
        st.env = st.env.with(act.x, vd_join(st.env.get(act.g), gathered));
        return st;
    }
    }
    throw std::logic_error("unreachable");
}

AnalysisValue write_centered_rhs(const BuildCtx& ctx, const CfgEdge& edge, LockSet held,
                                 View& view) {
    const AnalysisValue& in = view.get(Unknown::pp(edge.src, held));
    if (av_is_bottom_state(in))
        return WriteState::bottom(ctx.sizes, ctx.vars);
    WriteState st = av_as<WriteState>(in);
    const Action& act = edge.act;
    const Program& prog = *ctx.cfg.program;

    switch (act.kind) {
    case Action::Kind::Guard:
        if (!guard_passes(eval_abstract(prog, act.expr, st.env), act.polarity))
            return WriteState::bottom(ctx.sizes, ctx.vars);
        return st;
    case Action::Kind::Assign:
        st.env = st.env.with(act.x, eval_abstract(prog, act.expr, st.env));
        return st;
    case Action::Kind::Input:
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    case Action::Kind::Create: {
        WriteState spawned{std::vector<MinAntichain>(ctx.sizes.n_globals),
                           std::vector<MinAntichain>(ctx.sizes.n_globals),
                           ctx.spawn_env(st.env)};
        for (VarId g = 0; g < ctx.sizes.n_globals; ++g)
            spawned.since_write[g] = MinAntichain::all();
        view.side_effect(Unknown::pp(act.entry, LockSet{}), std::move(spawned));
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    }
    case Action::Kind::Lock: return st;
    case Action::Kind::Unlock: {
        LockSet rest = held.without(act.m);
        for (VarId g = 0; g < ctx.sizes.n_globals; ++g) {
            for (LockSet w : st.write_locks[g].elements())
                view.side_effect(Unknown::write_g(g, act.m, rest, w), st.env.get(g));
            st.since_write[g] = ac_insert(st.since_write[g], rest);
        }
        return st;
    }
    case Action::Kind::Write:
        st.write_locks[act.g] = MinAntichain::family_of(held);
        st.since_write[act.g] = MinAntichain::family_of(held);
        st.env = st.env.with(act.g, ctx.write_source(act, st.env));
        return st;
    case Action::Kind::Read: {
        ValueD d = st.env.get(act.g);
        const MinAntichain& p = st.since_write[act.g];
        for (MutexId a : held.members()) {
            for (auto& [unk, val] :
                 view.family(FamilyPattern{Unknown::Kind::WriteG, act.g, a})) {
                if (held.intersects(unk.background)) continue;
                bool write_released = false, lock_released = false;
                for (LockSet s : p.elements()) {
                    if (!s.intersects(unk.write_locks)) write_released = true;
                    if (!s.contains(a)) lock_released = true;
                }
                if (write_released && lock_released) d = vd_join(d, av_as<ValueD>(*val));
            }
        }
        st.env = st.env.with(act.x, std::move(d));
        return st;
    }
    }
    throw std::logic_error("unreachable");
}

AnalysisValue combined_rhs(const BuildCtx& ctx, const CfgEdge& edge, LockSet held,
                           View& view) {
    const AnalysisValue& in = view.get(Unknown::pp(edge.src, held));
    if (av_is_bottom_state(in))
        return CombinedState::bottom(ctx.sizes, ctx.vars);
    CombinedState st = av_as<CombinedState>(in);
    const Action& act = edge.act;
    const Program& prog = *ctx.cfg.program;

    switch (act.kind) {
    case Action::Kind::Guard:
        if (!guard_passes(eval_abstract(prog, act.expr, st.env), act.polarity))
            return CombinedState::bottom(ctx.sizes, ctx.vars);
        return st;
    case Action::Kind::Assign:
        st.env = st.env.with(act.x, eval_abstract(prog, act.expr, st.env));
        return st;
    case Action::Kind::Input:
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    case Action::Kind::Create: {
        CombinedState spawned = CombinedState::bottom(ctx.sizes, ctx.vars);
        spawned.written_since.assign(ctx.sizes.n_mutexes, GlobalSet{});
        spawned.acquired_at.assign(ctx.sizes.n_mutexes, MinAntichain{});
        spawned.write_locks.assign(ctx.sizes.n_globals, MinAntichain{});
        spawned.since_write.assign(ctx.sizes.n_globals, MinAntichain::all());
        spawned.env = ctx.spawn_env(st.env);
        view.side_effect(Unknown::pp(act.entry, LockSet{}), std::move(spawned));
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    }
    case Action::Kind::Lock:
        st.written_since[act.m] = GlobalSet{};
        st.acquired_at[act.m] = MinAntichain::family_of(held);
        return st;
    case Action::Kind::Unlock: {
        LockSet rest = held.without(act.m);
        for (VarId g = 0; g < ctx.sizes.n_globals; ++g) {
            for (LockSet w : st.write_locks[g].elements())
                view.side_effect(Unknown::write_g(g, act.m, rest, w), st.env.get(g));
            st.since_write[g] = ac_insert(st.since_write[g], rest);
        }
        return st;
    }
    case Action::Kind::Write:
        st.write_locks[act.g] = MinAntichain::family_of(held);
        st.since_write[act.g] = MinAntichain::family_of(held);
        for (MutexId m = 0; m < ctx.sizes.n_mutexes; ++m)
            st.written_since[m] = st.written_since[m].with(act.g);
        st.env = st.env.with(act.g, ctx.write_source(act, st.env));
        return st;
    case Action::Kind::Read: {
        const MinAntichain& p = st.since_write[act.g];
        ValueD lock_view = ValueD::bot();
        ValueD write_view = ValueD::bot();
        for (MutexId a = 0; a < ctx.sizes.n_mutexes; ++a) {
            auto members = view.family(FamilyPattern{Unknown::Kind::WriteG, act.g, a});
            bool lock_side = !st.written_since[a].contains(act.g);
            for (auto& [unk, val] : members) {
                bool write_released = false, lock_released = false;
                for (LockSet s : p.elements()) {
                    if (!s.intersects(unk.write_locks)) write_released = true;
                    if (!s.contains(a)) lock_released = true;
                }
                if (!write_released) continue;
                if (lock_side) {
                    for (LockSet b : st.acquired_at[a].elements())
                        if (!b.intersects(unk.background)) {
                            lock_view = vd_join(lock_view, av_as<ValueD>(*val));
                            break;
                        }
                }
                if (held.contains(a) && !held.intersects(unk.background) && lock_released)
                    write_view = vd_join(write_view, av_as<ValueD>(*val));
            }
        }
        ValueD d = vd_join(st.env.get(act.g), vd_meet(lock_view, write_view));
        st.env = st.env.with(act.x, std::move(d));
        return st;
    }
    }
    throw std::logic_error("unreachable");
}

AnalysisValue mine_rhs(const BuildCtx& ctx, const CfgEdge& edge, LockSet held, View& view) {
    const AnalysisValue& in = view.get(Unknown::pp(edge.src, held));
    if (av_is_bottom_state(in))
        return MineState::bottom(ctx.sizes, ctx.vars);
    MineState st = av_as<MineState>(in);
    const Action& act = edge.act;
    const Program& prog = *ctx.cfg.program;

    auto gather = [&](VarId g, MutexId a) {
        ValueD acc = ValueD::bot();
        for (auto& [unk, val] : view.family(FamilyPattern{Unknown::Kind::SyncG, g, a}))
            if (!held.intersects(unk.background)) acc = vd_join(acc, av_as<ValueD>(*val));
        return acc;
    };

    switch (act.kind) {
    case Action::Kind::Guard:
        if (!guard_passes(eval_abstract(prog, act.expr, st.env), act.polarity))
            return MineState::bottom(ctx.sizes, ctx.vars);
        return st;
    case Action::Kind::Assign:
        st.env = st.env.with(act.x, eval_abstract(prog, act.expr, st.env));
        return st;
    case Action::Kind::Input:
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    case Action::Kind::Create: {
        MineState spawned{GlobalSet{}, ctx.spawn_env(st.env)};
        view.side_effect(Unknown::pp(act.entry, LockSet{}), std::move(spawned));
        st.env = st.env.with(act.x, ValueD::top());
        return st;
    }
    case Action::Kind::Lock: {
        if (ctx.cfg.is_dedicated(act.m)) return st;
        for (VarId g = 0; g < ctx.sizes.n_globals; ++g)
            st.env = st.env.with(g, vd_join(st.env.get(g), gather(g, act.m)));
        return st;
    }
    case Action::Kind::Unlock: {
        if (ctx.cfg.is_dedicated(act.m)) return st;
        for (auto g : st.written.members())
            view.side_effect(Unknown::sync_g(g, act.m, held.without(act.m)),
                             st.env.get(g));
        return st;
    }
    case Action::Kind::Write: {
        st.env = st.env.with(act.g, ctx.write_source(act, st.env));
        MutexId mg = ctx.cfg.dedicated_mutex(act.g);
        view.side_effect(Unknown::sync_g(act.g, mg, held.without(mg)), st.env.get(act.g));
        st.written = st.written.with(act.g);
        return st;
    }
    case Action::Kind::Read: {
        ValueD weak = gather(act.g, ctx.cfg.dedicated_mutex(act.g));
        st.env = st.env.with(act.x, vd_join(st.env.get(act.g), weak));
        return st;
    }
    }
    throw std::logic_error("unreachable");
}

AnalysisValue initial_state(const BuildCtx& ctx) {
    AbstractEnv env = AbstractEnv::initial(ctx.vars);
    switch (ctx.kind) {
    case Analysis::Protection:
    case Analysis::ProtectionOtf: return ProtState{GlobalSet{}, env};
    case Analysis::LockCentered:
        return LockState{std::vector<GlobalSet>(ctx.sizes.n_mutexes),
                         std::vector<MinAntichain>(ctx.sizes.n_mutexes), env};
    case Analysis::WriteCentered: {
        WriteState s{std::vector<MinAntichain>(ctx.sizes.n_globals),
                     std::vector<MinAntichain>(ctx.sizes.n_globals), env};
        for (auto& p : s.since_write) p = MinAntichain::all();
        return s;
    }
    case Analysis::Combined: {
        CombinedState s = CombinedState::bottom(ctx.sizes, ctx.vars);
        s.written_since.assign(ctx.sizes.n_mutexes, GlobalSet{});
        s.acquired_at.assign(ctx.sizes.n_mutexes, MinAntichain{});
        s.write_locks.assign(ctx.sizes.n_globals, MinAntichain{});
        s.since_write.assign(ctx.sizes.n_globals, MinAntichain::all());
        s.env = env;
        return s;
    }
    case Analysis::Mine: return MineState{GlobalSet{}, env};
    }
    throw std::logic_error("unreachable");
}

AnalysisValue bottom_state(const BuildCtx& ctx) {
    switch (ctx.kind) {
    case Analysis::Protection:
    case Analysis::ProtectionOtf: return ProtState::bottom(ctx.sizes, ctx.vars);
    case Analysis::LockCentered: return LockState::bottom(ctx.sizes, ctx.vars);
    case Analysis::WriteCentered: return WriteState::bottom(ctx.sizes, ctx.vars);
    case Analysis::Combined: return CombinedState::bottom(ctx.sizes, ctx.vars);
    case Analysis::Mine: return MineState::bottom(ctx.sizes, ctx.vars);
    }
    throw std::logic_error("unreachable");
}

} // namespace

AnalysisCS build_system(const Cfg& cfg, const LocksetInfo& ls, Analysis kind) {
    auto ctx = std::make_shared<BuildCtx>(
        BuildCtx{cfg, ls, kind, sizes_of(cfg), cfg.program->vars});
    AnalysisCS cs;
    std::size_t n_mutexes = cfg.n_mutexes();
    cs.bottom = [ctx, n_mutexes](const Unknown& u) -> AnalysisValue {
        switch (u.kind) {
        case Unknown::Kind::PP: return bottom_state(*ctx);
        case Unknown::Kind::MProt: return LockSet::full(n_mutexes);
        default: return ValueD::bot();
        }
    };
    cs.add_seed(Unknown::pp(cfg.main_entry(), LockSet{}), initial_state(*ctx));

    for (EdgeId eid = 0; eid < cfg.edges.size(); ++eid) {
        const CfgEdge& edge = cfg.edges[eid];
        for (LockSet held : ls.at_point[edge.src]) {
            auto next = lockset_after(edge.act, held);
            if (!next) continue; // dead transition
            Unknown lhs = Unknown::pp(edge.dst, *next);
            cs.add_constraint(lhs, [ctx, eid, held](View& view) -> AnalysisValue {
                const CfgEdge& e = ctx->cfg.edges[eid];
                switch (ctx->kind) {
                case Analysis::Protection:
                case Analysis::ProtectionOtf: return protection_rhs(*ctx, e, held, view);
                case Analysis::LockCentered: return lock_centered_rhs(*ctx, e, held, view);
                case Analysis::WriteCentered: return write_centered_rhs(*ctx, e, held, view);
                case Analysis::Combined: return combined_rhs(*ctx, e, held, view);
                case Analysis::Mine: return mine_rhs(*ctx, e, held, view);
                }
                throw std::logic_error("unreachable");
            });
        }
    }
    return cs;
}

std::vector<Unknown> analysis_roots(const Cfg& cfg, const LocksetInfo& ls) {
    std::vector<Unknown> roots;
    for (PointId u = 0; u < cfg.points.size(); ++u)
        for (LockSet s : ls.at_point[u]) roots.push_back(Unknown::pp(u, s));
    return roots;
}

AnalysisRun run_analysis(const Cfg& cfg, const LocksetInfo& ls, Analysis a,
                         const solver::EngineOptions& opts) {
    AnalysisCS cs = build_system(cfg, ls, a);
    std::vector<Unknown> roots = analysis_roots(cfg, ls);
    if (a == Analysis::ProtectionOtf) {
        std::vector<Unknown> watch;
        for (VarId g = 0; g < cfg.n_globals(); ++g) watch.push_back(Unknown::m_prot(g));
        std::uint64_t max_restarts = cfg.n_globals() * cfg.n_mutexes() + 1;
        auto r = solver::solve_with_restarts<AnalysisDom>(cs, roots, watch, max_restarts, opts);
        return {a, std::move(r.assignment), r.stats};
    }
    auto r = solver::solve<AnalysisDom>(cs, roots, opts);
    return {a, std::move(r.assignment), r.stats};
}

ReadTable read_table(const Cfg& cfg, const LocksetInfo& ls, const AnalysisAssignment& a) {
    ReadTable out;
    for (const ReadSite& site : read_sites(cfg)) {
        const CfgEdge& edge = cfg.edges[site.edge];
        ReadTableEntry entry;
        for (LockSet s : ls.at_point[edge.dst]) {
            Unknown u = Unknown::pp(edge.dst, s);
            if (!a.has(u)) continue;
            AnalysisValue v = a.get(u);
            if (av_is_bottom_state(v)) continue;
            entry.reachable = true;
            entry.value = vd_join(entry.value, av_env(v).get(site.local));
        }
        out.push_back(std::move(entry));
    }
    return out;
}

const char* precision_text(PrecisionRel r) {
    switch (r) {
    case PrecisionRel::Less: return "<";
    case PrecisionRel::Equal: return "=";
    case PrecisionRel::Greater: return ">";
    case PrecisionRel::Incomparable: return "<>";
    }
    return "?";
}

PrecisionRel compare_values(const ValueD& a, const ValueD& b) {
    bool le = vd_leq(a, b), ge = vd_leq(b, a);
    if (le && ge) return PrecisionRel::Equal;
    if (le) return PrecisionRel::Less;
    if (ge) return PrecisionRel::Greater;
    return PrecisionRel::Incomparable;
}

std::vector<PrecisionRel> compare_tables(const ReadTable& a, const ReadTable& b) {
    if (a.size() != b.size()) throw std::invalid_argument("read tables over different sites");
    std::vector<PrecisionRel> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(compare_values(a[i].value, b[i].value));
    return out;
}

} // namespace concai
