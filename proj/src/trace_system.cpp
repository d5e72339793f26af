#include "concai/trace_system.hpp"

namespace concai {

TraceCS build_trace_system(const Cfg& cfg, const TraceConfig& conf) {
    TraceCS cs;
    cs.bottom = [](const TraceUnknown&) { return TraceSet{}; };

    TraceSet init;
    init.insert(initial_trace(cfg));
    cs.add_seed(TraceUnknown::point(cfg.main_entry()), init);
    for (MutexId m = 0; m < cfg.n_mutexes(); ++m)
        cs.add_seed(TraceUnknown::mutex(m), init);

    for (EdgeId eid = 0; eid < cfg.edges.size(); ++eid) {
        const CfgEdge& e = cfg.edges[eid];
        TraceUnknown src = TraceUnknown::point(e.src);
        TraceUnknown dst = TraceUnknown::point(e.dst);
        const Action& act = e.act;
        switch (act.kind) {
        case Action::Kind::Create:
            cs.add_constraint(dst, [&cfg, conf, eid, src, act](TraceCS::View& view) {
                TraceSet spawned, extended;
                for (const auto& t : view.get(src).items()) {
                    CreateResult r = step_create(cfg, conf, eid, t);
                    for (const auto& x : r.extended) extended.insert(x);
                    for (const auto& x : r.spawned) spawned.insert(x);
                }
                view.side_effect(TraceUnknown::point(act.entry), std::move(spawned));
                return extended;
            });
            break;
        case Action::Kind::Lock:
            cs.add_constraint(dst, [&cfg, conf, eid, src, act](TraceCS::View& view) {
                TraceSet out;
                const TraceSet& holders = view.get(src);
                const TraceSet& partners = view.get(TraceUnknown::mutex(act.m));
                for (const auto& t0 : holders.items())
                    for (const auto& t1 : partners.items())
                        for (const auto& x : step_lock(cfg, conf, eid, t0, t1)) out.insert(x);
                return out;
            });
            break;
        case Action::Kind::Unlock:
            cs.add_constraint(dst, [&cfg, conf, eid, src, act](TraceCS::View& view) {
                TraceSet out;
                for (const auto& t : view.get(src).items())
                    for (const auto& x : step_unary(cfg, conf, eid, t)) out.insert(x);
                view.side_effect(TraceUnknown::mutex(act.m), out);
                return out;
            });
            break;
        default:
            cs.add_constraint(dst, [&cfg, conf, eid, src](TraceCS::View& view) {
                TraceSet out;
                for (const auto& t : view.get(src).items())
                    for (const auto& x : step_unary(cfg, conf, eid, t)) out.insert(x);
                return out;
            });
        }
    }
    return cs;
}

LocalEnumeration enumerate_local(const Cfg& cfg, const TraceConfig& conf,
                                 const solver::EngineOptions& opts) {
    TraceCS cs = build_trace_system(cfg, conf);
    std::vector<TraceUnknown> roots;
    for (PointId u = 0; u < cfg.points.size(); ++u) roots.push_back(TraceUnknown::point(u));
    for (MutexId m = 0; m < cfg.n_mutexes(); ++m) roots.push_back(TraceUnknown::mutex(m));
    auto r = solver::solve<TraceDom>(cs, roots, opts);
    return {std::move(r.assignment), r.stats};
}

} // namespace concai
