#include "concai/oracle.hpp"

#include <algorithm>

namespace concai {

bool concrete_less(const ConcreteVal& a, const ConcreteVal& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    if (a.index() == 0) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a).path < std::get<1>(b).path;
}

bool concrete_in_gamma(const ConcreteVal& v, const ValueD& d) {
    if (d.is_top()) return true;
    if (v.index() == 0) return d.contains(AbsValue{std::get<0>(v)});
    return false;
}

void validate_oracle_input(const Cfg& cfg) {
    GlobalSet written, read;
    for (const auto& e : cfg.edges) {
        if (e.act.kind == Action::Kind::Write) written = written.with(e.act.g);
        if (e.act.kind == Action::Kind::Read) read = read.with(e.act.g);
    }
    for (auto g : read.minus(written).members())
        throw ParseError({}, "global read before any possible initialization: " +
                                 cfg.vars().name(g));
}

ConcreteEnumeration concrete_read_table(const Cfg& cfg, const TraceConfig& conf) {
    validate_oracle_input(cfg);
    ConcreteEnumeration out;
    std::vector<ReadSite> sites = read_sites(cfg);
    out.reads.resize(sites.size());

    std::vector<TracePtr> traces = enumerate_global(cfg, conf);
    out.trace_count = traces.size();
    const VarTable& vars = cfg.vars();
    for (const auto& t : traces) {
        if (t->ego().steps.size() == conf.max_events_per_thread &&
            !cfg.out_edges[t->loc(cfg)].empty())
            out.truncated = true;
        auto last = t->last_edge();
        if (!last) continue;
        for (std::size_t s = 0; s < sites.size(); ++s) {
            if (sites[s].edge != *last) continue;
            out.reads[s].push_back(
                t->sink_state().locals[sites[s].local - vars.n_globals]);
        }
    }
    for (auto& vals : out.reads) {
        std::sort(vals.begin(), vals.end(), concrete_less);
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    }
    return out;
}

const char* verdict_text(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

SoundnessReport check_soundness(const Cfg& cfg, const TraceConfig& conf,
                                const ConcreteEnumeration& concrete,
                                const ReadTable& abstract_table) {
    SoundnessReport report;
    std::vector<ReadSite> sites = read_sites(cfg);
    for (std::size_t s = 0; s < sites.size(); ++s) {
        for (const ConcreteVal& v : concrete.reads[s]) {
            if (abstract_table[s].reachable && concrete_in_gamma(v, abstract_table[s].value))
                continue;
            // recover a witness trace ending in this read with this value
            SoundnessWitness w;
            w.site = s;
            w.value = v;
            for (const auto& t : enumerate_global(cfg, conf)) {
                auto last = t->last_edge();
                if (!last || *last != sites[s].edge) continue;
                if (t->sink_state().locals[sites[s].local - cfg.vars().n_globals] == v) {
                    w.trace = t;
                    break;
                }
            }
            report.failures.push_back(std::move(w));
        }
    }
    report.verdict = report.failures.empty() ? Verdict::Pass : Verdict::Fail;
    return report;
}

} // namespace concai
