// Cross-validation of the trace enumerator against a brute-force
// interleaving simulator over global product states. The two computations
// share only the expression evaluator; their observable read sets must
// coincide on every corpus program.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "concai/oracle.hpp"
#include "test_util.hpp"

using namespace concai;

namespace {

struct SimThread {
    ThreadId id;
    PointId at = 0;
    ConcreteState locals;
    std::uint32_t events = 0;
};

struct SimState {
    std::vector<SimThread> threads; // kept sorted by id
    std::map<VarId, ConcreteVal> globals;
    std::map<MutexId, ThreadId> holders;

    std::string encode() const {
        std::ostringstream os;
        for (const auto& t : threads) {
            os << t.id.to_string() << "@" << t.at << "#" << t.events << "(";
            for (const auto& v : t.locals.locals) os << concrete_val_to_string(v) << ",";
            os << ")";
        }
        os << "|";
        for (const auto& [g, v] : globals) os << g << "=" << concrete_val_to_string(v) << ",";
        os << "|";
        for (const auto& [m, who] : holders) os << m << ":" << who.to_string() << ",";
        return os.str();
    }
};

class Simulator {
public:
    Simulator(const Cfg& cfg, const TraceConfig& conf) : cfg_(cfg), conf_(conf) {}

    // per read edge: every value observed in any interleaving
    std::map<EdgeId, std::set<std::string>> run() {
        SimState init;
        SimThread root;
        root.id = ThreadId{};
        root.at = cfg_.main_entry();
        const VarTable& vars = cfg_.vars();
        root.locals.locals.assign(vars.size() - vars.n_globals,
                                  ConcreteVal{std::int64_t{0}});
        root.locals.locals[vars.self - vars.n_globals] = ConcreteVal{ThreadId{}};
        init.threads.push_back(std::move(root));
        explore(init);
        return std::move(reads_);
    }

private:
    void explore(const SimState& s) {
        if (!visited_.insert(s.encode()).second) return;
        REQUIRE(visited_.size() < 2'000'000);
        for (std::size_t ti = 0; ti < s.threads.size(); ++ti)
            for (EdgeId eid : cfg_.out_edges[s.threads[ti].at]) step(s, ti, eid);
    }

    void step(const SimState& s, std::size_t ti, EdgeId eid) {
        const SimThread& t = s.threads[ti];
        if (t.events >= conf_.max_events_per_thread) return;
        const CfgEdge& e = cfg_.edges[eid];
        const Action& act = e.act;
        const VarTable& vars = cfg_.vars();
        auto local = [&](VarId v) { return v - vars.n_globals; };

        auto advanced = [&](ConcreteState locals) {
            SimState next = s;
            next.threads[ti].at = e.dst;
            next.threads[ti].locals = std::move(locals);
            next.threads[ti].events++;
            return next;
        };

        switch (act.kind) {
        case Action::Kind::Guard: {
            ConcreteVal v = eval_concrete(*cfg_.program, act.expr, t.locals, vars);
            if ((std::get<0>(v) != 0) != act.polarity) return;
            explore(advanced(t.locals));
            return;
        }
        case Action::Kind::Assign: {
            ConcreteState nl = t.locals;
            nl.locals[local(act.x)] = eval_concrete(*cfg_.program, act.expr, t.locals, vars);
            explore(advanced(std::move(nl)));
            return;
        }
        case Action::Kind::Input:
            for (std::int64_t v : conf_.input_values) {
                ConcreteState nl = t.locals;
                nl.locals[local(act.x)] = ConcreteVal{v};
                explore(advanced(std::move(nl)));
            }
            return;
        case Action::Kind::Create: {
            ThreadId child = t.id.child(t.events + 1);
            ConcreteState nl = t.locals;
            nl.locals[local(act.x)] = ConcreteVal{child};
            SimState next = advanced(std::move(nl));
            SimThread spawned;
            spawned.id = child;
            spawned.at = act.entry;
            spawned.locals = t.locals;
            spawned.locals.locals[local(vars.self)] = ConcreteVal{child};
            auto pos = std::find_if(next.threads.begin(), next.threads.end(),
                                    [&](const SimThread& x) { return child < x.id; });
            next.threads.insert(pos, std::move(spawned));
            explore(next);
            return;
        }
        case Action::Kind::Lock: {
            if (s.holders.count(act.m)) return; // held by someone (not re-entrant)
            SimState next = advanced(t.locals);
            next.holders.emplace(act.m, t.id);
            explore(next);
            return;
        }
        case Action::Kind::Unlock: {
            auto it = s.holders.find(act.m);
            if (it == s.holders.end() || !(it->second == t.id)) return;
            SimState next = advanced(t.locals);
            next.holders.erase(act.m);
            explore(next);
            return;
        }
        case Action::Kind::Write: {
            SimState next = advanced(t.locals);
            next.globals[act.g] = act.src.is_lit
                                      ? ConcreteVal{act.src.lit}
                                      : t.locals.locals[local(act.src.var)];
            explore(next);
            return;
        }
        case Action::Kind::Read: {
            auto it = s.globals.find(act.g);
            if (it == s.globals.end()) return; // uninitialized: no semantics
            reads_[eid].insert(concrete_val_to_string(it->second));
            ConcreteState nl = t.locals;
            nl.locals[local(act.x)] = it->second;
            explore(advanced(std::move(nl)));
            return;
        }
        }
    }

    const Cfg& cfg_;
    const TraceConfig& conf_;
    std::set<std::string> visited_;
    std::map<EdgeId, std::set<std::string>> reads_;
};

const char* kPrograms[] = {
    "ex1.toy",        "ex2.toy",          "ex-4.1.toy",      "ex-4.3.toy",
    "ex-4.4.toy",     "straight_line.toy", "two_locksets.toy", "otf_restart.toy",
    "unreachable_thread.toy", "dead_branch.toy", "input_branch.toy", "loop_bounded.toy",
    "handoff.toy",    "read_subset.toy",  "tid_flow.toy",    "two_writers.toy",
    "seq_globals.toy", "guard_prune.toy", "nested_create.toy", "twice_create.toy",
};

} // namespace

TEST_CASE("trace enumeration observes exactly the interleaving-reachable reads") {
    for (const char* file : kPrograms) {
        std::ifstream in(concai::test::corpus_path(file));
        REQUIRE(in);
        std::stringstream buf;
        buf << in.rdbuf();
        Cfg cfg = build_cfg(instrument_atomicity(parse(buf.str())));

        TraceConfig conf;
        conf.max_events_per_thread = 24;
        auto sim_reads = Simulator(cfg, conf).run();
        ConcreteEnumeration traced = concrete_read_table(cfg, conf);

        std::vector<ReadSite> sites = read_sites(cfg);
        for (std::size_t s = 0; s < sites.size(); ++s) {
            std::set<std::string> traced_vals;
            for (const auto& v : traced.reads[s]) traced_vals.insert(concrete_val_to_string(v));
            std::set<std::string> sim_vals;
            if (auto it = sim_reads.find(sites[s].edge); it != sim_reads.end())
                sim_vals = it->second;
            if (traced_vals != sim_vals)
                MESSAGE("mismatch in ", file, " at ", sites[s].key);
            CHECK(traced_vals == sim_vals);
        }
    }
}
