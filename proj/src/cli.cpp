#include "concai/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace concai::cli {

namespace {

struct Loaded {
    Cfg cfg;
    LocksetInfo ls;
    std::string name;
};

std::string basename_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

Loaded load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError({}, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    Cfg cfg = build_cfg(instrument_atomicity(parse(buf.str())));
    LocksetInfo ls = reachable_locksets(cfg);
    return {std::move(cfg), std::move(ls), basename_of(path)};
}

solver::EngineOptions engine_options(const Options& opts, std::ostream& err) {
    solver::EngineOptions eo;
    eo.max_rhs_evaluations = opts.solver_budget;
    if (opts.trace_solver)
        eo.trace = [&err](const std::string& u, std::size_t deps, bool changed) {
            err << "eval " << u << " deps=" << deps << " changed=" << (changed ? 1 : 0)
                << "\n";
        };
    return eo;
}

std::vector<Analysis> parse_analyses(const std::vector<std::string>& names) {
    std::vector<Analysis> out;
    for (const auto& n : names) {
        auto a = parse_analysis(n);
        if (!a) throw ParseError({}, "unknown analysis '" + n + "'");
        out.push_back(*a);
    }
    return out;
}

TraceConfig trace_config(const Options& opts) {
    TraceConfig conf;
    conf.input_values = opts.input_set;
    conf.max_events_per_thread = opts.bound;
    return conf;
}

} // namespace

void apply_env_budget(Options& opts) {
    if (const char* env = std::getenv("CONC_AI_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) opts.solver_budget = v;
    }
}

int cmd_run(const std::string& path, const std::string& analysis, const Options& opts,
            std::ostream& out, std::ostream& err) {
    try {
        Loaded prog = load(path);
        auto kind = parse_analysis(analysis);
        if (!kind) throw ParseError({}, "unknown analysis '" + analysis + "'");

        if (opts.format == Format::Dot) {
            out << prog.cfg.to_dot();
            return kExitOk;
        }

        auto t0 = std::chrono::steady_clock::now();
        AnalysisRun run = run_analysis(prog.cfg, prog.ls, *kind, engine_options(opts, err));
        auto t1 = std::chrono::steady_clock::now();

        RunReport report;
        report.program = prog.name;
        report.analysis = *kind;
        report.sites = read_sites(prog.cfg);
        report.table = read_table(prog.cfg, prog.ls, run.assignment);
        report.stats = run.stats;
        report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        report.include_timings = opts.timings;

        if (opts.format == Format::Json) {
            nlohmann::json j = report.to_json();
            if (opts.dump_states) j["states"] = states_json(prog.cfg, run.assignment);
            out << j.dump(2) << "\n";
        } else {
            out << report.to_text();
            if (opts.dump_states) out << dump_assignment(prog.cfg, run.assignment);
        }
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const solver::BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    }
}

int cmd_compare(const std::string& path, const std::vector<std::string>& names,
                const Options& opts, std::ostream& out, std::ostream& err) {
    try {
        if (names.size() < 2) throw ParseError({}, "compare needs at least two analyses");
        Loaded prog = load(path);
        std::vector<Analysis> analyses = parse_analyses(names);

        std::vector<ReadTable> tables;
        for (Analysis a : analyses) {
            AnalysisRun run = run_analysis(prog.cfg, prog.ls, a, engine_options(opts, err));
            tables.push_back(read_table(prog.cfg, prog.ls, run.assignment));
        }
        CompareReport report = make_compare_report(prog.name, analyses,
                                                   read_sites(prog.cfg), std::move(tables));
        if (opts.format == Format::Json)
            out << report.to_json().dump(2) << "\n";
        else
            out << report.to_text();
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const solver::BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    }
}

int cmd_oracle(const std::string& path, const std::vector<std::string>& names,
               const Options& opts, std::ostream& out, std::ostream& err) {
    try {
        Loaded prog = load(path);
        std::vector<Analysis> analyses =
            names.empty() ? std::vector<Analysis>(std::begin(kAllAnalyses),
                                                  std::end(kAllAnalyses))
                          : parse_analyses(names);
        TraceConfig conf = trace_config(opts);

        OracleReport report;
        report.program = prog.name;
        report.bound = conf.max_events_per_thread;

        ConcreteEnumeration concrete;
        try {
            concrete = concrete_read_table(prog.cfg, conf);
        } catch (const TraceBudgetExceeded& e) {
            err << "error: " << e.what() << "\n";
            report.overall = Verdict::Inconclusive;
            out << (opts.format == Format::Json ? report.to_json().dump(2) + "\n"
                                                : report.to_text());
            return kExitBudget;
        }
        report.trace_count = concrete.trace_count;
        report.truncated = concrete.truncated;

        if (opts.dump_traces)
            for (const auto& t : enumerate_global(prog.cfg, conf)) out << t->to_dot(prog.cfg);

        std::vector<ReadSite> sites = read_sites(prog.cfg);
        std::size_t witness_count = 0;
        for (Analysis a : analyses) {
            AnalysisRun run = run_analysis(prog.cfg, prog.ls, a, engine_options(opts, err));
            ReadTable table = read_table(prog.cfg, prog.ls, run.assignment);
            SoundnessReport sr = check_soundness(prog.cfg, conf, concrete, table);

            OracleReport::PerAnalysis per;
            per.analysis = a;
            per.verdict = sr.verdict;
            for (const auto& w : sr.failures) {
                OracleReport::PerAnalysis::Failure f;
                f.site = sites[w.site].key;
                f.value = concrete_val_to_string(w.value);
                if (w.trace) {
                    f.trace_path = "concai_oracle_fail_" + std::to_string(witness_count++) +
                                   ".dot";
                    std::ofstream dot(f.trace_path);
                    dot << w.trace->to_dot(prog.cfg);
                }
                per.failures.push_back(std::move(f));
            }
            if (per.verdict == Verdict::Fail) report.overall = Verdict::Fail;
            report.results.push_back(std::move(per));
        }

        if (opts.format == Format::Json)
            out << report.to_json().dump(2) << "\n";
        else
            out << report.to_text();
        return kExitOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const solver::BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    }
}

} // namespace concai::cli
