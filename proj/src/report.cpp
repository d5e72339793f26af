#include "concai/report.hpp"

#include <sstream>

namespace concai {

namespace {

nlohmann::json site_json(const ReadSite& s, const ReadTableEntry& e) {
    return {{"site", s.key},
            {"edge", s.edge},
            {"line", s.loc.line},
            {"col", s.loc.col},
            {"reachable", e.reachable},
            {"value", e.value.to_json()}};
}

} // namespace

nlohmann::json RunReport::to_json() const {
    nlohmann::json sites_arr = nlohmann::json::array();
    for (std::size_t i = 0; i < sites.size(); ++i)
        sites_arr.push_back(site_json(sites[i], table[i]));
    nlohmann::json j{{"program", program},
                     {"analysis", analysis_name(analysis)},
                     {"sites", std::move(sites_arr)},
                     {"stats",
                      {{"rhs_evaluations", stats.rhs_evaluations},
                       {"unknowns", stats.unknowns_materialized},
                       {"restarts", stats.restarts}}}};
    if (include_timings) j["wall_ms"] = wall_ms;
    return j;
}

std::string RunReport::to_text() const {
    std::ostringstream os;
    os << "program:  " << program << "\n";
    os << "analysis: " << analysis_name(analysis) << "\n";
    for (std::size_t i = 0; i < sites.size(); ++i) {
        os << "  " << sites[i].key << " = "
           << (table[i].reachable ? table[i].value.to_string() : "(unreachable)") << "\n";
    }
    os << "stats: rhs=" << stats.rhs_evaluations << " unknowns=" << stats.unknowns_materialized
       << " restarts=" << stats.restarts << " wall_ms=" << wall_ms << "\n";
    return os.str();
}

CompareReport make_compare_report(const std::string& program,
                                  const std::vector<Analysis>& analyses,
                                  const std::vector<ReadSite>& sites,
                                  std::vector<ReadTable> tables) {
    CompareReport r;
    r.program = program;
    r.analyses = analyses;
    r.sites = sites;
    r.tables = std::move(tables);
    r.strictly_best.assign(analyses.size(), 0);
    for (std::size_t s = 0; s < sites.size(); ++s) {
        std::vector<std::vector<PrecisionRel>> row(analyses.size(),
                                                   std::vector<PrecisionRel>(analyses.size()));
        for (std::size_t i = 0; i < analyses.size(); ++i)
            for (std::size_t j = 0; j < analyses.size(); ++j)
                row[i][j] = compare_values(r.tables[i][s].value, r.tables[j][s].value);
        bool tied = true;
        for (std::size_t i = 0; i < analyses.size(); ++i) {
            bool best = true;
            for (std::size_t j = 0; j < analyses.size(); ++j) {
                if (i == j) continue;
                if (row[i][j] != PrecisionRel::Equal) tied = false;
                if (row[i][j] != PrecisionRel::Less) best = false;
            }
            if (best && analyses.size() > 1) r.strictly_best[i]++;
        }
        if (tied) r.all_tied++;
        r.matrix.push_back(std::move(row));
    }
    return r;
}

nlohmann::json CompareReport::to_json() const {
    nlohmann::json names = nlohmann::json::array();
    for (Analysis a : analyses) names.push_back(analysis_name(a));
    nlohmann::json sites_arr = nlohmann::json::array();
    for (std::size_t s = 0; s < sites.size(); ++s) {
        nlohmann::json values = nlohmann::json::object();
        for (std::size_t i = 0; i < analyses.size(); ++i)
            values[analysis_name(analyses[i])] = tables[i][s].value.to_json();
        nlohmann::json rel = nlohmann::json::array();
        for (std::size_t i = 0; i < analyses.size(); ++i) {
            nlohmann::json rl = nlohmann::json::array();
            for (std::size_t j = 0; j < analyses.size(); ++j)
                rl.push_back(precision_text(matrix[s][i][j]));
            rel.push_back(std::move(rl));
        }
        sites_arr.push_back({{"site", sites[s].key},
                             {"values", std::move(values)},
                             {"matrix", std::move(rel)}});
    }
    nlohmann::json best = nlohmann::json::object();
    for (std::size_t i = 0; i < analyses.size(); ++i)
        best[analysis_name(analyses[i])] = strictly_best[i];
    return {{"program", program},
            {"analyses", std::move(names)},
            {"sites", std::move(sites_arr)},
            {"summary", {{"strictly_best", std::move(best)}, {"all_tied", all_tied}}}};
}

std::string CompareReport::to_text() const {
    std::ostringstream os;
    os << "program: " << program << "\n";
    for (std::size_t s = 0; s < sites.size(); ++s) {
        os << "  " << sites[s].key << "\n";
        for (std::size_t i = 0; i < analyses.size(); ++i)
            os << "    " << analysis_name(analyses[i]) << " = "
               << tables[i][s].value.to_string() << "\n";
        for (std::size_t i = 0; i < analyses.size(); ++i)
            for (std::size_t j = i + 1; j < analyses.size(); ++j)
                os << "    " << analysis_name(analyses[i]) << " "
                   << precision_text(matrix[s][i][j]) << " "
                   << analysis_name(analyses[j]) << "\n";
    }
    os << "summary: all_tied=" << all_tied;
    for (std::size_t i = 0; i < analyses.size(); ++i)
        os << " best[" << analysis_name(analyses[i]) << "]=" << strictly_best[i];
    os << "\n";
    return os.str();
}

nlohmann::json OracleReport::to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json fails = nlohmann::json::array();
        for (const auto& f : r.failures)
            fails.push_back(
                {{"site", f.site}, {"value", f.value}, {"trace", f.trace_path}});
        per.push_back({{"analysis", analysis_name(r.analysis)},
                       {"verdict", verdict_text(r.verdict)},
                       {"failures", std::move(fails)}});
    }
    return {{"program", program},
            {"bound", bound},
            {"traces", trace_count},
            {"truncated", truncated},
            {"verdict", verdict_text(overall)},
            {"analyses", std::move(per)}};
}

std::string OracleReport::to_text() const {
    std::ostringstream os;
    os << "program: " << program << " (bound " << bound << ", " << trace_count
       << " traces" << (truncated ? ", truncated" : "") << ")\n";
    for (const auto& r : results) {
        os << "  " << analysis_name(r.analysis) << ": " << verdict_text(r.verdict) << "\n";
        for (const auto& f : r.failures)
            os << "    witness: site " << f.site << " value " << f.value << " trace "
               << f.trace_path << "\n";
    }
    os << "verdict: " << verdict_text(overall) << "\n";
    return os.str();
}

std::string dump_assignment(const Cfg& cfg, const AnalysisAssignment& a) {
    std::ostringstream os;
    for (const auto& [u, v] : a.entries()) {
        os << u.print() << " := ";
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ValueD>)
                    os << x.to_string();
                else if constexpr (std::is_same_v<T, LockSet>)
                    os << cfg.lockset_text(x);
                else
                    os << state_json(x, cfg).dump();
            },
            v);
        os << "\n";
    }
    return os.str();
}

nlohmann::json states_json(const Cfg& cfg, const AnalysisAssignment& a) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [u, v] : a.entries()) {
        nlohmann::json entry{{"unknown", u.print()}};
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ValueD>)
                    entry["value"] = x.to_json();
                else if constexpr (std::is_same_v<T, LockSet>)
                    entry["lockset"] = cfg.lockset_text(x);
                else
                    entry["state"] = state_json(x, cfg);
            },
            v);
        arr.push_back(std::move(entry));
    }
    return arr;
}

} // namespace concai
