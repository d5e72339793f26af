#pragma once

#include "concai/analyses.hpp"
#include "concai/oracle.hpp"
#include "json.hpp"

namespace concai {

/// Per-run report: read-site values plus solver statistics. Site ids are
/// derived from stable source positions, identical across analyses of the
/// same program. Wall time is reported only when requested so that default
/// JSON output is byte-identical across runs.
struct RunReport {
    std::string program;
    Analysis analysis = Analysis::Protection;
    std::vector<ReadSite> sites;
    ReadTable table;
    solver::Stats stats;
    double wall_ms = 0.0;
    bool include_timings = false;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

struct CompareReport {
    std::string program;
    std::vector<Analysis> analyses;
    std::vector<ReadSite> sites;
    std::vector<ReadTable> tables; // parallel to analyses
    // matrix[s][i][j] = relation of analyses[i] vs analyses[j] at site s
    std::vector<std::vector<std::vector<PrecisionRel>>> matrix;
    std::vector<std::size_t> strictly_best; // per analysis: sites strictly below all others
    std::size_t all_tied = 0;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

CompareReport make_compare_report(const std::string& program,
                                  const std::vector<Analysis>& analyses,
                                  const std::vector<ReadSite>& sites,
                                  std::vector<ReadTable> tables);

struct OracleReport {
    std::string program;
    std::uint32_t bound = 0;
    std::size_t trace_count = 0;
    bool truncated = false;
    Verdict overall = Verdict::Pass;
    struct PerAnalysis {
        Analysis analysis = Analysis::Protection;
        Verdict verdict = Verdict::Pass;
        struct Failure {
            std::string site;
            std::string value;
            std::string trace_path; // where the witness trace graph was written
        };
        std::vector<Failure> failures;
    };
    std::vector<PerAnalysis> results;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// Canonical textual solution dump: "unknown := value" sorted by unknown.
std::string dump_assignment(const Cfg& cfg, const AnalysisAssignment& a);

/// Per-unknown JSON dump of the solved states and global values.
nlohmann::json states_json(const Cfg& cfg, const AnalysisAssignment& a);

} // namespace concai
