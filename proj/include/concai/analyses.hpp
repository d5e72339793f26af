#pragma once

#include <optional>

#include "concai/analysis_states.hpp"
#include "concai/solver.hpp"

namespace concai {

enum class Analysis {
    Protection,    // protecting-lockset reading, protection map from the pre-pass
    ProtectionOtf, // same, protecting locksets inferred during solving
    LockCentered,
    WriteCentered,
    Combined,
    Mine, // eager lock-import variant
};

constexpr Analysis kAllAnalyses[] = {Analysis::Protection,    Analysis::ProtectionOtf,
                                     Analysis::LockCentered,  Analysis::WriteCentered,
                                     Analysis::Combined,      Analysis::Mine};

std::string analysis_name(Analysis a);
std::optional<Analysis> parse_analysis(const std::string& name);

using AnalysisCS = solver::ConstraintSystem<AnalysisDom>;
using AnalysisAssignment = solver::Assignment<AnalysisDom>;

/// Build the side-effecting constraint system of one analysis over the
/// control-flow graphs. The lockset pre-pass bounds the PP unknown space;
/// for Analysis::Protection it also supplies the protecting locksets.
AnalysisCS build_system(const Cfg& cfg, const LocksetInfo& ls, Analysis a);

/// Roots: every reachable (point, lockset) pair.
std::vector<Unknown> analysis_roots(const Cfg& cfg, const LocksetInfo& ls);

struct AnalysisRun {
    Analysis analysis = Analysis::Protection;
    AnalysisAssignment assignment;
    solver::Stats stats;
};

/// Solve one analysis; the on-the-fly variant runs under restart supervision
/// of the inferred protecting locksets.
AnalysisRun run_analysis(const Cfg& cfg, const LocksetInfo& ls, Analysis a,
                         const solver::EngineOptions& opts = {});

// ------------------------------------------------------------- read sites

struct ReadSite {
    EdgeId edge = 0;
    std::string key; // stable across analyses: thread:line:col:x=g
    SourceLoc loc;
    VarId local = 0;
    VarId global = 0;
};

std::vector<ReadSite> read_sites(const Cfg& cfg);

struct ReadTableEntry {
    bool reachable = false;
    ValueD value; // Bot when unreachable
};

using ReadTable = std::vector<ReadTableEntry>; // parallel to read_sites(cfg)

/// Per-site values: the local's value at the read's target point, joined
/// over every reachable lockset there.
ReadTable read_table(const Cfg& cfg, const LocksetInfo& ls, const AnalysisAssignment& a);

enum class PrecisionRel { Less, Equal, Greater, Incomparable };

const char* precision_text(PrecisionRel r);
PrecisionRel compare_values(const ValueD& a, const ValueD& b);

/// Pointwise lattice comparison of two read tables over the same sites.
std::vector<PrecisionRel> compare_tables(const ReadTable& a, const ReadTable& b);

/// Abstract expression evaluation with Top propagation and the size-bounded
/// pairwise application.
ValueD eval_abstract(const Program& p, ExprId e, const AbstractEnv& env);

/// Branch pruning: a guard is unpassable only for a definite constant of the
/// wrong polarity (or an empty value).
bool guard_passes(const ValueD& cond, bool polarity);

} // namespace concai
