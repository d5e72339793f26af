#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "concai/report.hpp"

namespace concai::cli {

enum class Format { Json, Table, Dot };

struct Options {
    Format format = Format::Json;
    std::uint32_t bound = 32;            // per-thread event bound for enumeration
    std::vector<std::int64_t> input_set = {0, 1};
    bool trace_solver = false;
    bool dump_states = false;
    bool dump_traces = false;
    bool timings = false;
    std::uint64_t solver_budget = 1'000'000; // CONC_AI_BUDGET overrides
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;  // parse or validation failure
inline constexpr int kExitBudget = 2;      // solver or enumeration budget

/// Apply the CONC_AI_BUDGET environment override, if present.
void apply_env_budget(Options& opts);

int cmd_run(const std::string& path, const std::string& analysis, const Options& opts,
            std::ostream& out, std::ostream& err);

int cmd_compare(const std::string& path, const std::vector<std::string>& analyses,
                const Options& opts, std::ostream& out, std::ostream& err);

int cmd_oracle(const std::string& path, const std::vector<std::string>& analyses,
               const Options& opts, std::ostream& out, std::ostream& err);

} // namespace concai::cli
