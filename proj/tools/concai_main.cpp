#include <iostream>

#include "CLI11.hpp"
#include "concai/cli.hpp"

namespace {

concai::cli::Format parse_format(const std::string& f) {
    if (f == "json") return concai::cli::Format::Json;
    if (f == "table") return concai::cli::Format::Table;
    if (f == "dot") return concai::cli::Format::Dot;
    throw CLI::ValidationError("--format", "expected json, table or dot");
}

void add_common(CLI::App* cmd, concai::cli::Options& opts, std::string& format) {
    cmd->add_option("--format", format, "output format: json, table or dot")
        ->default_val("json");
    cmd->add_option("--bound", opts.bound, "per-thread event bound for trace enumeration")
        ->default_val(32);
    cmd->add_option("--input-set", opts.input_set,
                    "values input() may yield during enumeration (comma separated)")
        ->delimiter(',');
    cmd->add_flag("--trace-solver", opts.trace_solver,
                  "stream solver evaluations to stderr");
    cmd->add_flag("--dump-states", opts.dump_states, "include solved states in the report");
    cmd->add_flag("--dump-traces", opts.dump_traces,
                  "emit enumerated traces as DOT graphs (oracle)");
    cmd->add_flag("--timings", opts.timings, "include wall-clock timings in JSON output");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thread-modular value analyses for a small concurrent language"};
    app.require_subcommand(1);

    concai::cli::Options opts;
    concai::cli::apply_env_budget(opts);
    std::string format = "json";

    std::string run_path, run_analysis = "protection";
    CLI::App* run = app.add_subcommand("run", "run one analysis and print its read table");
    run->add_option("program", run_path, "program file")->required();
    run->add_option("--analysis", run_analysis,
                    "protection, protection-otf, lock, write, combined or mine")
        ->default_val("protection");
    add_common(run, opts, format);

    std::string cmp_path;
    std::vector<std::string> cmp_analyses;
    CLI::App* cmp = app.add_subcommand("compare", "compare the precision of analyses");
    cmp->add_option("program", cmp_path, "program file")->required();
    cmp->add_option("--analyses", cmp_analyses, "analyses to compare (comma separated)")
        ->delimiter(',')
        ->required();
    add_common(cmp, opts, format);

    std::string orc_path;
    std::vector<std::string> orc_analyses;
    CLI::App* orc = app.add_subcommand(
        "oracle", "check analyses against the bounded concrete trace semantics");
    orc->add_option("program", orc_path, "program file")->required();
    orc->add_option("--analyses", orc_analyses,
                    "analyses to check (default: all)")
        ->delimiter(',');
    add_common(orc, opts, format);

    CLI11_PARSE(app, argc, argv);
    opts.format = parse_format(format);

    if (run->parsed())
        return concai::cli::cmd_run(run_path, run_analysis, opts, std::cout, std::cerr);
    if (cmp->parsed())
        return concai::cli::cmd_compare(cmp_path, cmp_analyses, opts, std::cout, std::cerr);
    return concai::cli::cmd_oracle(orc_path, orc_analyses, opts, std::cout, std::cerr);
}
