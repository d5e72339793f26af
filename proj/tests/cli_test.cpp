#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "concai/cli.hpp"
#include "test_util.hpp"

using namespace concai;
namespace cli = concai::cli;

namespace {

struct Capture {
    std::ostringstream out, err;
};

int run_cmd(const std::string& path, const std::string& analysis, Capture& cap,
            cli::Options opts = {}) {
    return cli::cmd_run(path, analysis, opts, cap.out, cap.err);
}

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = "/tmp/" + name;
    std::ofstream f(path);
    f << text;
    return path;
}

} // namespace

TEST_CASE("run reports the read table as json") {
    Capture cap;
    int rc = run_cmd(test::corpus_path("ex1.toy"), "protection", cap);
    CHECK(rc == cli::kExitOk);
    auto j = nlohmann::json::parse(cap.out.str());
    CHECK(j["analysis"] == "protection");
    CHECK(j["sites"][0]["value"]["set"] == nlohmann::json::array({0, 17}));
    CHECK(j.contains("stats"));
    CHECK_FALSE(j.contains("wall_ms")); // timings only on request
}

TEST_CASE("json reports are byte-identical across runs") {
    for (const char* program : {"ex1.toy", "ex-4.3.toy", "two_locksets.toy"}) {
        for (const char* analysis : {"protection", "protection-otf", "combined"}) {
            Capture a, b;
            CHECK(run_cmd(test::corpus_path(program), analysis, a) == cli::kExitOk);
            CHECK(run_cmd(test::corpus_path(program), analysis, b) == cli::kExitOk);
            CHECK(a.out.str() == b.out.str());
        }
    }
    Capture c1, c2;
    cli::Options opts;
    CHECK(cli::cmd_compare(test::corpus_path("ex-4.3.toy"), {"write", "lock", "protection"},
                           opts, c1.out, c1.err) == cli::kExitOk);
    CHECK(cli::cmd_compare(test::corpus_path("ex-4.3.toy"), {"write", "lock", "protection"},
                           opts, c2.out, c2.err) == cli::kExitOk);
    CHECK(c1.out.str() == c2.out.str());

    Capture o1, o2;
    CHECK(cli::cmd_oracle(test::corpus_path("handoff.toy"), {}, opts, o1.out, o1.err) ==
          cli::kExitOk);
    CHECK(cli::cmd_oracle(test::corpus_path("handoff.toy"), {}, opts, o2.out, o2.err) ==
          cli::kExitOk);
    CHECK(o1.out.str() == o2.out.str());
}

TEST_CASE("malformed input exits with code 1 and a location") {
    std::string path = write_temp("concai_bad.toy", "global g; thread main { x = ; }");
    Capture cap;
    CHECK(run_cmd(path, "protection", cap) == cli::kExitInputError);
    CHECK(cap.err.str().find("1:") != std::string::npos);

    Capture cap2;
    CHECK(run_cmd("/nonexistent/file.toy", "protection", cap2) == cli::kExitInputError);

    Capture cap3;
    CHECK(run_cmd(test::corpus_path("ex1.toy"), "nonsense", cap3) == cli::kExitInputError);
}

TEST_CASE("solver budget exhaustion exits with code 2") {
    Capture cap;
    cli::Options opts;
    opts.solver_budget = 1;
    CHECK(run_cmd(test::corpus_path("ex1.toy"), "protection", cap, opts) == cli::kExitBudget);
    CHECK(cap.err.str().find("budget") != std::string::npos);
}

TEST_CASE("environment variable overrides the solver budget") {
    setenv("CONC_AI_BUDGET", "77", 1);
    cli::Options opts;
    cli::apply_env_budget(opts);
    CHECK(opts.solver_budget == 77);
    unsetenv("CONC_AI_BUDGET");
    cli::Options opts2;
    opts2.solver_budget = 5;
    cli::apply_env_budget(opts2);
    CHECK(opts2.solver_budget == 5);
}

TEST_CASE("compare validates its analysis list") {
    Capture cap;
    cli::Options opts;
    CHECK(cli::cmd_compare(test::corpus_path("ex1.toy"), {"protection"}, opts, cap.out,
                           cap.err) == cli::kExitInputError);
    Capture cap2;
    CHECK(cli::cmd_compare(test::corpus_path("ex1.toy"), {"protection", "protection"}, opts,
                           cap2.out, cap2.err) == cli::kExitOk);
    auto j = nlohmann::json::parse(cap2.out.str());
    CHECK(j["sites"][0]["matrix"][0][1] == "=");
    CHECK(j["summary"]["all_tied"] == 1);
}

TEST_CASE("oracle with a tiny bound passes on the reachable prefix") {
    Capture cap;
    cli::Options opts;
    opts.bound = 1;
    CHECK(cli::cmd_oracle(test::corpus_path("ex1.toy"), {"protection"}, opts, cap.out,
                          cap.err) == cli::kExitOk);
    auto j = nlohmann::json::parse(cap.out.str());
    CHECK(j["verdict"] == "PASS");
    CHECK(j["truncated"] == true);
}

TEST_CASE("dot and state dumps") {
    Capture cap;
    cli::Options opts;
    opts.format = cli::Format::Dot;
    CHECK(run_cmd(test::corpus_path("ex2.toy"), "protection", cap, opts) == cli::kExitOk);
    CHECK(cap.out.str().find("digraph cfg") != std::string::npos);

    Capture cap2;
    cli::Options opts2;
    opts2.dump_states = true;
    CHECK(run_cmd(test::corpus_path("straight_line.toy"), "write", cap2, opts2) ==
          cli::kExitOk);
    auto j = nlohmann::json::parse(cap2.out.str());
    CHECK(j.contains("states"));
    CHECK(j["states"].size() > 0);

    Capture cap3;
    cli::Options opts3;
    opts3.dump_traces = true;
    opts3.format = cli::Format::Table;
    CHECK(cli::cmd_oracle(test::corpus_path("ex2.toy"), {"protection"}, opts3, cap3.out,
                          cap3.err) == cli::kExitOk);
    CHECK(cap3.out.str().find("digraph trace") != std::string::npos);
}

TEST_CASE("timings appear only when requested") {
    Capture cap;
    cli::Options opts;
    opts.timings = true;
    CHECK(run_cmd(test::corpus_path("ex1.toy"), "lock", cap, opts) == cli::kExitOk);
    auto j = nlohmann::json::parse(cap.out.str());
    CHECK(j.contains("wall_ms"));
}
