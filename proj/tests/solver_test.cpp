#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "concai/solver.hpp"
#include "concai/unknown.hpp"

using namespace concai;
namespace slv = concai::solver;

namespace {

// Minimal test domain: unknowns are small ints; a value is either a grow-set
// (join = union) or, for "watched"-style unknowns, a shrink-mask ordered by
// superset (join = intersection).
struct TV {
    bool mask = false;
    std::uint64_t bits = 0;
    friend bool operator==(const TV&, const TV&) = default;
};

struct TestDom {
    using Unknown = int;
    using Value = TV;
    struct Pattern {
        int lo = 0, hi = 0; // matches unknowns in [lo, hi)
        friend bool operator==(const Pattern&, const Pattern&) = default;
    };

    static Value join(const Value& a, const Value& b) {
        REQUIRE(a.mask == b.mask);
        return a.mask ? TV{true, a.bits & b.bits} : TV{false, a.bits | b.bits};
    }
    static bool leq(const Value& a, const Value& b) {
        if (a.mask != b.mask) FAIL("kind mismatch");
        return a.mask ? (a.bits & b.bits) == b.bits : (a.bits & ~b.bits) == 0;
    }
    static bool matches(const Pattern& p, const Unknown& u) { return u >= p.lo && u < p.hi; }
    static std::size_t hash(const Unknown& u) { return std::hash<int>{}(u); }
    static bool eq(const Unknown& a, const Unknown& b) { return a == b; }
    static bool less(const Unknown& a, const Unknown& b) { return a < b; }
    static std::string print(const Unknown& u) { return "x" + std::to_string(u); }
};

using CS = slv::ConstraintSystem<TestDom>;
using View = CS::View;

TV set_of(std::initializer_list<int> xs) {
    TV v;
    for (int x : xs) v.bits |= 1ull << x;
    return v;
}

CS make_system() {
    CS cs;
    cs.bottom = [](const int&) { return TV{}; };
    return cs;
}

} // namespace

TEST_CASE("constant constraint reaches its value") {
    CS cs = make_system();
    cs.add_constraint(0, [](View&) { return set_of({5}); });
    auto r = slv::solve(cs, {0});
    CHECK(r.assignment.get(0) == set_of({5}));
    CHECK(slv::verify_post_solution(cs, r.assignment).empty());
}

TEST_CASE("side-effects are accounted at their targets") {
    CS cs = make_system();
    cs.add_constraint(0, [](View& v) {
        v.side_effect(1, set_of({1}));
        return TV{};
    });
    cs.add_seed(1, TV{});
    auto r = slv::solve(cs, {0});
    CHECK(r.assignment.get(1) == set_of({1}));
    CHECK(slv::verify_post_solution(cs, r.assignment).empty());
}

TEST_CASE("chains propagate through reads") {
    CS cs = make_system();
    cs.add_constraint(0, [](View&) { return set_of({3}); });
    cs.add_constraint(1, [](View& v) { return v.get(0); });
    cs.add_constraint(2, [](View& v) { return v.get(1); });
    auto r = slv::solve(cs, {2});
    CHECK(r.assignment.get(2) == set_of({3}));

    // a seeds-only assignment is not a post-solution of the chain
    slv::Assignment<TestDom> seeds_only({{0, set_of({3})}}, cs.bottom);
    auto violations = slv::verify_post_solution(cs, seeds_only);
    CHECK(violations.size() >= 1);
}

TEST_CASE("verify detects a lowered value") {
    CS cs = make_system();
    cs.add_constraint(0, [](View&) { return set_of({1, 2}); });
    auto r = slv::solve(cs, {0});
    CHECK(slv::verify_post_solution(cs, r.assignment).empty());
    slv::Assignment<TestDom> mutated({{0, set_of({1})}}, cs.bottom);
    auto violations = slv::verify_post_solution(cs, mutated);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].target == "x0");
}

TEST_CASE("worklist order does not affect the least solution") {
    CS cs = make_system();
    // diamond with a join and a family read
    cs.add_constraint(0, [](View&) { return set_of({0}); });
    cs.add_constraint(1, [](View& v) {
        TV d = v.get(0);
        v.side_effect(10, set_of({1}));
        return d;
    });
    cs.add_constraint(2, [](View& v) {
        TV d = v.get(0);
        v.side_effect(11, set_of({2}));
        return d;
    });
    cs.add_constraint(3, [](View& v) {
        TV acc = TestDom::join(v.get(1), v.get(2));
        for (auto& [u, val] : v.family({10, 12})) acc = TestDom::join(acc, *val);
        return acc;
    });
    slv::EngineOptions lifo, fifo;
    fifo.fifo = true;
    auto r1 = slv::solve(cs, {3}, lifo);
    auto r2 = slv::solve(cs, {3}, fifo);
    CHECK(r1.assignment.get(3) == r2.assignment.get(3));
    CHECK(r1.assignment.get(3) == set_of({0, 1, 2}));
    for (int u : {0, 1, 2, 10, 11})
        CHECK(r1.assignment.get(u) == r2.assignment.get(u));
}

TEST_CASE("unknowns unreachable from the roots stay at bottom") {
    CS cs = make_system();
    cs.add_constraint(0, [](View&) { return set_of({1}); });
    cs.add_constraint(5, [](View&) { return set_of({9}); }); // never demanded
    auto r = slv::solve(cs, {0});
    CHECK_FALSE(r.assignment.has(5));
    CHECK(r.assignment.get(5) == TV{});
}

TEST_CASE("family reads see later-materialized members") {
    CS cs = make_system();
    // unknown 0 reads the family first; unknown 1 publishes into it afterwards
    cs.add_constraint(0, [](View& v) {
        TV acc;
        for (auto& [u, val] : v.family({20, 30})) acc = TestDom::join(acc, *val);
        return acc;
    });
    cs.add_constraint(1, [](View& v) {
        v.side_effect(25, set_of({7}));
        return TV{};
    });
    auto r = slv::solve(cs, {0, 1});
    CHECK(r.assignment.get(0) == set_of({7}));
}

TEST_CASE("evaluation budget aborts with a diagnostic") {
    CS cs = make_system();
    // two unknowns feeding each other an ever-growing set via side effects
    cs.add_constraint(0, [](View& v) {
        TV d = v.get(1);
        return TV{false, (d.bits << 1) | 1};
    });
    cs.add_constraint(1, [](View& v) { return v.get(0); });
    slv::EngineOptions opts;
    opts.max_rhs_evaluations = 40;
    CHECK_THROWS_AS(slv::solve(cs, {0}, opts), slv::BudgetExceeded);
    try {
        slv::solve(cs, {0}, opts);
    } catch (const slv::BudgetExceeded& e) {
        CHECK(std::string(e.what()).find("growing") != std::string::npos);
    }
}

TEST_CASE("restarts discard stale values when a watched mask shrinks") {
    // Unknown 100 is a shrink-mask (bottom = all ones). Unknown 0 publishes
    // into 50 only while bit 3 is still in the mask, and narrows the mask to
    // bits {0,1}. Without a restart, 50 keeps the stale publication.
    CS cs;
    cs.bottom = [](const int& u) { return u == 100 ? TV{true, ~0ull} : TV{}; };
    cs.add_constraint(0, [](View& v) {
        TV mask = v.get(100);
        if (mask.bits & (1ull << 3)) v.side_effect(50, set_of({9}));
        v.side_effect(100, TV{true, set_of({0, 1}).bits});
        return TV{};
    });

    auto r = slv::solve_with_restarts(cs, {0}, {100}, 4);
    CHECK(r.stats.restarts == 1);
    CHECK(r.assignment.get(100) == TV{true, set_of({0, 1}).bits});
    CHECK(r.assignment.get(50) == TV{}); // stale effect was discarded
    CHECK(slv::verify_post_solution(cs, r.assignment).empty());

    // with no watched change there is no restart
    CS stable;
    stable.bottom = cs.bottom;
    stable.add_constraint(0, [](View& v) {
        v.side_effect(50, set_of({2}));
        return TV{};
    });
    auto r2 = slv::solve_with_restarts(stable, {0}, {100}, 4);
    CHECK(r2.stats.restarts == 0);
    CHECK(r2.assignment.get(50) == set_of({2}));
}

TEST_CASE("restart budget is enforced") {
    // the mask strictly shrinks on every round, one bit at a time
    CS cs;
    cs.bottom = [](const int& u) { return u == 100 ? TV{true, 0xff} : TV{}; };
    cs.add_constraint(0, [](View& v) {
        TV mask = v.get(100);
        v.side_effect(100, TV{true, mask.bits >> 1});
        return TV{};
    });
    CHECK_THROWS_AS(slv::solve_with_restarts(cs, {0}, {100}, 2), slv::BudgetExceeded);
}

TEST_CASE("analysis unknown identity, ordering and printing") {
    LockSet s01 = LockSet{}.with(0).with(1);
    Unknown a = Unknown::pp(3, s01);
    Unknown b = Unknown::pp(3, s01);
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
    CHECK_FALSE(a < b);
    Unknown c = Unknown::sync_g(0, 2, LockSet{}.with(1));
    Unknown d = Unknown::write_g(0, 2, LockSet{}.with(1), s01);
    CHECK(a < c);
    CHECK(c < d);
    CHECK(a.print() == "[u3,{m0,m1}]");
    CHECK(c.print() == "[g0,m2,{m1}]");
    CHECK(Unknown::m_prot(1).print() == "M[g1]");
    CHECK(Unknown::prot_g_unprot(0).print() == "[g0]'");

    FamilyPattern pat{Unknown::Kind::SyncG, 0, 2};
    CHECK(pat.matches(c));
    CHECK_FALSE(pat.matches(d));
    CHECK_FALSE(pat.matches(Unknown::sync_g(1, 2, LockSet{})));
}
