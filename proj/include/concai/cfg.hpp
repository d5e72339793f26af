#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "concai/ast.hpp"
#include "concai/small_set.hpp"

namespace concai {

/// Control-flow edge action. Guard carries a polarity: the edge is taken
/// when the expression's truth value matches it (0 is false).
struct Action {
    enum class Kind : std::uint8_t {
        Guard, Assign, Input, Create, Lock, Unlock, Write, Read,
    };
    Kind kind = Kind::Guard;
    ExprId expr = 0;          // Guard condition / Assign rhs
    bool polarity = true;     // Guard
    VarId x = 0;              // Assign/Input/Create/Read target
    VarId g = 0;              // Write/Read global
    WriteSrc src;             // Write operand
    std::uint32_t thread = 0; // Create: target thread index
    PointId entry = 0;        // Create: target thread entry point
    MutexId m = 0;            // Lock/Unlock
    bool synthetic = false;
};

struct CfgEdge {
    PointId src = 0;
    PointId dst = 0;
    Action act;
    SourceLoc loc;
};

struct CfgPoint {
    std::uint32_t thread = 0;
    SourceLoc loc;
};

/// Per-thread control-flow graphs over a shared, source-ordered point space.
/// The mutex table covers user mutexes plus one dedicated mutex per global.
struct Cfg {
    std::shared_ptr<const Program> program;
    std::vector<CfgPoint> points;
    std::vector<CfgEdge> edges;
    std::vector<std::vector<EdgeId>> out_edges; // per point
    std::vector<PointId> thread_entry;          // per thread index
    std::vector<std::string> mutex_names;       // user mutexes then m_<g>
    std::size_t n_user_mutexes = 0;

    std::size_t n_mutexes() const { return mutex_names.size(); }
    std::size_t n_globals() const { return program->n_globals(); }
    const VarTable& vars() const { return *program->vars; }

    MutexId dedicated_mutex(VarId g) const {
        return static_cast<MutexId>(n_user_mutexes + g);
    }
    bool is_dedicated(MutexId m) const { return m >= n_user_mutexes; }
    PointId main_entry() const { return thread_entry[program->main_index]; }

    std::string point_name(PointId u) const { return "u" + std::to_string(u); }
    std::string action_text(const Action& a) const;
    std::string lockset_text(LockSet s) const;
    std::string to_dot() const;
};

/// Lower an instrumented program to control-flow graphs. Guards are emitted
/// for both branch polarities; thread entry points never have incoming edges
/// (a loop as the first statement of a thread is rejected).
Cfg build_cfg(Program p);

/// Successor lockset of an edge, or nullopt when the transition is dead
/// (re-locking a held mutex, unlocking one not held).
std::optional<LockSet> lockset_after(const Action& a, LockSet held);

/// Locksets syntactically reachable per program point plus the protecting
/// lockset of each global, computed value-blind (all guards passable).
struct LocksetInfo {
    std::vector<std::vector<LockSet>> at_point;     // per point, sorted
    std::vector<LockSet> protecting;                // per global
    std::vector<std::pair<EdgeId, LockSet>> dead;   // diagnostics
    bool reachable(PointId u, LockSet s) const;
};

LocksetInfo reachable_locksets(const Cfg& c);

} // namespace concai
