#pragma once

#include <variant>

#include "concai/abstract_env.hpp"
#include "concai/antichain.hpp"
#include "concai/cfg.hpp"
#include "concai/unknown.hpp"

namespace concai {

/// Shapes of the per-point local states. Every state carries the abstract
/// environment; the bottom state is recognizable by `self` being Bot, which
/// no reachable state can exhibit.
///
/// Must-style components (definitely-written sets) join by intersection, so
/// their bottom is the full set; family-valued components join as antichains.

struct StateSizes {
    std::size_t n_globals = 0;
    std::size_t n_mutexes = 0;
};

inline StateSizes sizes_of(const Cfg& cfg) { return {cfg.n_globals(), cfg.n_mutexes()}; }

// ---------------------------------------------------------------- shapes

/// Definitely-written-and-protected globals plus the environment.
struct ProtState {
    GlobalSet protected_written; // P
    AbstractEnv env;

    static ProtState bottom(const StateSizes& s, std::shared_ptr<const VarTable> vars) {
        return {GlobalSet::full(s.n_globals), AbstractEnv(std::move(vars))};
    }
    friend bool operator==(const ProtState&, const ProtState&) = default;
};

/// Per-mutex definitely-written globals (V) and acquisition backgrounds (L).
struct LockState {
    std::vector<GlobalSet> written_since; // V
    std::vector<MinAntichain> acquired_at; // L
    AbstractEnv env;

    static LockState bottom(const StateSizes& s, std::shared_ptr<const VarTable> vars) {
        return {std::vector<GlobalSet>(s.n_mutexes, GlobalSet::full(s.n_globals)),
                std::vector<MinAntichain>(s.n_mutexes), AbstractEnv(std::move(vars))};
    }
    friend bool operator==(const LockState&, const LockState&) = default;
};

/// Per-global write locksets (W) and locksets held since the last write (P).
struct WriteState {
    std::vector<MinAntichain> write_locks; // W
    std::vector<MinAntichain> since_write; // P
    AbstractEnv env;

    static WriteState bottom(const StateSizes& s, std::shared_ptr<const VarTable> vars) {
        return {std::vector<MinAntichain>(s.n_globals),
                std::vector<MinAntichain>(s.n_globals), AbstractEnv(std::move(vars))};
    }
    friend bool operator==(const WriteState&, const WriteState&) = default;
};

/// All four structures tracked at once.
struct CombinedState {
    std::vector<MinAntichain> write_locks; // W
    std::vector<MinAntichain> since_write; // P
    std::vector<GlobalSet> written_since;  // V
    std::vector<MinAntichain> acquired_at; // L
    AbstractEnv env;

    static CombinedState bottom(const StateSizes& s, std::shared_ptr<const VarTable> vars) {
        return {std::vector<MinAntichain>(s.n_globals),
                std::vector<MinAntichain>(s.n_globals),
                std::vector<GlobalSet>(s.n_mutexes, GlobalSet::full(s.n_globals)),
                std::vector<MinAntichain>(s.n_mutexes), AbstractEnv(std::move(vars))};
    }
    friend bool operator==(const CombinedState&, const CombinedState&) = default;
};

/// Possibly-written globals plus the environment.
struct MineState {
    GlobalSet written; // W (may)
    AbstractEnv env;

    static MineState bottom(const StateSizes&, std::shared_ptr<const VarTable> vars) {
        return {GlobalSet{}, AbstractEnv(std::move(vars))};
    }
    friend bool operator==(const MineState&, const MineState&) = default;
};

// ------------------------------------------------------------ lattice ops

ProtState state_join(const ProtState&, const ProtState&);
LockState state_join(const LockState&, const LockState&);
WriteState state_join(const WriteState&, const WriteState&);
CombinedState state_join(const CombinedState&, const CombinedState&);
MineState state_join(const MineState&, const MineState&);

bool state_leq(const ProtState&, const ProtState&);
bool state_leq(const LockState&, const LockState&);
bool state_leq(const WriteState&, const WriteState&);
bool state_leq(const CombinedState&, const CombinedState&);
bool state_leq(const MineState&, const MineState&);

nlohmann::json state_json(const ProtState&, const Cfg&);
nlohmann::json state_json(const LockState&, const Cfg&);
nlohmann::json state_json(const WriteState&, const Cfg&);
nlohmann::json state_json(const CombinedState&, const Cfg&);
nlohmann::json state_json(const MineState&, const Cfg&);

// ------------------------------------------------------------------ value

/// Heterogeneous value carried by the analysis constraint systems: a local
/// state at PP unknowns, an abstract value at global unknowns, a lockset
/// (ordered by superset) at the inferred-protection unknowns.
using AnalysisValue = std::variant<ProtState, LockState, WriteState, CombinedState,
                                   MineState, ValueD, LockSet>;

AnalysisValue av_join(const AnalysisValue& a, const AnalysisValue& b);
bool av_leq(const AnalysisValue& a, const AnalysisValue& b);

template <class T>
const T& av_as(const AnalysisValue& v) {
    if (const T* p = std::get_if<T>(&v)) return *p;
    throw std::logic_error("analysis value of unexpected lattice kind");
}

const AbstractEnv& av_env(const AnalysisValue& v);

/// States representing no reachable trace: `self` maps to Bot.
bool av_is_bottom_state(const AnalysisValue& v);

struct AnalysisDom {
    using Unknown = concai::Unknown;
    using Value = AnalysisValue;
    using Pattern = FamilyPattern;

    static Value join(const Value& a, const Value& b) { return av_join(a, b); }
    static bool leq(const Value& a, const Value& b) { return av_leq(a, b); }
    static bool matches(const Pattern& p, const Unknown& u) { return p.matches(u); }
    static std::size_t hash(const Unknown& u) { return u.hash(); }
    static bool eq(const Unknown& a, const Unknown& b) { return a == b; }
    static bool less(const Unknown& a, const Unknown& b) { return a < b; }
    static std::string print(const Unknown& u) { return u.print(); }
};

} // namespace concai
