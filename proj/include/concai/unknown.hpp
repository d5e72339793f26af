#pragma once

#include <cstdint>
#include <string>
#include <tuple>

#include "concai/small_set.hpp"

namespace concai {

/// Constraint-system unknowns shared by all value analyses:
///   PP(u, S)          local state at program point u under held lockset S
///   ProtG(g)          protected-access value of global g
///   ProtGUnprot(g)    unprotected-access value of global g
///   SyncG(g, a, S)    value of g published at unlock(a) under background S
///   WriteG(g, a, S, w) as SyncG, keyed also by the lockset w of the last write
///   MProt(g)          inferred protecting lockset of g (ordered by superset)
struct Unknown {
    enum class Kind : std::uint8_t { PP, ProtG, ProtGUnprot, SyncG, WriteG, MProt };

    Kind kind = Kind::PP;
    PointId point = 0;
    LockSet held;
    VarId global = 0;
    MutexId mutex = 0;
    LockSet background;
    LockSet write_locks;

    static Unknown pp(PointId u, LockSet s) {
        Unknown x;
        x.kind = Kind::PP;
        x.point = u;
        x.held = s;
        return x;
    }
    static Unknown prot_g(VarId g) {
        Unknown x;
        x.kind = Kind::ProtG;
        x.global = g;
        return x;
    }
    static Unknown prot_g_unprot(VarId g) {
        Unknown x;
        x.kind = Kind::ProtGUnprot;
        x.global = g;
        return x;
    }
    static Unknown sync_g(VarId g, MutexId a, LockSet background) {
        Unknown x;
        x.kind = Kind::SyncG;
        x.global = g;
        x.mutex = a;
        x.background = background;
        return x;
    }
    static Unknown write_g(VarId g, MutexId a, LockSet background, LockSet write_locks) {
        Unknown x;
        x.kind = Kind::WriteG;
        x.global = g;
        x.mutex = a;
        x.background = background;
        x.write_locks = write_locks;
        return x;
    }
    static Unknown m_prot(VarId g) {
        Unknown x;
        x.kind = Kind::MProt;
        x.global = g;
        return x;
    }

    friend bool operator==(const Unknown&, const Unknown&) = default;

    friend bool operator<(const Unknown& a, const Unknown& b) {
        auto key = [](const Unknown& u) {
            return std::tuple(static_cast<int>(u.kind), u.point, u.global, u.mutex,
                              u.held.bits(), u.background.bits(), u.write_locks.bits());
        };
        return key(a) < key(b);
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(kind);
        auto mix = [&h](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        mix(point);
        mix(global);
        mix(mutex);
        mix(held.bits());
        mix(background.bits());
        mix(write_locks.bits());
        return h;
    }

    /// Raw rendering with numeric ids (context-free; dumps with names are
    /// produced by the reporting layer).
    std::string print() const;
};

/// Selector for family reads: all written unknowns of one kind for a fixed
/// global and mutex.
struct FamilyPattern {
    Unknown::Kind kind = Unknown::Kind::SyncG;
    VarId global = 0;
    MutexId mutex = 0;

    friend bool operator==(const FamilyPattern&, const FamilyPattern&) = default;

    bool matches(const Unknown& u) const {
        return u.kind == kind && u.global == global && u.mutex == mutex;
    }
};

} // namespace concai
