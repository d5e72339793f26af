#pragma once

#include "concai/solver.hpp"
#include "concai/traces.hpp"

namespace concai {

/// Canonically sorted set of local traces (the trace-set lattice: union as
/// join, inclusion as order, empty set as bottom).
class TraceSet {
public:
    TraceSet() = default;

    static TraceSet of(const std::vector<TracePtr>& ts) {
        TraceSet s;
        for (const auto& t : ts) s.insert(t);
        return s;
    }

    bool insert(const TracePtr& t) {
        auto it = std::lower_bound(items_.begin(), items_.end(), t, key_less);
        if (it != items_.end() && (*it)->key() == t->key()) return false;
        items_.insert(it, t);
        return true;
    }
    bool contains(const TracePtr& t) const {
        auto it = std::lower_bound(items_.begin(), items_.end(), t, key_less);
        return it != items_.end() && (*it)->key() == t->key();
    }

    const std::vector<TracePtr>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }

    friend TraceSet ts_join(const TraceSet& a, const TraceSet& b) {
        TraceSet out = a;
        for (const auto& t : b.items_) out.insert(t);
        return out;
    }
    friend bool ts_leq(const TraceSet& a, const TraceSet& b) {
        for (const auto& t : a.items_)
            if (!b.contains(t)) return false;
        return true;
    }
    friend bool operator==(const TraceSet& a, const TraceSet& b) {
        if (a.items_.size() != b.items_.size()) return false;
        for (std::size_t i = 0; i < a.items_.size(); ++i)
            if (a.items_[i]->key() != b.items_[i]->key()) return false;
        return true;
    }

private:
    static bool key_less(const TracePtr& x, const TracePtr& y) { return x->key() < y->key(); }
    std::vector<TracePtr> items_;
};

/// Unknowns of the per-point trace-set constraint system: one per program
/// point, one per mutex (the latter populated by unlock side-effects).
struct TraceUnknown {
    enum class Kind : std::uint8_t { Point, Mutex } kind = Kind::Point;
    std::uint32_t id = 0;

    static TraceUnknown point(PointId u) { return {Kind::Point, u}; }
    static TraceUnknown mutex(MutexId m) { return {Kind::Mutex, m}; }
    friend bool operator==(const TraceUnknown&, const TraceUnknown&) = default;
    friend bool operator<(const TraceUnknown& a, const TraceUnknown& b) {
        return std::tie(a.kind, a.id) < std::tie(b.kind, b.id);
    }
};

struct TraceDom {
    using Unknown = TraceUnknown;
    using Value = TraceSet;
    struct Pattern {
        friend bool operator==(const Pattern&, const Pattern&) = default;
    };

    static Value join(const Value& a, const Value& b) { return ts_join(a, b); }
    static bool leq(const Value& a, const Value& b) { return ts_leq(a, b); }
    static bool matches(const Pattern&, const Unknown&) { return false; }
    static std::size_t hash(const Unknown& u) {
        return std::hash<std::uint64_t>{}((std::uint64_t(u.kind) << 32) | u.id);
    }
    static bool eq(const Unknown& a, const Unknown& b) { return a == b; }
    static bool less(const Unknown& a, const Unknown& b) { return a < b; }
    static std::string print(const Unknown& u) {
        return (u.kind == TraceUnknown::Kind::Point ? "[u" : "[mutex") +
               std::to_string(u.id) + "]";
    }
};

using TraceCS = solver::ConstraintSystem<TraceDom>;
using TraceAssignment = solver::Assignment<TraceDom>;

/// The per-point formulation of the bounded trace semantics as a
/// side-effecting constraint system over [u] and [a] unknowns.
TraceCS build_trace_system(const Cfg& cfg, const TraceConfig& conf);

struct LocalEnumeration {
    TraceAssignment assignment;
    solver::Stats stats;
    TraceSet at_point(PointId u) const { return assignment.get(TraceUnknown::point(u)); }
    TraceSet at_mutex(MutexId m) const { return assignment.get(TraceUnknown::mutex(m)); }
};

/// Solve the per-point system with the generic engine; the result assigns a
/// trace set to every program point and mutex.
LocalEnumeration enumerate_local(const Cfg& cfg, const TraceConfig& conf,
                                 const solver::EngineOptions& opts = {});

} // namespace concai
