#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "concai/antichain.hpp"
#include "concai/cfg.hpp"

namespace concai {

/// Thread identity by creation history: the root thread is the empty path;
/// a thread created by the k-th event of its parent appends k.
struct ThreadId {
    std::vector<std::uint32_t> path;

    bool is_root() const { return path.empty(); }
    ThreadId child(std::uint32_t event_index) const {
        ThreadId c = *this;
        c.path.push_back(event_index);
        return c;
    }
    ThreadId parent() const {
        ThreadId p = *this;
        p.path.pop_back();
        return p;
    }

    friend bool operator==(const ThreadId&, const ThreadId&) = default;
    friend bool operator<(const ThreadId& a, const ThreadId& b) { return a.path < b.path; }

    std::string to_string() const {
        std::string s = "0";
        for (auto k : path) s += "." + std::to_string(k);
        return s;
    }
};

using ConcreteVal = std::variant<std::int64_t, ThreadId>;

std::string concrete_val_to_string(const ConcreteVal& v);

/// Concrete local state: total over the locals (globals are not part of it).
struct ConcreteState {
    std::vector<ConcreteVal> locals; // indexed by VarId - n_globals

    friend bool operator==(const ConcreteState&, const ConcreteState&) = default;
};

struct TraceStep {
    EdgeId edge = 0;
    ConcreteState post;
    friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct ThreadTrace {
    ThreadId id;
    PointId start = 0;
    ConcreteState init;
    std::vector<TraceStep> steps;

    std::size_t n_nodes() const { return steps.size() + 1; }
    const ConcreteState& state_at(std::size_t j) const {
        return j == 0 ? init : steps[j - 1].post;
    }
};

struct NodeRef {
    std::uint32_t thread = 0; // index into LocalTrace::threads()
    std::uint32_t index = 0;  // node index within the thread (0 = start)
    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct ChainLink {
    NodeRef from; // unlock node, or the root's initial node for a first lock
    NodeRef to;   // lock node
    friend bool operator==(const ChainLink&, const ChainLink&) = default;
};

class TraceBudgetExceeded : public std::runtime_error {
public:
    explicit TraceBudgetExceeded(const std::string& m) : std::runtime_error(m) {}
};

/// A local trace: the events causally preceding the current configuration of
/// one thread (the ego thread), as per-thread event sequences joined by
/// create edges and per-mutex locking chains. Immutable; identity is the
/// canonical encoding.
class LocalTrace {
public:
    struct Data {
        std::vector<ThreadTrace> threads;
        std::vector<std::vector<ChainLink>> chains; // per mutex
        std::uint32_t ego = 0;
    };

    static std::shared_ptr<const LocalTrace> make(const Cfg& cfg, Data d);

    const std::vector<ThreadTrace>& threads() const { return d_.threads; }
    const std::vector<std::vector<ChainLink>>& chains() const { return d_.chains; }
    std::uint32_t ego_index() const { return d_.ego; }
    const ThreadTrace& ego() const { return d_.threads[d_.ego]; }

    bool is_initial() const { return d_.threads.size() == 1 && ego().steps.empty(); }
    const ThreadId& id() const { return ego().id; }
    NodeRef sink() const {
        return {d_.ego, static_cast<std::uint32_t>(ego().steps.size())};
    }
    const ConcreteState& sink_state() const { return ego().state_at(ego().steps.size()); }
    PointId loc(const Cfg& cfg) const {
        return ego().steps.empty() ? ego().start : cfg.edges[ego().steps.back().edge].dst;
    }
    /// Action of the ego thread's last event, or nullopt for fresh threads.
    std::optional<EdgeId> last_edge() const {
        if (ego().steps.empty()) return std::nullopt;
        return ego().steps.back().edge;
    }

    PointId point_of(const Cfg& cfg, NodeRef n) const {
        const ThreadTrace& t = d_.threads[n.thread];
        return n.index == 0 ? t.start : cfg.edges[t.steps[n.index - 1].edge].dst;
    }
    const ConcreteState& state_of(NodeRef n) const {
        return d_.threads[n.thread].state_at(n.index);
    }

    const std::string& key() const { return key_; }
    std::size_t hash() const { return hash_; }

    friend bool operator==(const LocalTrace& a, const LocalTrace& b) {
        return a.key_ == b.key_;
    }

    std::string to_dot(const Cfg& cfg) const;

private:
    LocalTrace(Data d, std::string key)
        : d_(std::move(d)), key_(std::move(key)), hash_(std::hash<std::string>{}(key_)) {}
    Data d_;
    std::string key_;
    std::size_t hash_;
};

using TracePtr = std::shared_ptr<const LocalTrace>;

struct TraceConfig {
    std::vector<std::int64_t> input_values = {0, 1};
    std::uint32_t max_events_per_thread = 32;
    std::size_t max_traces = 100000;
};

/// Concrete expression evaluation; arithmetic is 64-bit wrapping, comparisons
/// yield 0/1. Type-correct programs never mix thread ids into arithmetic.
ConcreteVal eval_concrete(const Program& p, ExprId e, const ConcreteState& sigma,
                          const VarTable& vars);

/// The single initial trace: root thread at the main entry, locals zero.
TracePtr initial_trace(const Cfg& cfg);

/// Check every trace axiom: per-thread replay against the control-flow
/// graph, create-order and locking-order cardinalities, causality (acyclic,
/// unique least element, unique sink), and globals consistency. Returns an
/// error description, or nullopt when the trace is valid.
std::optional<std::string> validate_trace(const Cfg& cfg, const TraceConfig& conf,
                                          const LocalTrace& t);

/// Unary edge application (guard, assignment, input, global access, unlock).
/// Failed guards and undefined transitions yield the empty set; an invalid
/// produced trace is a hard error.
std::vector<TracePtr> step_unary(const Cfg& cfg, const TraceConfig& conf, EdgeId e,
                                 const TracePtr& t);

struct CreateResult {
    std::vector<TracePtr> extended;
    std::vector<TracePtr> spawned;
};
CreateResult step_create(const Cfg& cfg, const TraceConfig& conf, EdgeId e, const TracePtr& t);

/// Binary lock application: merge t0 (at the lock edge) with t1 (an initial
/// trace or one ending in the matching unlock) and extend by the lock event.
/// Incompatible merges yield the empty set.
std::vector<TracePtr> step_lock(const Cfg& cfg, const TraceConfig& conf, EdgeId e,
                                const TracePtr& t0, const TracePtr& t1);

/// All local traces with at most k events per thread, from a worklist
/// fixpoint over the step operations. Deduplicated canonically; throws
/// TraceBudgetExceeded past conf.max_traces.
std::vector<TracePtr> enumerate_global(const Cfg& cfg, const TraceConfig& conf);

/// Sub-trace of everything causally below node n (inclusive); the node's
/// thread becomes the ego thread.
TracePtr prefix_at(const Cfg& cfg, const LocalTrace& t, NodeRef n);

// ----------------------------------------------------------- trace queries

struct WriteEvent {
    NodeRef post;      // node after the write edge
    VarId global = 0;
    ConcreteVal value; // value written
};

struct TraceQueries {
    std::vector<std::optional<WriteEvent>> last_write;    // per global, w.r.t. causality
    std::vector<std::optional<WriteEvent>> last_tl_write; // per global, ego thread only
    std::vector<std::optional<NodeRef>> last_tl_lock;     // per mutex: node before the lock
    LockSet sink_lockset;
};

TraceQueries trace_queries(const Cfg& cfg, const LocalTrace& t);

/// Lockset held by a node's thread at that node.
LockSet lockset_at(const Cfg& cfg, const LocalTrace& t, NodeRef n);

/// Minimal locksets the ego thread has held from node n (inclusive) to the
/// sink. n must lie on the ego thread.
MinAntichain min_lockset_since(const Cfg& cfg, const LocalTrace& t, NodeRef n);

/// Values written by the last thread-local write to g across a set of traces.
std::vector<ConcreteVal> eval_last_tl_writes(const Cfg& cfg, VarId g,
                                             const std::vector<TracePtr>& traces);

// ------------------------------------------------ abstraction extractors

struct BetaLock {
    std::vector<GlobalSet> written_since_lock;        // V: per mutex
    std::vector<std::optional<LockSet>> lock_background; // L: per mutex, singleton or none
    std::vector<std::optional<ConcreteVal>> sigma;    // per var; globals may be absent
};

struct BetaWrite {
    std::vector<std::optional<LockSet>> write_locks; // W: per global, singleton or none
    std::vector<MinAntichain> since_write;           // P: per global
    std::vector<std::optional<ConcreteVal>> sigma;
};

BetaLock beta_lock(const Cfg& cfg, const LocalTrace& t);
BetaWrite beta_write(const Cfg& cfg, const LocalTrace& t);

} // namespace concai
