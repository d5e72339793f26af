#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace concai::solver {

struct EngineOptions {
    std::uint64_t max_rhs_evaluations = 1'000'000;
    bool fifo = false; // default worklist discipline is LIFO with a dirty set
    std::function<void(const std::string& unknown, std::size_t n_deps, bool changed)> trace;
};

struct Stats {
    std::uint64_t rhs_evaluations = 0;
    std::uint64_t unknowns_materialized = 0;
    std::uint64_t value_changes = 0;
    std::uint64_t restarts = 0;
};

enum class SolveStatus { Done, BudgetExceeded, WatchedGrew };

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(std::string msg) : std::runtime_error(std::move(msg)) {}
};

struct Violation {
    std::string constraint; // textual left-hand side
    std::string target;     // unknown whose value fails to account for the rhs
    std::string detail;
};

/// A domain bundles the unknown/value/pattern types of one constraint system
/// family together with their lattice and identity operations:
///
///   struct Dom {
///     using Unknown = ...;   // hashable, totally ordered, printable
///     using Value = ...;
///     using Pattern = ...;   // family-read selector
///     static Value join(const Value&, const Value&);
///     static bool leq(const Value&, const Value&);
///     static bool matches(const Pattern&, const Unknown&);
///     static std::size_t hash(const Unknown&);
///     static bool eq(const Unknown&, const Unknown&);
///     static bool less(const Unknown&, const Unknown&);
///     static std::string print(const Unknown&);
///   };
template <class Dom>
class ConstraintSystem {
public:
    using Unknown = typename Dom::Unknown;
    using Value = typename Dom::Value;
    using Pattern = typename Dom::Pattern;

    /// Read/write window a right-hand side evaluates against. Reads are
    /// tracked as dependencies; side effects join into their targets.
    struct View {
        virtual const Value& get(const Unknown& u) = 0;
        virtual std::vector<std::pair<Unknown, const Value*>> family(const Pattern& p) = 0;
        virtual void side_effect(const Unknown& target, Value v) = 0;
        virtual ~View() = default;
    };

    using Rhs = std::function<Value(View&)>;

    std::function<Value(const Unknown&)> bottom;
    std::vector<std::pair<Unknown, Value>> seeds;
    std::vector<std::pair<Unknown, std::vector<Rhs>>> constraints;

    void add_constraint(Unknown lhs, Rhs rhs) {
        for (auto& [u, list] : constraints)
            if (Dom::eq(u, lhs)) {
                list.push_back(std::move(rhs));
                return;
            }
        constraints.emplace_back(std::move(lhs), std::vector<Rhs>{std::move(rhs)});
    }
    void add_seed(Unknown u, Value v) { seeds.emplace_back(std::move(u), std::move(v)); }
};

/// Final assignment: unknowns materialized during solving, plus the bottom
/// value for everything else.
template <class Dom>
class Assignment {
public:
    using Unknown = typename Dom::Unknown;
    using Value = typename Dom::Value;

    Assignment() = default;
    Assignment(std::vector<std::pair<Unknown, Value>> entries,
               std::function<Value(const Unknown&)> bottom)
        : entries_(std::move(entries)), bottom_(std::move(bottom)) {
        std::sort(entries_.begin(), entries_.end(),
                  [](const auto& a, const auto& b) { return Dom::less(a.first, b.first); });
    }

    bool has(const Unknown& u) const { return find(u) != nullptr; }

    Value get(const Unknown& u) const {
        if (const Value* v = find(u)) return *v;
        return bottom_(u);
    }

    const std::vector<std::pair<Unknown, Value>>& entries() const { return entries_; }

    std::string dump(const std::function<std::string(const Unknown&, const Value&)>& fmt) const {
        std::string out;
        for (const auto& [u, v] : entries_) out += fmt(u, v) + "\n";
        return out;
    }

private:
    const Value* find(const Unknown& u) const {
        auto it = std::lower_bound(
            entries_.begin(), entries_.end(), u,
            [](const auto& e, const Unknown& k) { return Dom::less(e.first, k); });
        if (it != entries_.end() && Dom::eq(it->first, u)) return &it->second;
        return nullptr;
    }

    std::vector<std::pair<Unknown, Value>> entries_;
    std::function<Value(const Unknown&)> bottom_ = [](const Unknown&) -> Value {
        throw std::logic_error("empty assignment");
    };
};

/// Demand-driven worklist solver. Dependencies (plain and family-pattern)
/// are re-recorded on every evaluation; side-effect targets are joined and
/// their readers rescheduled. Budget overruns report the fastest-growing
/// unknowns.
template <class Dom>
class Engine {
public:
    using CS = ConstraintSystem<Dom>;
    using Unknown = typename Dom::Unknown;
    using Value = typename Dom::Value;
    using Pattern = typename Dom::Pattern;

    struct Result {
        SolveStatus status = SolveStatus::Done;
        Assignment<Dom> assignment;
        Stats stats;
        std::string budget_note;
    };

    Result solve(const CS& cs, const std::vector<Unknown>& roots, const EngineOptions& opts,
                 const std::vector<Unknown>& watch = {}) {
        cs_ = &cs;
        opts_ = &opts;
        reset();
        for (const auto& [u, v] : cs.seeds) {
            std::uint32_t s = slot_of(u);
            join_into(s, v);
            slots_[s].written = true;
        }
        // register watches after seeding so restart seeds do not re-trigger
        for (const auto& w : watch) watched_.push_back(slot_of(w));
        for (const auto& u : roots) demand(slot_of(u));

        SolveStatus status = run_loop();
        Result r;
        r.status = status;
        r.stats = stats_;
        r.budget_note = budget_note_;
        std::vector<std::pair<Unknown, Value>> entries;
        entries.reserve(slots_.size());
        for (std::uint32_t s = 0; s < slots_.size(); ++s)
            entries.emplace_back(unknown_of_[s], slots_[s].value);
        auto bottom = cs.bottom;
        r.assignment = Assignment<Dom>(std::move(entries), bottom);
        return r;
    }

    /// Values of the watched unknowns at interruption time (for restarts).
    std::vector<std::pair<Unknown, Value>> watched_values() const {
        std::vector<std::pair<Unknown, Value>> out;
        for (std::uint32_t s : watched_)
            out.emplace_back(unknown_of_[s], slots_[s].value);
        return out;
    }

private:
    struct Slot {
        Value value;
        bool written = false;       // seeded or side-effected; family reads see these
        bool queried = false;       // demanded at least once
        bool in_worklist = false;
        std::uint32_t changes = 0;
        std::vector<std::uint32_t> influenced; // readers to reschedule on growth
        std::vector<std::uint32_t> deps;       // slots this unknown last read
        std::vector<Pattern> pattern_deps;     // family patterns this unknown last read
    };

    void reset() {
        slots_.clear();
        unknown_of_.clear();
        index_.clear();
        constraint_of_.clear();
        worklist_.clear();
        watched_.clear();
        watched_grew_ = false;
        budget_note_.clear();
        pattern_subs_.clear();
    }

    std::uint32_t slot_of(const Unknown& u) {
        auto it = index_.find(u);
        if (it != index_.end()) return it->second;
        std::uint32_t s = static_cast<std::uint32_t>(slots_.size());
        slots_.emplace_back(Slot{cs_->bottom(u), false, false, false, 0, {}, {}, {}});
        unknown_of_.push_back(u);
        index_.emplace(u, s);
        stats_.unknowns_materialized++;
        constraint_of_.push_back(find_constraints(u));
        return s;
    }

    const std::vector<typename CS::Rhs>* find_constraints(const Unknown& u) const {
        for (const auto& [lhs, list] : cs_->constraints)
            if (Dom::eq(lhs, u)) return &list;
        return nullptr;
    }

    void demand(std::uint32_t s) {
        if (slots_[s].queried) return;
        slots_[s].queried = true;
        if (constraint_of_[s]) schedule(s);
    }

    void schedule(std::uint32_t s) {
        if (slots_[s].in_worklist || !constraint_of_[s]) return;
        slots_[s].in_worklist = true;
        worklist_.push_back(s);
    }

    std::uint32_t pop() {
        std::uint32_t s;
        if (opts_->fifo) {
            s = worklist_.front();
            worklist_.pop_front();
        } else {
            s = worklist_.back();
            worklist_.pop_back();
        }
        slots_[s].in_worklist = false;
        return s;
    }

    void join_into(std::uint32_t s, const Value& v) {
        if (Dom::leq(v, slots_[s].value)) return;
        slots_[s].value = Dom::join(slots_[s].value, v);
        slots_[s].changes++;
        stats_.value_changes++;
        for (std::uint32_t reader : slots_[s].influenced) schedule(reader);
        if (std::find(watched_.begin(), watched_.end(), s) != watched_.end())
            watched_grew_ = true;
    }

    void mark_written(std::uint32_t s) {
        if (slots_[s].written) return;
        slots_[s].written = true;
        for (const auto& [pat, reader] : pattern_subs_)
            if (Dom::matches(pat, unknown_of_[s])) schedule(reader);
    }

    class RecordingView final : public CS::View {
    public:
        RecordingView(Engine& e, std::uint32_t reader) : e_(e), reader_(reader) {}

        const Value& get(const Unknown& u) override {
            std::uint32_t s = e_.slot_of(u);
            add_dep(s);
            e_.demand(s);
            return e_.slots_[s].value;
        }

        std::vector<std::pair<Unknown, const Value*>> family(const Pattern& p) override {
            auto& subs = e_.pattern_subs_;
            if (std::find(subs.begin(), subs.end(), std::make_pair(p, reader_)) == subs.end())
                subs.emplace_back(p, reader_);
            e_.slots_[reader_].pattern_deps.push_back(p);
            std::vector<std::pair<Unknown, const Value*>> out;
            for (std::uint32_t s = 0; s < e_.slots_.size(); ++s) {
                if (!e_.slots_[s].written || !Dom::matches(p, e_.unknown_of_[s])) continue;
                add_dep(s);
                out.emplace_back(e_.unknown_of_[s], &e_.slots_[s].value);
            }
            std::sort(out.begin(), out.end(),
                      [](const auto& a, const auto& b) { return Dom::less(a.first, b.first); });
            return out;
        }

        void side_effect(const Unknown& target, Value v) override {
            std::uint32_t s = e_.slot_of(target);
            e_.join_into(s, v);
            e_.mark_written(s);
        }

        std::size_t n_deps() const { return e_.slots_[reader_].deps.size(); }

    private:
        void add_dep(std::uint32_t s) {
            auto& deps = e_.slots_[reader_].deps;
            if (std::find(deps.begin(), deps.end(), s) != deps.end()) return;
            deps.push_back(s);
            auto& infl = e_.slots_[s].influenced;
            if (std::find(infl.begin(), infl.end(), reader_) == infl.end())
                infl.push_back(reader_);
        }

        Engine& e_;
        std::uint32_t reader_;
    };

    void clear_deps(std::uint32_t s) {
        for (std::uint32_t d : slots_[s].deps) {
            auto& infl = slots_[d].influenced;
            infl.erase(std::remove(infl.begin(), infl.end(), s), infl.end());
        }
        slots_[s].deps.clear();
        for (const Pattern& p : slots_[s].pattern_deps)
            std::erase(pattern_subs_, std::make_pair(p, s));
        slots_[s].pattern_deps.clear();
    }

    SolveStatus run_loop() {
        while (!worklist_.empty()) {
            std::uint32_t s = pop();
            const auto* rhs_list = constraint_of_[s];
            if (!rhs_list) continue;
            if (stats_.rhs_evaluations >= opts_->max_rhs_evaluations) {
                budget_note_ = growing_unknowns_note();
                return SolveStatus::BudgetExceeded;
            }
            stats_.rhs_evaluations++;
            clear_deps(s);
            bool changed = false;
            RecordingView view(*this, s);
            for (const auto& rhs : *rhs_list) {
                Value d = rhs(view);
                if (!Dom::leq(d, slots_[s].value)) changed = true;
                join_into(s, d);
            }
            if (opts_->trace)
                opts_->trace(Dom::print(unknown_of_[s]), view.n_deps(), changed);
            if (watched_grew_) return SolveStatus::WatchedGrew;
        }
        return SolveStatus::Done;
    }

    std::string growing_unknowns_note() const {
        std::vector<std::uint32_t> order(slots_.size());
        for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return slots_[a].changes > slots_[b].changes;
        });
        std::string note = "fastest-growing unknowns:";
        for (std::size_t i = 0; i < order.size() && i < 8; ++i) {
            if (slots_[order[i]].changes == 0) break;
            note += " " + Dom::print(unknown_of_[order[i]]) + "(x" +
                    std::to_string(slots_[order[i]].changes) + ")";
        }
        return note;
    }

    struct UnknownHash {
        std::size_t operator()(const Unknown& u) const { return Dom::hash(u); }
    };
    struct UnknownEq {
        bool operator()(const Unknown& a, const Unknown& b) const { return Dom::eq(a, b); }
    };

    const CS* cs_ = nullptr;
    const EngineOptions* opts_ = nullptr;
    std::deque<Slot> slots_;
    std::vector<Unknown> unknown_of_;
    std::unordered_map<Unknown, std::uint32_t, UnknownHash, UnknownEq> index_;
    std::vector<const std::vector<typename CS::Rhs>*> constraint_of_;
    std::deque<std::uint32_t> worklist_;
    std::vector<std::uint32_t> watched_;
    std::vector<std::pair<Pattern, std::uint32_t>> pattern_subs_;
    bool watched_grew_ = false;
    std::string budget_note_;
    Stats stats_;
};

/// Solve a (monotone) system from the given roots. Throws BudgetExceeded
/// when the evaluation budget runs out.
template <class Dom>
typename Engine<Dom>::Result solve(const ConstraintSystem<Dom>& cs,
                                   const std::vector<typename Dom::Unknown>& roots,
                                   const EngineOptions& opts = {}) {
    Engine<Dom> engine;
    auto r = engine.solve(cs, roots, opts);
    if (r.status == SolveStatus::BudgetExceeded)
        throw BudgetExceeded("solver budget exceeded; " + r.budget_note);
    return r;
}

/// Solve a system whose right-hand sides are non-monotone in the watched
/// unknowns. Whenever a watched value strictly grows, every other value is
/// discarded and solving restarts with the watched values kept as seeds.
template <class Dom>
typename Engine<Dom>::Result
solve_with_restarts(const ConstraintSystem<Dom>& cs,
                    const std::vector<typename Dom::Unknown>& roots,
                    const std::vector<typename Dom::Unknown>& watch,
                    std::uint64_t max_restarts, const EngineOptions& opts = {}) {
    ConstraintSystem<Dom> current = cs;
    std::uint64_t restarts = 0;
    Stats total;
    while (true) {
        Engine<Dom> engine;
        auto r = engine.solve(current, roots, opts, watch);
        total.rhs_evaluations += r.stats.rhs_evaluations;
        total.unknowns_materialized += r.stats.unknowns_materialized;
        total.value_changes += r.stats.value_changes;
        if (r.status == SolveStatus::BudgetExceeded)
            throw BudgetExceeded("solver budget exceeded; " + r.budget_note);
        if (r.status == SolveStatus::Done) {
            total.restarts = restarts;
            r.stats = total;
            return r;
        }
        if (++restarts > max_restarts)
            throw BudgetExceeded("restart budget exceeded after " +
                                 std::to_string(restarts - 1) + " restarts");
        current = cs;
        for (auto& [u, v] : engine.watched_values()) current.add_seed(u, std::move(v));
    }
}

/// Re-evaluate every constraint against a finished assignment and report
/// contributions or side-effects it fails to account for.
template <class Dom>
std::vector<Violation> verify_post_solution(const ConstraintSystem<Dom>& cs,
                                            const Assignment<Dom>& a) {
    using CS = ConstraintSystem<Dom>;
    using Unknown = typename Dom::Unknown;
    using Value = typename Dom::Value;

    class PassiveView final : public CS::View {
    public:
        explicit PassiveView(const Assignment<Dom>& a) : a_(a) {}

        const Value& get(const Unknown& u) override {
            held_.push_back(a_.get(u));
            return held_.back();
        }
        std::vector<std::pair<Unknown, const Value*>> family(
            const typename Dom::Pattern& p) override {
            std::vector<std::pair<Unknown, const Value*>> out;
            for (const auto& [u, v] : a_.entries())
                if (Dom::matches(p, u)) out.emplace_back(u, &v);
            return out;
        }
        void side_effect(const Unknown& target, Value v) override {
            effects.emplace_back(target, std::move(v));
        }

        std::vector<std::pair<Unknown, Value>> effects;

    private:
        const Assignment<Dom>& a_;
        std::deque<Value> held_;
    };

    std::vector<Violation> out;
    for (const auto& [lhs, rhs_list] : cs.constraints) {
        for (std::size_t i = 0; i < rhs_list.size(); ++i) {
            PassiveView view(a);
            Value d = rhs_list[i](view);
            if (!Dom::leq(d, a.get(lhs)))
                out.push_back({Dom::print(lhs), Dom::print(lhs),
                               "contribution of rhs #" + std::to_string(i) + " not subsumed"});
            for (const auto& [target, v] : view.effects)
                if (!Dom::leq(v, a.get(target)))
                    out.push_back({Dom::print(lhs), Dom::print(target),
                                   "side-effect of rhs #" + std::to_string(i) +
                                       " not subsumed"});
        }
    }
    for (const auto& [u, v] : cs.seeds)
        if (!Dom::leq(v, a.get(u)))
            out.push_back({Dom::print(u), Dom::print(u), "seed not subsumed"});
    return out;
}

} // namespace concai::solver
