#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "concai/small_set.hpp"
#include "concai/value_domain.hpp"
#include "json.hpp"

namespace concai {

/// Program variable table: globals first, then locals. The reserved local
/// `self` is always present.
struct VarTable {
    std::vector<std::string> names;
    std::size_t n_globals = 0;
    VarId self = 0;

    std::size_t size() const { return names.size(); }
    bool is_global(VarId v) const { return v < n_globals; }
    const std::string& name(VarId v) const { return names.at(v); }

    VarId find(const std::string& n) const {
        for (VarId i = 0; i < names.size(); ++i)
            if (names[i] == n) return i;
        throw std::out_of_range("unknown variable: " + n);
    }
};

/// Total map from locals and globals to abstract values.
class AbstractEnv {
public:
    AbstractEnv() = default;
    explicit AbstractEnv(std::shared_ptr<const VarTable> vars)
        : vars_(std::move(vars)), vals_(vars_->size()) {}

    /// Start-of-program environment: locals at Top, globals at Bot.
    static AbstractEnv initial(std::shared_ptr<const VarTable> vars) {
        AbstractEnv e(std::move(vars));
        for (VarId v = e.vars_->n_globals; v < e.vals_.size(); ++v)
            e.vals_[v] = ValueD::top();
        return e;
    }

    const ValueD& get(VarId v) const { return vals_.at(v); }
    AbstractEnv with(VarId v, ValueD d) const { // the override operator
        AbstractEnv e = *this;
        e.vals_.at(v) = std::move(d);
        return e;
    }
    /// Reset every global to Bot (used when seeding a spawned thread).
    AbstractEnv with_globals_bot() const {
        AbstractEnv e = *this;
        for (VarId v = 0; v < vars_->n_globals; ++v) e.vals_[v] = ValueD::bot();
        return e;
    }

    const VarTable& vars() const { return *vars_; }
    std::shared_ptr<const VarTable> vars_ptr() const { return vars_; }

    friend bool operator==(const AbstractEnv& a, const AbstractEnv& b) {
        return a.vals_ == b.vals_;
    }

    nlohmann::json to_json() const;
    std::string to_string() const;

    friend AbstractEnv env_join(const AbstractEnv& a, const AbstractEnv& b);
    friend bool env_leq(const AbstractEnv& a, const AbstractEnv& b);

private:
    std::shared_ptr<const VarTable> vars_;
    std::vector<ValueD> vals_;
};

AbstractEnv env_join(const AbstractEnv& a, const AbstractEnv& b);
bool env_leq(const AbstractEnv& a, const AbstractEnv& b);

} // namespace concai
