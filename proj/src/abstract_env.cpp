#include "concai/abstract_env.hpp"

namespace concai {

AbstractEnv env_join(const AbstractEnv& a, const AbstractEnv& b) {
    if (a.vals_.size() != b.vals_.size())
        throw std::invalid_argument("env_join: mismatched variable tables");
    AbstractEnv out = a;
    for (std::size_t i = 0; i < out.vals_.size(); ++i)
        out.vals_[i] = vd_join(a.vals_[i], b.vals_[i]);
    return out;
}

bool env_leq(const AbstractEnv& a, const AbstractEnv& b) {
    if (a.vals_.size() != b.vals_.size())
        throw std::invalid_argument("env_leq: mismatched variable tables");
    for (std::size_t i = 0; i < a.vals_.size(); ++i)
        if (!vd_leq(a.vals_[i], b.vals_[i])) return false;
    return true;
}

nlohmann::json AbstractEnv::to_json() const {
    nlohmann::json obj = nlohmann::json::object();
    for (VarId v = 0; v < vals_.size(); ++v) obj[vars_->name(v)] = vals_[v].to_json();
    return obj;
}

std::string AbstractEnv::to_string() const {
    std::string s = "{";
    for (VarId v = 0; v < vals_.size(); ++v) {
        if (v) s += ", ";
        s += vars_->name(v) + "->" + vals_[v].to_string();
    }
    return s + "}";
}

} // namespace concai
