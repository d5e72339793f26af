#include "concai/analysis_states.hpp"

namespace concai {

namespace {

std::vector<GlobalSet> must_join(const std::vector<GlobalSet>& a,
                                 const std::vector<GlobalSet>& b) {
    std::vector<GlobalSet> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].intersect(b[i]);
    return out;
}
bool must_leq(const std::vector<GlobalSet>& a, const std::vector<GlobalSet>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!b[i].subset_of(a[i])) return false;
    return true;
}
std::vector<MinAntichain> fam_join(const std::vector<MinAntichain>& a,
                                   const std::vector<MinAntichain>& b) {
    std::vector<MinAntichain> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = ac_join(a[i], b[i]);
    return out;
}
bool fam_leq(const std::vector<MinAntichain>& a, const std::vector<MinAntichain>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!ac_leq(a[i], b[i])) return false;
    return true;
}

nlohmann::json globals_json(GlobalSet s, const Cfg& cfg) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto g : s.members()) arr.push_back(cfg.vars().name(g));
    return arr;
}
nlohmann::json per_mutex_json(const std::vector<MinAntichain>& v, const Cfg& cfg) {
    nlohmann::json obj = nlohmann::json::object();
    for (MutexId m = 0; m < v.size(); ++m) obj[cfg.mutex_names[m]] = v[m].to_json(cfg.mutex_names);
    return obj;
}
nlohmann::json per_global_json(const std::vector<MinAntichain>& v, const Cfg& cfg) {
    nlohmann::json obj = nlohmann::json::object();
    for (VarId g = 0; g < v.size(); ++g) obj[cfg.vars().name(g)] = v[g].to_json(cfg.mutex_names);
    return obj;
}

} // namespace

ProtState state_join(const ProtState& a, const ProtState& b) {
    return {a.protected_written.intersect(b.protected_written), env_join(a.env, b.env)};
}
bool state_leq(const ProtState& a, const ProtState& b) {
    return b.protected_written.subset_of(a.protected_written) && env_leq(a.env, b.env);
}

LockState state_join(const LockState& a, const LockState& b) {
    return {must_join(a.written_since, b.written_since),
            fam_join(a.acquired_at, b.acquired_at), env_join(a.env, b.env)};
}
bool state_leq(const LockState& a, const LockState& b) {
    return must_leq(a.written_since, b.written_since) &&
           fam_leq(a.acquired_at, b.acquired_at) && env_leq(a.env, b.env);
}

WriteState state_join(const WriteState& a, const WriteState& b) {
    return {fam_join(a.write_locks, b.write_locks), fam_join(a.since_write, b.since_write),
            env_join(a.env, b.env)};
}
bool state_leq(const WriteState& a, const WriteState& b) {
    return fam_leq(a.write_locks, b.write_locks) && fam_leq(a.since_write, b.since_write) &&
           env_leq(a.env, b.env);
}

CombinedState state_join(const CombinedState& a, const CombinedState& b) {
    return {fam_join(a.write_locks, b.write_locks), fam_join(a.since_write, b.since_write),
            must_join(a.written_since, b.written_since),
            fam_join(a.acquired_at, b.acquired_at), env_join(a.env, b.env)};
}
bool state_leq(const CombinedState& a, const CombinedState& b) {
    return fam_leq(a.write_locks, b.write_locks) && fam_leq(a.since_write, b.since_write) &&
           must_leq(a.written_since, b.written_since) &&
           fam_leq(a.acquired_at, b.acquired_at) && env_leq(a.env, b.env);
}

MineState state_join(const MineState& a, const MineState& b) {
    return {a.written.unite(b.written), env_join(a.env, b.env)};
}
bool state_leq(const MineState& a, const MineState& b) {
    return a.written.subset_of(b.written) && env_leq(a.env, b.env);
}

nlohmann::json state_json(const ProtState& s, const Cfg& cfg) {
    return {{"protected_written", globals_json(s.protected_written, cfg)},
            {"env", s.env.to_json()}};
}
nlohmann::json state_json(const LockState& s, const Cfg& cfg) {
    nlohmann::json v = nlohmann::json::object();
    for (MutexId m = 0; m < s.written_since.size(); ++m)
        v[cfg.mutex_names[m]] = globals_json(s.written_since[m], cfg);
    return {{"written_since_lock", std::move(v)},
            {"lock_backgrounds", per_mutex_json(s.acquired_at, cfg)},
            {"env", s.env.to_json()}};
}
nlohmann::json state_json(const WriteState& s, const Cfg& cfg) {
    return {{"write_locksets", per_global_json(s.write_locks, cfg)},
            {"held_since_write", per_global_json(s.since_write, cfg)},
            {"env", s.env.to_json()}};
}
nlohmann::json state_json(const CombinedState& s, const Cfg& cfg) {
    nlohmann::json v = nlohmann::json::object();
    for (MutexId m = 0; m < s.written_since.size(); ++m)
        v[cfg.mutex_names[m]] = globals_json(s.written_since[m], cfg);
    return {{"write_locksets", per_global_json(s.write_locks, cfg)},
            {"held_since_write", per_global_json(s.since_write, cfg)},
            {"written_since_lock", std::move(v)},
            {"lock_backgrounds", per_mutex_json(s.acquired_at, cfg)},
            {"env", s.env.to_json()}};
}
nlohmann::json state_json(const MineState& s, const Cfg& cfg) {
    return {{"written", globals_json(s.written, cfg)}, {"env", s.env.to_json()}};
}

AnalysisValue av_join(const AnalysisValue& a, const AnalysisValue& b) {
    if (a.index() != b.index())
        throw std::logic_error("join across different lattice kinds");
    return std::visit(
        [&](const auto& x) -> AnalysisValue {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ValueD>)
                return vd_join(x, std::get<ValueD>(b));
            else if constexpr (std::is_same_v<T, LockSet>)
                return x.intersect(std::get<LockSet>(b)); // ordered by superset
            else
                return state_join(x, std::get<T>(b));
        },
        a);
}

bool av_leq(const AnalysisValue& a, const AnalysisValue& b) {
    if (a.index() != b.index())
        throw std::logic_error("order across different lattice kinds");
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ValueD>)
                return vd_leq(x, std::get<ValueD>(b));
            else if constexpr (std::is_same_v<T, LockSet>)
                return std::get<LockSet>(b).subset_of(x); // smaller set is higher
            else
                return state_leq(x, std::get<T>(b));
        },
        a);
}

const AbstractEnv& av_env(const AnalysisValue& v) {
    return std::visit(
        [](const auto& x) -> const AbstractEnv& {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ValueD> || std::is_same_v<T, LockSet>)
                throw std::logic_error("value carries no environment");
            else
                return x.env;
        },
        v);
}

bool av_is_bottom_state(const AnalysisValue& v) {
    const AbstractEnv& env = av_env(v);
    return env.get(env.vars().self).is_bot();
}

} // namespace concai
