#include "concai/value_domain.hpp"

#include <algorithm>

namespace concai {

namespace {
std::atomic<std::size_t> g_size_bound{64};
} // namespace

void ValueD::set_size_bound(std::size_t k) { g_size_bound.store(k); }
std::size_t ValueD::size_bound() { return g_size_bound.load(); }

bool abs_value_less(const AbsValue& a, const AbsValue& b) {
    if (a.index() != b.index()) return a.index() < b.index(); // ints before tokens
    if (a.index() == 0) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a).id < std::get<1>(b).id;
}

std::string abs_value_to_string(const AbsValue& v) {
    if (v.index() == 0) return std::to_string(std::get<0>(v));
    return "tid#" + std::to_string(std::get<1>(v).id);
}

ValueD ValueD::top() {
    ValueD v;
    v.top_ = true;
    return v;
}

ValueD ValueD::of_int(std::int64_t n) { return of_set({AbsValue{n}}); }
ValueD ValueD::of_tid(TidToken t) { return of_set({AbsValue{t}}); }

ValueD ValueD::of_set(std::vector<AbsValue> vals) {
    std::sort(vals.begin(), vals.end(), abs_value_less);
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.size() > size_bound()) return top();
    ValueD v;
    v.vals_ = std::move(vals);
    return v;
}

std::optional<std::int64_t> ValueD::as_singleton_int() const {
    if (top_ || vals_.size() != 1 || vals_[0].index() != 0) return std::nullopt;
    return std::get<0>(vals_[0]);
}

bool ValueD::contains(const AbsValue& v) const {
    if (top_) return true;
    return std::binary_search(vals_.begin(), vals_.end(), v, abs_value_less);
}

ValueD vd_join(const ValueD& a, const ValueD& b) {
    if (a.is_top() || b.is_top()) return ValueD::top();
    std::vector<AbsValue> merged;
    merged.reserve(a.values().size() + b.values().size());
    std::merge(a.values().begin(), a.values().end(), b.values().begin(), b.values().end(),
               std::back_inserter(merged), abs_value_less);
    return ValueD::of_set(std::move(merged));
}

bool vd_leq(const ValueD& a, const ValueD& b) {
    if (b.is_top()) return true;
    if (a.is_top()) return false;
    return std::includes(b.values().begin(), b.values().end(), a.values().begin(),
                         a.values().end(), abs_value_less);
}

ValueD vd_meet(const ValueD& a, const ValueD& b) {
    if (a.is_top()) return b;
    if (b.is_top()) return a;
    std::vector<AbsValue> out;
    std::set_intersection(a.values().begin(), a.values().end(), b.values().begin(),
                          b.values().end(), std::back_inserter(out), abs_value_less);
    return ValueD::of_set(std::move(out));
}

std::string ValueD::to_string() const {
    if (top_) return "T";
    std::string s = "{";
    for (std::size_t i = 0; i < vals_.size(); ++i) {
        if (i) s += ",";
        s += abs_value_to_string(vals_[i]);
    }
    return s + "}";
}

nlohmann::json ValueD::to_json() const {
    if (top_) return nlohmann::json{{"top", true}};
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : vals_) {
        if (v.index() == 0)
            arr.push_back(std::get<0>(v));
        else
            arr.push_back(nlohmann::json{{"tid", std::get<1>(v).id}});
    }
    return nlohmann::json{{"set", std::move(arr)}};
}

} // namespace concai
