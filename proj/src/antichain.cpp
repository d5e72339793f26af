#include "concai/antichain.hpp"

#include <algorithm>

namespace concai {

MinAntichain ac_insert(MinAntichain f, LockSet s) {
    for (const auto& m : f.min_)
        if (m.subset_of(s)) return f; // already covered
    std::erase_if(f.min_, [&](const LockSet& m) { return s.subset_of(m); });
    f.min_.insert(std::upper_bound(f.min_.begin(), f.min_.end(), s), s);
    return f;
}

MinAntichain ac_join(const MinAntichain& f, const MinAntichain& g) {
    MinAntichain out = f;
    for (const auto& s : g.elements()) out = ac_insert(std::move(out), s);
    return out;
}

bool ac_leq(const MinAntichain& f, const MinAntichain& g) {
    for (const auto& s : f.elements())
        if (!g.contains(s)) return false;
    return true;
}

namespace {
std::vector<std::vector<std::string>> named_elements(const MinAntichain& f,
                                                     const std::vector<std::string>& names) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : f.elements()) {
        std::vector<std::string> elem;
        for (auto m : s.members()) elem.push_back(names.at(m));
        std::sort(elem.begin(), elem.end());
        out.push_back(std::move(elem));
    }
    std::sort(out.begin(), out.end());
    return out;
}
} // namespace

std::string MinAntichain::to_string(const std::vector<std::string>& mutex_names) const {
    std::string s = "{";
    bool first_set = true;
    for (const auto& elem : named_elements(*this, mutex_names)) {
        if (!first_set) s += ",";
        first_set = false;
        s += "{";
        for (std::size_t i = 0; i < elem.size(); ++i) {
            if (i) s += ",";
            s += elem[i];
        }
        s += "}";
    }
    return s + "}";
}

nlohmann::json MinAntichain::to_json(const std::vector<std::string>& mutex_names) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& elem : named_elements(*this, mutex_names)) arr.push_back(elem);
    return arr;
}

} // namespace concai
