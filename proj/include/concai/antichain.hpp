#pragma once

#include <string>
#include <vector>

#include "concai/small_set.hpp"
#include "json.hpp"

namespace concai {

/// Upward-closed family of locksets, represented by its minimal elements.
/// The least element is the empty family, the greatest is {emptyset}
/// (denoting the full power set). Insertion keeps the representation
/// canonical: no element is a subset of another, elements sorted by mask.
class MinAntichain {
public:
    MinAntichain() = default; // empty family

    static MinAntichain family_of(LockSet s) {
        MinAntichain f;
        f.min_.push_back(s);
        return f;
    }
    static MinAntichain all() { return family_of(LockSet{}); } // up-closure of {}

    bool empty() const { return min_.empty(); }
    bool is_all() const { return min_.size() == 1 && min_[0].empty(); }

    /// Upward-closure membership: some minimal element is a subset of s.
    bool contains(LockSet s) const {
        for (const auto& m : min_)
            if (m.subset_of(s)) return true;
        return false;
    }

    const std::vector<LockSet>& elements() const { return min_; }

    friend bool operator==(const MinAntichain&, const MinAntichain&) = default;

    std::string to_string(const std::vector<std::string>& mutex_names) const;
    nlohmann::json to_json(const std::vector<std::string>& mutex_names) const;

private:
    friend MinAntichain ac_insert(MinAntichain f, LockSet s);
    std::vector<LockSet> min_;
};

/// Insert the upward closure of s; supersets of an existing element are no-ops.
MinAntichain ac_insert(MinAntichain f, LockSet s);
MinAntichain ac_join(const MinAntichain& f, const MinAntichain& g);
/// True iff the upward closure of f is contained in the upward closure of g.
bool ac_leq(const MinAntichain& f, const MinAntichain& g);

} // namespace concai
