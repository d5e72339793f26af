#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace concai {

/// Opaque thread-id token. Tokens compare for equality (and canonically by id)
/// but support no arithmetic.
struct TidToken {
    std::uint32_t id = 0;
    friend auto operator<=>(const TidToken&, const TidToken&) = default;
};

/// An abstract value: an integer or a thread-id token.
/// Canonical order: all integers (ascending) before all tokens (ascending).
using AbsValue = std::variant<std::int64_t, TidToken>;

bool abs_value_less(const AbsValue& a, const AbsValue& b);
std::string abs_value_to_string(const AbsValue& v);

/// Finite-set value lattice with a Top element. Sets are kept sorted and
/// deduplicated; a join whose result would exceed the size bound collapses
/// to Top. Bot is the empty set.
class ValueD {
public:
    ValueD() = default; // Bot

    static ValueD top();
    static ValueD bot() { return ValueD{}; }
    static ValueD of_int(std::int64_t n);
    static ValueD of_tid(TidToken t);
    static ValueD of_set(std::vector<AbsValue> vals); // canonicalizes; collapses past the bound

    bool is_top() const { return top_; }
    bool is_bot() const { return !top_ && vals_.empty(); }
    bool is_singleton() const { return !top_ && vals_.size() == 1; }
    std::optional<std::int64_t> as_singleton_int() const;

    /// Membership in the concretization (Top contains every value).
    bool contains(const AbsValue& v) const;

    const std::vector<AbsValue>& values() const { return vals_; } // valid only when !is_top()

    friend bool operator==(const ValueD&, const ValueD&) = default;

    std::string to_string() const;
    nlohmann::json to_json() const;

    /// Size bound for set representations (process-wide config; set once at startup).
    static void set_size_bound(std::size_t k);
    static std::size_t size_bound();

private:
    bool top_ = false;
    std::vector<AbsValue> vals_;
};

ValueD vd_join(const ValueD& a, const ValueD& b);
bool vd_leq(const ValueD& a, const ValueD& b);
ValueD vd_meet(const ValueD& a, const ValueD& b);

} // namespace concai
