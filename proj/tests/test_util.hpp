#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "concai/small_set.hpp"
#include "concai/value_domain.hpp"

namespace concai::test {

/// Deterministic splitmix64 generator for property tests.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
    bool coin() { return next() & 1; }
};

inline ValueD random_value(Rng& rng, int universe = 12) {
    switch (rng.below(8)) {
    case 0: return ValueD::bot();
    case 1: return ValueD::top();
    default: {
        std::vector<AbsValue> vals;
        auto n = rng.below(5);
        for (std::uint64_t i = 0; i < n; ++i) {
            if (rng.below(10) == 0)
                vals.push_back(TidToken{static_cast<std::uint32_t>(rng.below(3))});
            else
                vals.push_back(static_cast<std::int64_t>(rng.below(universe)) - 2);
        }
        return ValueD::of_set(std::move(vals));
    }
    }
}

inline LockSet random_lockset(Rng& rng, std::size_t n_mutexes) {
    LockSet s;
    for (std::uint32_t m = 0; m < n_mutexes; ++m)
        if (rng.coin()) s = s.with(m);
    return s;
}

inline std::string corpus_path(const std::string& file) {
    return std::string(CONCAI_CORPUS_DIR) + "/" + file;
}

} // namespace concai::test
