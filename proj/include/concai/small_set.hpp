#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace concai {

/// Set of small ids (mutexes, globals) backed by a 64-bit mask.
/// Program validation guarantees id spaces never exceed 64 entries.
template <class Tag>
class SmallIdSet {
public:
    static constexpr std::size_t capacity = 64;

    constexpr SmallIdSet() = default;

    static SmallIdSet full(std::size_t n) {
        assert(n <= capacity);
        SmallIdSet s;
        s.bits_ = (n == capacity) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
        return s;
    }
    static SmallIdSet single(std::uint32_t id) { return SmallIdSet{}.with(id); }

    bool contains(std::uint32_t id) const { return (bits_ >> id) & 1u; }
    bool empty() const { return bits_ == 0; }
    std::size_t size() const { return static_cast<std::size_t>(__builtin_popcountll(bits_)); }

    SmallIdSet with(std::uint32_t id) const {
        assert(id < capacity);
        SmallIdSet s = *this;
        s.bits_ |= std::uint64_t{1} << id;
        return s;
    }
    SmallIdSet without(std::uint32_t id) const {
        SmallIdSet s = *this;
        s.bits_ &= ~(std::uint64_t{1} << id);
        return s;
    }

    bool subset_of(const SmallIdSet& o) const { return (bits_ & ~o.bits_) == 0; }
    bool intersects(const SmallIdSet& o) const { return (bits_ & o.bits_) != 0; }

    SmallIdSet intersect(const SmallIdSet& o) const { return SmallIdSet{bits_ & o.bits_}; }
    SmallIdSet unite(const SmallIdSet& o) const { return SmallIdSet{bits_ | o.bits_}; }
    SmallIdSet minus(const SmallIdSet& o) const { return SmallIdSet{bits_ & ~o.bits_}; }

    std::uint64_t bits() const { return bits_; }

    std::vector<std::uint32_t> members() const {
        std::vector<std::uint32_t> out;
        for (std::uint64_t b = bits_; b != 0; b &= b - 1)
            out.push_back(static_cast<std::uint32_t>(__builtin_ctzll(b)));
        return out;
    }

    friend bool operator==(const SmallIdSet&, const SmallIdSet&) = default;
    friend bool operator<(const SmallIdSet& a, const SmallIdSet& b) { return a.bits_ < b.bits_; }

private:
    explicit constexpr SmallIdSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

struct MutexTag {};
struct GlobalTag {};

/// Set of mutexes currently (or hypothetically) held.
using LockSet = SmallIdSet<MutexTag>;
/// Set of global variables.
using GlobalSet = SmallIdSet<GlobalTag>;

using MutexId = std::uint32_t;
using VarId = std::uint32_t;
using PointId = std::uint32_t;
using EdgeId = std::uint32_t;

} // namespace concai
