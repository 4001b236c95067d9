#ifndef RANGELAB_FLAT_TABLE_HPP
#define RANGELAB_FLAT_TABLE_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "rangelab/lattice.hpp"

namespace rangelab {

/// Open-addressing hash map Point -> V with linear probing.  Hot loops
/// (boundary maintenance, occupation counts) do millions of lookups per
/// second, which std::unordered_map does not sustain.
/// The key with c[0] == INT32_MIN is reserved as the empty slot marker.
template <class V>
class FlatTable {
public:
    struct Slot {
        Point key;
        V value;
    };

    explicit FlatTable(std::size_t expected = 16) { rehash(capacity_for(expected)); }

    void clear() {
        for (auto& s : slots_)
            s.key.c[0] = kEmpty;
        size_ = 0;
    }

    std::size_t size() const { return size_; }

    V* find(const Point& p) {
        std::size_t i = hash_point(p) & mask_;
        while (true) {
            Slot& s = slots_[i];
            if (s.key.c[0] == kEmpty) return nullptr;
            if (s.key == p) return &s.value;
            i = (i + 1) & mask_;
        }
    }

    const V* find(const Point& p) const { return const_cast<FlatTable*>(this)->find(p); }

    bool contains(const Point& p) const { return find(p) != nullptr; }

    /// Returns (value ptr, inserted-new).
    std::pair<V*, bool> insert(const Point& p, const V& v = V{}) {
        if ((size_ + 1) * 10 >= slots_.size() * 7) rehash(slots_.size() * 2);
        std::size_t i = hash_point(p) & mask_;
        while (true) {
            Slot& s = slots_[i];
            if (s.key.c[0] == kEmpty) {
                s.key = p;
                s.value = v;
                ++size_;
                return {&s.value, true};
            }
            if (s.key == p) return {&s.value, false};
            i = (i + 1) & mask_;
        }
    }

    V& operator[](const Point& p) { return *insert(p).first; }

    template <class F>
    void for_each(F&& f) const {
        for (const auto& s : slots_)
            if (s.key.c[0] != kEmpty) f(s.key, s.value);
    }

private:
    static constexpr std::int32_t kEmpty = std::numeric_limits<std::int32_t>::min();

    static std::size_t capacity_for(std::size_t expected) {
        std::size_t cap = 16;
        while (cap * 7 < expected * 10) cap *= 2;
        return cap;
    }

    void rehash(std::size_t new_cap) {
        std::vector<Slot> old;
        old.swap(slots_);
        slots_.resize(new_cap);
        for (auto& s : slots_) s.key.c[0] = kEmpty;
        mask_ = new_cap - 1;
        size_ = 0;
        for (auto& s : old)
            if (s.key.c[0] != kEmpty) insert(s.key, s.value);
    }

    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

/// Finite lattice set with O(1) membership; dimension is carried alongside.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(int d, std::size_t expected = 16) : d_(d), table_(expected) {}

    template <class It>
    PointSet(int d, It first, It last) : d_(d) {
        for (; first != last; ++first) insert(*first);
    }

    PointSet(int d, const std::vector<Point>& pts) : PointSet(d, pts.begin(), pts.end()) {}

    int dim() const { return d_; }
    std::size_t size() const { return table_.size(); }
    bool empty() const { return table_.size() == 0; }
    bool contains(const Point& p) const { return table_.contains(p); }
    bool insert(const Point& p) { return table_.insert(p).second; }
    void clear() { table_.clear(); }

    template <class F>
    void for_each(F&& f) const {
        table_.for_each([&](const Point& p, const char&) { f(p); });
    }

    std::vector<Point> to_vector() const {
        std::vector<Point> out;
        out.reserve(size());
        for_each([&](const Point& p) { out.push_back(p); });
        return out;
    }

private:
    int d_ = 3;
    FlatTable<char> table_;
};

}  // namespace rangelab

#endif
