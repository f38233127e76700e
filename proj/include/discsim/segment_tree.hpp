#pragma once
#include <algorithm>
#include <cstdint>
#include <vector>

namespace discsim {

/**
 * Lazy segment tree over a fixed index range supporting range add and
 * whole-range max/min queries.
 *
 * Only global queries are needed, so pending adds are kept at the covering
 * node and folded in on the way back up; nothing is ever pushed down.
 * Indices outside [0, size) keep value 0, which is harmless here because
 * every consumer treats 0 (the empty prefix) as a candidate value anyway.
 */
class RangeAddMinMaxTree {
public:
    explicit RangeAddMinMaxTree(size_t size) : size_(size) {
        base_ = 1;
        while (base_ < std::max<size_t>(size, 1)) base_ <<= 1;
        max_.assign(2 * base_, 0);
        min_.assign(2 * base_, 0);
        lazy_.assign(2 * base_, 0);
    }

    size_t size() const { return size_; }

    /// Adds delta to every index in [left, right).
    void range_add(size_t left, size_t right, int64_t delta) {
        if (left >= right) return;
        add(1, 0, base_, left, std::min(right, size_), delta);
    }

    int64_t global_max() const { return max_[1] + lazy_[1]; }
    int64_t global_min() const { return min_[1] + lazy_[1]; }

private:
    void add(size_t node, size_t node_lo, size_t node_hi, size_t lo, size_t hi, int64_t delta) {
        if (hi <= node_lo || node_hi <= lo) return;
        if (lo <= node_lo && node_hi <= hi) {
            lazy_[node] += delta;
            return;
        }
        const size_t mid = (node_lo + node_hi) / 2;
        add(2 * node, node_lo, mid, lo, hi, delta);
        add(2 * node + 1, mid, node_hi, lo, hi, delta);
        max_[node] = std::max(max_[2 * node] + lazy_[2 * node], max_[2 * node + 1] + lazy_[2 * node + 1]);
        min_[node] = std::min(min_[2 * node] + lazy_[2 * node], min_[2 * node + 1] + lazy_[2 * node + 1]);
    }

    size_t size_;
    size_t base_;
    std::vector<int64_t> max_;
    std::vector<int64_t> min_;
    std::vector<int64_t> lazy_;
};

}  // namespace discsim
