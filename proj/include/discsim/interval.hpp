#pragma once
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "discsim/rng.hpp"
#include "discsim/segment_tree.hpp"
#include "discsim/tree_balancer.hpp"

namespace discsim {

/// Time-ordered record of arrival positions in [0,1] and assigned signs.
struct Transcript {
    std::vector<double> positions;
    std::vector<int8_t> signs;  // each -1 or +1

    size_t size() const { return positions.size(); }
};

/// Tree sizing for the interval-to-tree embedding:
/// h = max(1, floor(log2(log2 n) / C)), m = ceil(n^(1/(h+1))).
/// h is lowered (keeping h >= 1) until m^h <= n so pathological height
/// divisors cannot blow up the leaf count past n.
struct EmbeddingParams {
    uint64_t n;             // expected arrival count the tree is sized for
    double height_divisor;  // C
    uint32_t height;        // h >= 1
    uint32_t arity;         // m >= 2

    /// Throws std::invalid_argument when n < 4 or C <= 0.
    static EmbeddingParams derive(uint64_t n, double height_divisor);

    uint64_t leaf_count() const;  // m^h
    TreeShape tree_shape() const { return TreeShape{arity, height}; }
};

/// Leaf for a point: min(floor(x * m^h), m^h - 1); x = 1 clamps to the last
/// leaf. Throws std::out_of_range when x is outside [0,1].
uint64_t embed_point(double x, const EmbeddingParams& params);

/**
 * Exact running interval discrepancy over a known position multiset.
 *
 * Positions are coordinate-compressed up front (measurement only; the
 * coloring algorithm never sees this structure). Each arrival adds its sign
 * to the prefix-sum function F(x) for all x >= position via a range add.
 * The discrepancy at any time is max_x F - min_x F with the empty-prefix
 * value 0 included on both sides; the running maximum over time is kept,
 * along with running maxima of |max_x F| and |min_x F|.
 *
 * Duplicate positions stack on one compressed coordinate: a closed interval
 * contains either all arrivals at a coordinate or none of them.
 */
class RunningDiscrepancyTracker {
public:
    explicit RunningDiscrepancyTracker(std::span<const double> all_positions);

    /// Feeds one arrival. The position must be one of the compressed
    /// coordinates and sign must be -1 or +1.
    void add(double position, int sign);

    uint64_t arrivals() const { return arrivals_; }
    int64_t total() const { return total_; }

    /// max_x F(x) and min_x F(x) with the empty prefix (value 0) included.
    int64_t prefix_max() const { return std::max<int64_t>(tree_.global_max(), 0); }
    int64_t prefix_min() const { return std::min<int64_t>(tree_.global_min(), 0); }

    int64_t current_discrepancy() const { return prefix_max() - prefix_min(); }
    int64_t running_discrepancy() const { return running_disc_; }
    int64_t running_prefix_max() const { return running_prefix_max_; }
    int64_t running_prefix_min_abs() const { return running_prefix_min_abs_; }

private:
    std::vector<double> coords_;  // sorted, deduplicated
    RangeAddMinMaxTree tree_;
    int64_t total_ = 0;
    int64_t running_disc_ = 0;
    int64_t running_prefix_max_ = 0;
    int64_t running_prefix_min_abs_ = 0;
    uint64_t arrivals_ = 0;
};

struct IntervalRunResult {
    Transcript transcript;
    EmbeddingParams params;
    int64_t tree_discrepancy;           // running max node imbalance
    int64_t running_interval_disc;      // running max over the whole process
    int64_t final_interval_disc;        // discrepancy of the final state
    Potential final_potential;
    uint64_t configured_n;              // tree was sized for this; the stream
                                        // may be shorter or longer
};

/// Embeds each arrival, colors it greedily, applies it to the tree and feeds
/// the tracker. Arrivals outside [0,1] throw std::out_of_range.
IntervalRunResult run_online_interval(std::span<const double> arrivals,
                                      const EmbeddingParams& params, double lambda);

/// Interval discrepancy of the final state of a transcript prefix
/// (all arrivals when up_to_time is npos). Sort-and-scan; O(n log n).
int64_t final_interval_discrepancy(const Transcript& transcript,
                                   size_t up_to_time = static_cast<size_t>(-1));

/// Brute-force oracle: max over all times t <= up_to_time and all intervals
/// of the signed arrival count. Independent of RunningDiscrepancyTracker.
int64_t interval_discrepancy_bruteforce(const Transcript& transcript,
                                        std::optional<size_t> up_to_time = std::nullopt);

/// Running discrepancy after each arrival, by brute force. Oracle for
/// per-time-step tracker comparisons; O(n^2 log n).
std::vector<int64_t> interval_discrepancy_bruteforce_series(const Transcript& transcript);

/// Offline baseline: +1 for odd rank, -1 for even rank in sorted position
/// order (ties broken by arrival index). Final interval discrepancy <= 1.
std::vector<int8_t> offline_alternating_coloring(std::span<const double> positions);

/// Baseline: each sign i.i.d. uniform in {-1,+1}.
Transcript random_coloring(std::span<const double> arrivals, Rng& rng);

}  // namespace discsim
