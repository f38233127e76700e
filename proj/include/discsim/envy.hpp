#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "discsim/interval.hpp"
#include "discsim/stripe.hpp"

namespace discsim {

/// Two valuation vectors in [0,1]^n (pairwise-distinct entries within each
/// vector) plus the set S of items allocated to player 1, as a 0/1 mask.
struct EnvyInstance {
    std::vector<double> v1;
    std::vector<double> v2;
    std::vector<uint8_t> allocated_to_p1;

    std::vector<uint8_t> allocated_to_p2() const;
    double cardinal_envy_p1() const;
    double cardinal_envy_p2() const;
    int64_t ordinal_envy_p1() const;
    int64_t ordinal_envy_p2() const;
    double envy() const;  // two-player value: max of the per-player envies
};

/// Per-player cardinal envy max{v(S-bar) - v(S), 0} where `allocated[j]` says
/// item j belongs to this player's own set S.
double cardinal_envy(std::span<const double> values, std::span<const uint8_t> allocated);

/// Two-player envy: max of both players' per-player values, with player 1
/// holding the mask's set and player 2 its complement.
double pair_cardinal_envy(std::span<const double> v1, std::span<const double> v2,
                          std::span<const uint8_t> allocated_to_p1);

/// Ordinal envy, prefix form: relabel items by decreasing value and return
/// max over t >= 0 of |S-bar intersect [t]| - |S intersect [t]|.
/// Duplicate values throw std::invalid_argument.
int64_t ordinal_envy_prefix(std::span<const double> values, std::span<const uint8_t> allocated);

/// Ordinal envy, cancellation form: each allocated item, in decreasing value
/// order, removes the most valuable strictly-cheaper unallocated item (a step
/// with no eligible item removes nothing); returns how many survive.
int64_t ordinal_envy_cancellation(std::span<const double> values,
                                  std::span<const uint8_t> allocated);

/// Worst valuation consistent with the ranking of `values`: the top t* ranks
/// (t* the argmax prefix) get 1 - i*epsilon, the rest get order-consistent
/// values below epsilon. Requires epsilon in (0, 1/n^2); the result satisfies
/// cardinal_envy(v', S) >= ordinal_envy(v, S) - epsilon * n^2.
std::vector<double> worst_consistent_valuation(std::span<const double> values,
                                               std::span<const uint8_t> allocated,
                                               double epsilon);

/// Interval discrepancy of the coloring chi(i) = -1 for allocated items and
/// +1 otherwise, placed at positions values[i] (final state).
int64_t ordinal_discrepancy(std::span<const double> values, std::span<const uint8_t> allocated);

/// Per-player monotone maps applied before embedding items in the unit
/// square; identity for uniform valuations.
struct CdfPair {
    std::function<double(double)> f1;
    std::function<double(double)> f2;

    static CdfPair identity();
};

struct EnvyRunResult {
    std::vector<uint8_t> allocation;  // 1 -> item joined S (player 1)
    Transcript2D transcript;          // transformed coordinates + signs
    EmbeddingParams params;

    int64_t running_disc_x;
    int64_t running_disc_y;
    int64_t running_stripe_disc;
    int64_t final_disc_x;
    int64_t final_disc_y;
    int64_t final_stripe_disc;

    double final_cardinal_envy_p1;
    double final_cardinal_envy_p2;
    double running_cardinal_envy_p1;
    double running_cardinal_envy_p2;
    int64_t final_ordinal_envy_p1;
    int64_t final_ordinal_envy_p2;
    int64_t running_ordinal_envy_p1;
    int64_t running_ordinal_envy_p2;

    /// Final-state guarantee chain, both players: axis discrepancy >=
    /// ordinal envy >= cardinal envy.
    bool chain_ok;
    bool used_empirical_cdfs;
};

/**
 * Online allocation of items to two players via stripe coloring.
 *
 * Item j arrives at (F1(v1[j]), F2(v2[j])); the joint-potential sign -1
 * sends it to player 1's set S and +1 to player 2 (the coloring convention
 * chi(i) = -1 for i in S). Cardinal envy is tracked on the raw valuations,
 * ordinal envy on the value ranking (ties broken by arrival index); both are
 * reported as final values and as running maxima over the process.
 */
EnvyRunResult run_online_envy(std::span<const double> v1, std::span<const double> v2,
                              const CdfPair& cdfs, const EmbeddingParams& params,
                              double lambda);

/// Same driver with empirical CDFs: each value is mapped through its rank
/// among the values seen so far for that player. Heuristic fallback for
/// unknown distributions; flagged in the result.
EnvyRunResult run_online_envy_empirical(std::span<const double> v1, std::span<const double> v2,
                                        const EmbeddingParams& params, double lambda);

}  // namespace discsim
