#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "discsim/interval.hpp"
#include "discsim/rng.hpp"

using namespace discsim;

namespace {

std::vector<double> uniforms(Rng& rng, size_t count) {
    std::vector<double> out(count);
    for (auto& x : out) x = rng.next_unit();
    return out;
}

Transcript make_transcript(std::vector<double> positions, std::vector<int> signs) {
    Transcript t;
    t.positions = std::move(positions);
    t.signs.assign(signs.begin(), signs.end());
    return t;
}

}  // namespace

TEST_SUITE_BEGIN("interval");

TEST_CASE("derive_params: pinned values and invariants") {
    const EmbeddingParams big = EmbeddingParams::derive(65536, 1.0);
    CHECK(big.height == 4);
    CHECK(big.arity == 10);
    const EmbeddingParams small = EmbeddingParams::derive(16, 1.0);
    CHECK(small.height == 2);
    CHECK(small.arity == 3);

    CHECK_THROWS_AS(EmbeddingParams::derive(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingParams::derive(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingParams::derive(100, 0.0), std::invalid_argument);

    for (uint64_t n : {uint64_t{4}, uint64_t{5}, uint64_t{17}, uint64_t{255}, uint64_t{256},
                       uint64_t{65535}, uint64_t{1} << 20}) {
        for (double c : {0.1, 0.5, 1.0, 2.5}) {
            const EmbeddingParams p = EmbeddingParams::derive(n, c);
            CHECK(p.height >= 1);
            CHECK(p.arity >= 2);
            uint64_t leaves = 1;
            for (uint32_t i = 0; i < p.height; ++i) leaves *= p.arity;
            CHECK(leaves <= n);
            // m is the least arity reaching n leaves-below-one-more-level
            double pow_full = std::pow(static_cast<double>(p.arity), p.height + 1);
            CHECK(pow_full >= static_cast<double>(n) * (1.0 - 1e-9));
            if (c >= 1.0) {
                const double loglog = std::log2(std::log2(static_cast<double>(n)));
                CHECK(p.height == static_cast<uint32_t>(std::max(1.0, std::floor(loglog / c))));
            }
        }
    }
}

TEST_CASE("embed_point: boundaries and dyadic partition") {
    const EmbeddingParams p = EmbeddingParams::derive(300, 1.0);  // h=3
    CHECK(embed_point(0.0, p) == 0);
    CHECK(embed_point(1.0, p) == p.leaf_count() - 1);
    CHECK_THROWS_AS(embed_point(-0.01, p), std::out_of_range);
    CHECK_THROWS_AS(embed_point(1.01, p), std::out_of_range);

    EmbeddingParams four{256, 1.0, 2, 4};  // m=4, h=2 -> 16 dyadic leaves
    CHECK(embed_point(0.3, four) == 4);
    for (uint64_t i = 0; i < 16; ++i) {
        const double left = static_cast<double>(i) / 16.0;  // exact
        CHECK(embed_point(left, four) == i);
        if (i > 0) CHECK(embed_point(std::nextafter(left, 0.0), four) == i - 1);
    }
    // dyadic oracle: leaf of k/2^20 equals floor(k * 16 / 2^20) in integers
    Rng rng(9);
    for (int trial = 0; trial < 2000; ++trial) {
        const uint64_t k = rng.next_below(uint64_t{1} << 20);
        const double x = static_cast<double>(k) / static_cast<double>(uint64_t{1} << 20);
        CHECK(embed_point(x, four) == (k * 16) >> 20);
    }
}

TEST_CASE("same-point arrivals alternate and stay at discrepancy 1") {
    const EmbeddingParams p = EmbeddingParams::derive(16, 1.0);
    std::vector<double> arrivals(7, 0.37);
    const IntervalRunResult r = run_online_interval(arrivals, p, 0.5);
    for (size_t t = 0; t < arrivals.size(); ++t)
        CHECK(r.transcript.signs[t] == (t % 2 == 0 ? 1 : -1));
    CHECK(r.running_interval_disc == 1);
    CHECK(r.final_interval_disc == 1);
    CHECK(r.configured_n == 16);  // stream shorter than configured n is fine
}

TEST_CASE("empty stream has discrepancy zero") {
    const EmbeddingParams p = EmbeddingParams::derive(16, 1.0);
    const IntervalRunResult r = run_online_interval({}, p, 0.5);
    CHECK(r.running_interval_disc == 0);
    CHECK(r.tree_discrepancy == 0);
    CHECK(r.transcript.size() == 0);
}

TEST_CASE("online run matches the brute-force oracle at n = 10^4, seed 42") {
    Rng rng(42);
    const std::vector<double> arrivals = uniforms(rng, 10000);
    const EmbeddingParams p = EmbeddingParams::derive(10000, 1.0);
    const IntervalRunResult r = run_online_interval(arrivals, p, 1.0 / std::log(10000.0));
    CHECK(r.running_interval_disc == interval_discrepancy_bruteforce(r.transcript));
    CHECK(r.final_interval_disc == final_interval_discrepancy(r.transcript));
}

TEST_CASE("brute-force oracle: pinned examples") {
    // alternating signs in position order -> 1
    const Transcript alternating =
        make_transcript({0.1, 0.3, 0.5, 0.7}, {+1, -1, +1, -1});
    CHECK(interval_discrepancy_bruteforce(alternating) == 1);
    // all +1 -> whole interval
    const Transcript plus = make_transcript({0.1, 0.2, 0.5, 0.6, 0.9}, {1, 1, 1, 1, 1});
    CHECK(interval_discrepancy_bruteforce(plus) == 5);
    // running max reached at t = 2; the third arrival splits the pair again
    const Transcript probe = make_transcript({0.1, 0.9, 0.5}, {+1, +1, -1});
    CHECK(final_interval_discrepancy(probe, 2) == 2);
    CHECK(final_interval_discrepancy(probe) == 1);
    CHECK(interval_discrepancy_bruteforce(probe) == 2);
    CHECK(interval_discrepancy_bruteforce(probe, size_t{1}) == 1);
    const auto series = interval_discrepancy_bruteforce_series(probe);
    CHECK(series == std::vector<int64_t>{1, 2, 2});
}

TEST_CASE("offline alternating coloring") {
    const std::vector<double> sorted{0.1, 0.4, 0.6, 0.9};
    const std::vector<int8_t> signs = offline_alternating_coloring(sorted);
    CHECK(signs == std::vector<int8_t>{1, -1, 1, -1});
    Transcript t;
    t.positions = sorted;
    t.signs = signs;
    CHECK(final_interval_discrepancy(t) == 1);

    Transcript one = make_transcript({0.5}, {+1});
    one.signs = offline_alternating_coloring(one.positions);
    CHECK(final_interval_discrepancy(one) == 1);

    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Transcript random;
        random.positions = uniforms(rng, 1 + rng.next_below(1000));
        random.signs = offline_alternating_coloring(random.positions);
        CHECK(final_interval_discrepancy(random) <= 1);
    }
}

TEST_CASE("random coloring: reproducibility and calibration") {
    Rng a(12);
    Rng b(12);
    const std::vector<double> arrivals = uniforms(a, 500);
    Rng sign_a(99);
    Rng sign_b(99);
    CHECK(random_coloring(arrivals, sign_a).signs == random_coloring(arrivals, sign_b).signs);

    // binomial sanity: |sum of signs| <= 3 sqrt(n) over 10^4 draws
    Rng rng(7);
    int64_t sum = 0;
    for (int i = 0; i < 10000; ++i) sum += rng.next_sign();
    CHECK(std::llabs(sum) <= 300);

    // median running discrepancy at n = 10^4 lands in [0.5 sqrt n, 3 sqrt(n ln n)]
    std::vector<int64_t> discs;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Rng pos_rng(seed);
        const std::vector<double> positions = uniforms(pos_rng, 10000);
        Rng sign_rng = pos_rng.split(2);
        const Transcript t = random_coloring(positions, sign_rng);
        RunningDiscrepancyTracker tracker(positions);
        for (size_t j = 0; j < t.size(); ++j) tracker.add(t.positions[j], t.signs[j]);
        discs.push_back(tracker.running_discrepancy());
    }
    std::sort(discs.begin(), discs.end());
    const double median = 0.5 * static_cast<double>(discs[9] + discs[10]);
    CHECK(median >= 0.5 * 100.0);
    CHECK(median <= 3.0 * std::sqrt(10000.0 * std::log(10000.0)));
}

TEST_CASE("tracker equals oracle at every step, duplicates included") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 5 + rng.next_below(115);
        std::vector<double> positions = uniforms(rng, n);
        for (size_t j = 0; j + 1 < positions.size(); j += 7)
            positions[j + 1] = positions[j];  // deliberate duplicate coordinates
        Transcript t;
        t.positions = positions;
        t.signs.resize(n);
        for (auto& s : t.signs) s = static_cast<int8_t>(rng.next_sign());
        RunningDiscrepancyTracker tracker(positions);
        const auto series = interval_discrepancy_bruteforce_series(t);
        for (size_t j = 0; j < n; ++j) {
            tracker.add(t.positions[j], t.signs[j]);
            REQUIRE(tracker.running_discrepancy() == series[j]);
        }
        CHECK(tracker.arrivals() == n);
    }
}

TEST_CASE("tracker: duplicate stacking and prefix accessors") {
    const std::vector<double> positions{0.5, 0.5, 0.3};
    RunningDiscrepancyTracker tracker(positions);
    tracker.add(0.5, +1);
    CHECK(tracker.current_discrepancy() == 1);
    tracker.add(0.5, +1);
    CHECK(tracker.current_discrepancy() == 2);  // both arrivals stack at 0.5
    tracker.add(0.3, -1);
    CHECK(tracker.current_discrepancy() == 2);  // interval {0.5} still holds +2
    CHECK(tracker.total() == 1);
    CHECK(tracker.prefix_max() == 1);
    CHECK(tracker.prefix_min() == -1);
    CHECK(tracker.running_discrepancy() == 2);
    CHECK(tracker.running_prefix_max() == 2);
    CHECK(tracker.running_prefix_min_abs() == 1);
    CHECK_THROWS_AS(tracker.add(0.9, +1), std::invalid_argument);
    CHECK_THROWS_AS(tracker.add(0.5, 0), std::invalid_argument);
}

TEST_CASE("decomposition bound on a crafted transcript") {
    // cancelling halves inside both leaves of an m=2, h=1 embedding
    EmbeddingParams p{4, 1.0, 1, 2};
    const std::vector<double> positions{0.05, 0.1, 0.4, 0.45, 0.55, 0.6, 0.9, 0.95};
    const std::vector<int> signs{-1, -1, +1, +1, +1, +1, -1, -1};
    Transcript t = make_transcript(positions, signs);
    BalancedTree tree(p.tree_shape(), 1.0);
    std::vector<int64_t> occupancy(p.leaf_count(), 0);
    for (size_t j = 0; j < t.size(); ++j) {
        const uint64_t leaf = embed_point(t.positions[j], p);
        tree.apply_arrival(leaf, t.signs[j]);
        ++occupancy[leaf];
    }
    int64_t max_node = 0;
    for (uint64_t v = 0; v < tree.node_count(); ++v)
        max_node = std::max<int64_t>(max_node, std::llabs(tree.imbalance(v)));
    const int64_t max_occ = *std::max_element(occupancy.begin(), occupancy.end());
    const int64_t bound = 2 * p.arity * p.height * max_node + max_occ;
    CHECK(final_interval_discrepancy(t) <= bound);
    CHECK(max_node == 0);  // every node cancels; the bound rests on occupancy
}

TEST_SUITE_END();
