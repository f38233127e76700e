#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "discsim/envy.hpp"
#include "discsim/rng.hpp"

using namespace discsim;

namespace {

std::vector<uint8_t> mask_of(std::initializer_list<int> bits) {
    return std::vector<uint8_t>(bits.begin(), bits.end());
}

std::vector<double> distinct_uniforms(Rng& rng, size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_unit();
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) return distinct_uniforms(rng, n);
    // shuffle back into arrival order
    for (size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.next_below(i)]);
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("envy");

TEST_CASE("cardinal envy: pinned examples") {
    const std::vector<double> v{0.9, 0.5, 0.1};
    CHECK(cardinal_envy(v, mask_of({0, 1, 0})) == doctest::Approx(0.5));  // 1.0 - 0.5
    CHECK(cardinal_envy(v, mask_of({1, 1, 1})) == 0.0);
    const std::vector<double> two{0.3, 0.2};
    CHECK(cardinal_envy(two, mask_of({0, 0})) == doctest::Approx(0.5));
    // player 1 holds {0.9} (no envy); player 2 holds {0.5, 0.1}: 0.9 - 0.6 = 0.3
    CHECK(pair_cardinal_envy(v, v, mask_of({1, 0, 0})) == doctest::Approx(0.3));
}

TEST_CASE("ordinal envy, prefix form: pinned examples") {
    // n = 4 ranked items, S = ranks {1, 3} (0-indexed items 0 and 2)
    const std::vector<double> ranked{0.8, 0.6, 0.4, 0.2};
    CHECK(ordinal_envy_prefix(ranked, mask_of({1, 0, 1, 0})) == 0);
    const std::vector<double> three{0.7, 0.4, 0.2};
    CHECK(ordinal_envy_prefix(three, mask_of({0, 0, 0})) == 3);
    CHECK(ordinal_envy_prefix(three, mask_of({1, 1, 1})) == 0);
    CHECK_THROWS_AS(ordinal_envy_prefix(std::vector<double>{0.5, 0.5}, mask_of({0, 1})), std::invalid_argument);
    // ranking ignores input order
    const std::vector<double> shuffled{0.2, 0.8, 0.4, 0.6};
    CHECK(ordinal_envy_prefix(shuffled, mask_of({0, 1, 1, 0})) == 0);
}

TEST_CASE("ordinal envy, cancellation form: pinned examples") {
    const std::vector<double> three{0.7, 0.4, 0.2};
    CHECK(ordinal_envy_cancellation(three, mask_of({0, 0, 0})) == 3);
    CHECK(ordinal_envy_cancellation(three, mask_of({1, 1, 1})) == 0);
    const std::vector<double> v{0.9, 0.5, 0.1};
    // 0.5 cancels 0.1, leaving {0.9}
    CHECK(ordinal_envy_cancellation(v, mask_of({0, 1, 0})) == 1);
    CHECK_THROWS_AS(ordinal_envy_cancellation(std::vector<double>{0.5, 0.5}, mask_of({0, 1})),
                    std::invalid_argument);
}

TEST_CASE("prefix and cancellation definitions agree exhaustively (n <= 8)") {
    for (size_t n = 1; n <= 8; ++n) {
        std::vector<double> values(n);
        for (size_t i = 0; i < n; ++i)
            values[i] = 1.0 - static_cast<double>(i + 1) / static_cast<double>(n + 2);
        for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
            std::vector<uint8_t> mask(n);
            for (size_t i = 0; i < n; ++i) mask[i] = (bits >> i) & 1;
            REQUIRE(ordinal_envy_prefix(values, mask) == ordinal_envy_cancellation(values, mask));
        }
    }
}

TEST_CASE("worst consistent valuation: construction and sandwich") {
    const double eps = 1e-6;
    const std::vector<double> two{0.6, 0.3};
    const std::vector<double> worst = worst_consistent_valuation(two, mask_of({0, 0}), eps);
    CHECK(worst[0] == doctest::Approx(1.0 - eps));
    CHECK(worst[1] == doctest::Approx(1.0 - 2.0 * eps));
    const double envy = cardinal_envy(worst, mask_of({0, 0}));
    CHECK(envy >= 2.0 - 4.0 * eps);
    CHECK(envy <= 2.0);

    // S = [n]: ordinal envy 0, any consistent valuation has cardinal envy 0
    const std::vector<double> all_mine = worst_consistent_valuation(two, mask_of({1, 1}), eps);
    CHECK(cardinal_envy(all_mine, mask_of({1, 1})) == 0.0);

    CHECK_THROWS_AS(worst_consistent_valuation(two, mask_of({0, 0}), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(worst_consistent_valuation(two, mask_of({0, 0}), 0.5),
                    std::invalid_argument);

    // random instances, n <= 10: envy_C(v') lands in [envy_O - n^2 eps, envy_O]
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const size_t n = 1 + rng.next_below(10);
        const std::vector<double> values = distinct_uniforms(rng, n);
        std::vector<uint8_t> mask(n);
        for (auto& m : mask) m = static_cast<uint8_t>(rng.next_below(2));
        const double tiny = 1e-9;
        const auto envy_o = static_cast<double>(ordinal_envy_prefix(values, mask));
        const double worst_envy =
            cardinal_envy(worst_consistent_valuation(values, mask, tiny), mask);
        CHECK(worst_envy <= envy_o + 1e-12);
        CHECK(worst_envy >= envy_o - tiny * static_cast<double>(n) * static_cast<double>(n) - 1e-12);
    }
}

TEST_CASE("ordinal discrepancy: pinned examples and dominance") {
    const std::vector<double> three{0.7, 0.4, 0.2};
    CHECK(ordinal_discrepancy(three, mask_of({0, 0, 0})) == 3);
    // alternating by rank -> discrepancy at most 1
    const std::vector<double> four{0.9, 0.7, 0.5, 0.3};
    CHECK(ordinal_discrepancy(four, mask_of({1, 0, 1, 0})) <= 1);

    Rng rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        const size_t n = 1 + rng.next_below(32);
        const std::vector<double> values = distinct_uniforms(rng, n);
        std::vector<uint8_t> mask(n);
        for (auto& m : mask) m = static_cast<uint8_t>(rng.next_below(2));
        const int64_t disc = ordinal_discrepancy(values, mask);
        const int64_t envy_o = ordinal_envy_prefix(values, mask);
        CHECK(disc >= envy_o);
        CHECK(static_cast<double>(envy_o) + 1e-12 >= cardinal_envy(values, mask));
    }
}

TEST_CASE("order invariance under monotone remapping") {
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const size_t n = 1 + rng.next_below(24);
        const std::vector<double> values = distinct_uniforms(rng, n);
        std::vector<uint8_t> mask(n);
        for (auto& m : mask) m = static_cast<uint8_t>(rng.next_below(2));
        std::vector<double> cubed(n);
        for (size_t i = 0; i < n; ++i) cubed[i] = values[i] * values[i] * values[i];
        CHECK(ordinal_envy_prefix(values, mask) == ordinal_envy_prefix(cubed, mask));
        CHECK(ordinal_envy_cancellation(values, mask) == ordinal_envy_cancellation(cubed, mask));
    }
}

TEST_CASE("online envy: single item") {
    const EmbeddingParams params = EmbeddingParams::derive(4, 1.0);
    const std::vector<double> v1{0.7};
    const std::vector<double> v2{0.4};
    const EnvyRunResult r = run_online_envy(v1, v2, CdfPair::identity(), params, 0.5);
    REQUIRE(r.allocation.size() == 1);
    if (r.allocation[0]) {
        CHECK(r.final_cardinal_envy_p1 == 0.0);
        CHECK(r.final_cardinal_envy_p2 == doctest::Approx(0.4));
    } else {
        CHECK(r.final_cardinal_envy_p1 == doctest::Approx(0.7));
        CHECK(r.final_cardinal_envy_p2 == 0.0);
    }
    CHECK(r.chain_ok);
}

TEST_CASE("online envy: chain holds on a 10^4-item uniform run, seed 3") {
    Rng root(3);
    Rng v1_rng = root.split(1);
    Rng v2_rng = root.split(2);
    std::vector<double> v1(10000);
    std::vector<double> v2(10000);
    for (auto& v : v1) v = v1_rng.next_unit();
    for (auto& v : v2) v = v2_rng.next_unit();
    const EmbeddingParams params = EmbeddingParams::derive(10000, 1.0);
    const EnvyRunResult r =
        run_online_envy(v1, v2, CdfPair::identity(), params, 1.0 / std::log(10000.0));

    CHECK(r.chain_ok);
    CHECK(r.final_cardinal_envy_p1 <= static_cast<double>(r.running_stripe_disc));
    CHECK(r.final_cardinal_envy_p2 <= static_cast<double>(r.running_stripe_disc));
    CHECK(r.final_ordinal_envy_p1 <= r.final_disc_x);
    CHECK(r.final_ordinal_envy_p2 <= r.final_disc_y);
    CHECK(r.running_ordinal_envy_p1 >= r.final_ordinal_envy_p1);
    CHECK(r.running_ordinal_envy_p2 >= r.final_ordinal_envy_p2);
    CHECK(r.running_cardinal_envy_p1 >= r.final_cardinal_envy_p1);

    // the returned allocation reproduces the reported ordinal envies
    std::vector<uint8_t> complement(r.allocation.size());
    for (size_t j = 0; j < complement.size(); ++j) complement[j] = r.allocation[j] ? 0 : 1;
    CHECK(ordinal_envy_prefix(v1, r.allocation) == r.final_ordinal_envy_p1);
    CHECK(ordinal_envy_prefix(v2, complement) == r.final_ordinal_envy_p2);
    CHECK(ordinal_envy_cancellation(v1, r.allocation) == r.final_ordinal_envy_p1);
    // sign -1 means the item joined player 1's set
    for (size_t j = 0; j < r.allocation.size(); ++j)
        CHECK(r.allocation[j] == (r.transcript.signs[j] == -1 ? 1 : 0));
}

TEST_CASE("running envy metrics equal from-scratch prefix recomputation") {
    Rng rng(61);
    const size_t n = 200;
    const std::vector<double> v1 = distinct_uniforms(rng, n);
    const std::vector<double> v2 = distinct_uniforms(rng, n);
    const EmbeddingParams params = EmbeddingParams::derive(n, 1.0);
    const double lambda = 1.0 / std::log(static_cast<double>(n));
    const EnvyRunResult r = run_online_envy(v1, v2, CdfPair::identity(), params, lambda);

    int64_t running_ordinal_p1 = 0;
    int64_t running_ordinal_p2 = 0;
    double running_cardinal_p1 = 0.0;
    double running_cardinal_p2 = 0.0;
    for (size_t t = 1; t <= n; ++t) {
        const std::vector<double> prefix1(v1.begin(), v1.begin() + t);
        const std::vector<double> prefix2(v2.begin(), v2.begin() + t);
        std::vector<uint8_t> mask(r.allocation.begin(), r.allocation.begin() + t);
        std::vector<uint8_t> complement(t);
        for (size_t j = 0; j < t; ++j) complement[j] = mask[j] ? 0 : 1;
        running_ordinal_p1 =
            std::max(running_ordinal_p1, ordinal_envy_prefix(prefix1, mask));
        running_ordinal_p2 =
            std::max(running_ordinal_p2, ordinal_envy_prefix(prefix2, complement));
        running_cardinal_p1 = std::max(running_cardinal_p1, cardinal_envy(prefix1, mask));
        running_cardinal_p2 = std::max(running_cardinal_p2, cardinal_envy(prefix2, complement));
    }
    CHECK(r.running_ordinal_envy_p1 == running_ordinal_p1);
    CHECK(r.running_ordinal_envy_p2 == running_ordinal_p2);
    CHECK(r.running_cardinal_envy_p1 == doctest::Approx(running_cardinal_p1).epsilon(1e-12));
    CHECK(r.running_cardinal_envy_p2 == doctest::Approx(running_cardinal_p2).epsilon(1e-12));
}

TEST_CASE("perfectly correlated ranks: complement prefix identity") {
    Rng rng(41);
    const std::vector<double> shared = distinct_uniforms(rng, 40);
    std::vector<uint8_t> mask(shared.size());
    for (auto& m : mask) m = static_cast<uint8_t>(rng.next_below(2));
    std::vector<uint8_t> complement(shared.size());
    for (size_t j = 0; j < mask.size(); ++j) complement[j] = mask[j] ? 0 : 1;

    // walk the shared ranking once: envies are the two one-sided maxima of g
    std::vector<size_t> order(shared.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return shared[a] > shared[b]; });
    int64_t g = 0;
    int64_t max_g = 0;
    int64_t min_g = 0;
    for (size_t idx : order) {
        g += mask[idx] ? -1 : +1;
        max_g = std::max(max_g, g);
        min_g = std::min(min_g, g);
    }
    CHECK(ordinal_envy_prefix(shared, mask) == max_g);
    CHECK(ordinal_envy_prefix(shared, complement) == -min_g);
}

TEST_CASE("envy instance bundles both players") {
    EnvyInstance instance{{0.9, 0.5, 0.1}, {0.2, 0.6, 0.4}, mask_of({1, 0, 0})};
    CHECK(instance.cardinal_envy_p1() == 0.0);  // 0.9 vs 0.6
    CHECK(instance.cardinal_envy_p2() == 0.0);  // holds 1.0 vs 0.2
    CHECK(instance.envy() == 0.0);
    CHECK(instance.ordinal_envy_p1() == 1);  // rank 1 item (0.9) sits with p1
    CHECK(instance.ordinal_envy_p2() == 0);  // p2 holds its two top-ranked items
    instance.allocated_to_p1 = mask_of({0, 0, 0});
    CHECK(instance.cardinal_envy_p1() == doctest::Approx(1.5));
    CHECK(instance.envy() == doctest::Approx(1.5));
    CHECK(instance.ordinal_envy_p1() == 3);
    CHECK(instance.ordinal_envy_p2() == 0);
}

TEST_CASE("online envy: empirical CDF mode and input validation") {
    const EmbeddingParams params = EmbeddingParams::derive(64, 1.0);
    Rng rng(55);
    const std::vector<double> v1 = distinct_uniforms(rng, 64);
    const std::vector<double> v2 = distinct_uniforms(rng, 64);
    const EnvyRunResult r = run_online_envy_empirical(v1, v2, params, 1.0 / std::log(64.0));
    CHECK(r.used_empirical_cdfs);
    CHECK(r.allocation.size() == 64);
    CHECK(r.chain_ok);

    const std::vector<double> bad{1.7};
    CHECK_THROWS_AS(
        run_online_envy(bad, std::vector<double>{0.5}, CdfPair::identity(), params, 0.5),
        std::out_of_range);
    CHECK_THROWS_AS(run_online_envy(std::vector<double>{0.5}, std::vector<double>{0.5, 0.6},
                                    CdfPair::identity(), params, 0.5),
                    std::invalid_argument);
}

TEST_SUITE_END();
