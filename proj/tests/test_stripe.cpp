#include <doctest.h>

#include <cmath>
#include <vector>

#include "discsim/rng.hpp"
#include "discsim/stripe.hpp"

using namespace discsim;

namespace {

std::vector<Point2> uniform_square(Rng& rng, size_t count) {
    std::vector<Point2> out(count);
    for (auto& p : out) {
        p.x = rng.next_unit();
        p.y = rng.next_unit();
    }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("stripe");

TEST_CASE("first arrival is a tie and gets +1") {
    const EmbeddingParams params = EmbeddingParams::derive(16, 1.0);
    std::vector<Point2> pts{{0.3, 0.8}};
    StripeState state(params, 0.5, pts);
    CHECK(state.choose_sign(pts[0]) == +1);
    CHECK(state.color(pts[0]) == +1);
    CHECK(state.transcript().signs == std::vector<int8_t>{1});
}

TEST_CASE("joint sign from prescribed path sums") {
    // L_x = sinh(0.3), L_y = -sinh(0.1) at lambda = 0.1 -> joint > 0 -> -1
    BalancedTree tree_x(TreeShape::create(2, 0), 0.1);
    BalancedTree tree_y(TreeShape::create(2, 0), 0.1);
    tree_x.prescribe_imbalance(0, 3);
    tree_y.prescribe_imbalance(0, -1);
    const double lx = tree_x.path_sinh_sum(tree_x.root_leaf_path(0));
    const double ly = tree_y.path_sinh_sum(tree_y.root_leaf_path(0));
    CHECK(lx == doctest::Approx(std::sinh(0.3)));
    CHECK(ly == doctest::Approx(-std::sinh(0.1)));
    CHECK(sign_minimizing_potential(lx + ly) == -1);
    CHECK(sign_minimizing_potential(-lx - ly) == +1);
}

TEST_CASE("stripe run matches per-axis brute-force oracles at n = 10^4, seed 7") {
    Rng rng(7);
    const std::vector<Point2> points = uniform_square(rng, 10000);
    const EmbeddingParams params = EmbeddingParams::derive(10000, 1.0);
    const StripeRunResult r = run_online_stripe(points, params, 1.0 / std::log(10000.0));

    const Transcript px = project_transcript(r.transcript, Axis::x);
    const Transcript py = project_transcript(r.transcript, Axis::y);
    const int64_t oracle_x = interval_discrepancy_bruteforce(px);
    const int64_t oracle_y = interval_discrepancy_bruteforce(py);
    CHECK(r.running_disc_x == oracle_x);
    CHECK(r.running_disc_y == oracle_y);
    CHECK(r.running_stripe_disc == std::max(oracle_x, oracle_y));
    CHECK(r.final_disc_x == final_interval_discrepancy(px));
    CHECK(r.final_disc_y == final_interval_discrepancy(py));
}

TEST_CASE("projection of the empty transcript") {
    Transcript2D empty;
    CHECK(project_transcript(empty, Axis::x).size() == 0);
    CHECK(project_transcript(empty, Axis::y).size() == 0);
}

TEST_CASE("shared arrivals: equal counts, equal root imbalance, max structure") {
    Rng rng(21);
    const std::vector<Point2> points = uniform_square(rng, 800);
    const EmbeddingParams params = EmbeddingParams::derive(800, 1.0);
    StripeState state(params, 1.0 / std::log(800.0), points);
    for (const Point2& p : points) state.color(p);
    CHECK(state.tree_x().arrivals_seen() == 800);
    CHECK(state.tree_y().arrivals_seen() == 800);
    CHECK(state.tree_x().imbalance(0) == state.tree_y().imbalance(0));
    CHECK(state.running_stripe_discrepancy() >= state.tracker_x().running_discrepancy());
    CHECK(state.running_stripe_discrepancy() >= state.tracker_y().running_discrepancy());
    CHECK(state.running_stripe_discrepancy() ==
          std::max(state.tracker_x().running_discrepancy(),
                   state.tracker_y().running_discrepancy()));
}

TEST_CASE("points outside the unit square are rejected") {
    const EmbeddingParams params = EmbeddingParams::derive(16, 1.0);
    std::vector<Point2> pts{{0.5, 0.5}};
    StripeState state(params, 0.5, pts);
    CHECK_THROWS_AS(state.choose_sign(Point2{1.5, 0.5}), std::out_of_range);
    CHECK_THROWS_AS(state.apply(Point2{0.5, -0.1}, +1), std::out_of_range);
}

TEST_SUITE_END();
