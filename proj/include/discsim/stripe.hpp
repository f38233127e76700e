#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "discsim/interval.hpp"
#include "discsim/tree_balancer.hpp"

namespace discsim {

struct Point2 {
    double x;
    double y;
};

enum class Axis { x, y };

/// 2-D transcript: arrival coordinates in the unit square plus the single
/// shared sign assigned to each arrival.
struct Transcript2D {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<int8_t> signs;

    size_t size() const { return signs.size(); }
};

/**
 * Two balanced trees (one per axis) driven by a joint potential: each
 * arrival gets the single sign -sign(L_x + L_y), tie -> +1, which is applied
 * to both trees and both trackers. Stripe discrepancy is the max of the two
 * axis-projection interval discrepancies, running over time.
 */
class StripeState {
public:
    /// all_points registers every coordinate with the per-axis trackers
    /// (measurement only, exactly like the 1-D tracker).
    StripeState(const EmbeddingParams& params, double lambda, std::span<const Point2> all_points);

    /// Joint greedy sign for a point; throws std::out_of_range outside the
    /// unit square.
    int choose_sign(const Point2& p) const;

    /// Applies a sign to both trees and both trackers and records the arrival.
    void apply(const Point2& p, int sign);

    /// choose_sign + apply.
    int color(const Point2& p);

    const BalancedTree& tree_x() const { return tree_x_; }
    const BalancedTree& tree_y() const { return tree_y_; }
    const RunningDiscrepancyTracker& tracker_x() const { return tracker_x_; }
    const RunningDiscrepancyTracker& tracker_y() const { return tracker_y_; }
    const Transcript2D& transcript() const { return transcript_; }
    const EmbeddingParams& params() const { return params_; }

    int64_t running_stripe_discrepancy() const {
        return std::max(tracker_x_.running_discrepancy(), tracker_y_.running_discrepancy());
    }
    int64_t current_stripe_discrepancy() const {
        return std::max(tracker_x_.current_discrepancy(), tracker_y_.current_discrepancy());
    }

private:
    EmbeddingParams params_;
    BalancedTree tree_x_;
    BalancedTree tree_y_;
    RunningDiscrepancyTracker tracker_x_;
    RunningDiscrepancyTracker tracker_y_;
    Transcript2D transcript_;
    mutable std::vector<uint64_t> path_x_;
    mutable std::vector<uint64_t> path_y_;
};

struct StripeRunResult {
    Transcript2D transcript;
    EmbeddingParams params;
    int64_t tree_disc_x;
    int64_t tree_disc_y;
    int64_t running_disc_x;
    int64_t running_disc_y;
    int64_t running_stripe_disc;  // max of the two, running over time
    int64_t final_disc_x;
    int64_t final_disc_y;
    int64_t final_stripe_disc;
};

StripeRunResult run_online_stripe(std::span<const Point2> arrivals,
                                  const EmbeddingParams& params, double lambda);

/// 1-D transcript with the chosen coordinate and the same signs.
Transcript project_transcript(const Transcript2D& transcript, Axis axis);

}  // namespace discsim
