#include "discsim/stripe.hpp"

#include <stdexcept>

namespace discsim {

namespace {

std::vector<double> axis_values(std::span<const Point2> points, Axis axis) {
    std::vector<double> values;
    values.reserve(points.size());
    for (const Point2& p : points) values.push_back(axis == Axis::x ? p.x : p.y);
    return values;
}

}  // namespace

StripeState::StripeState(const EmbeddingParams& params, double lambda,
                         std::span<const Point2> all_points)
    : params_(params),
      tree_x_(params.tree_shape(), lambda),
      tree_y_(params.tree_shape(), lambda),
      tracker_x_(axis_values(all_points, Axis::x)),
      tracker_y_(axis_values(all_points, Axis::y)) {}

int StripeState::choose_sign(const Point2& p) const {
    tree_x_.root_leaf_path(embed_point(p.x, params_), path_x_);
    tree_y_.root_leaf_path(embed_point(p.y, params_), path_y_);
    const double joint = tree_x_.path_sinh_sum(path_x_) + tree_y_.path_sinh_sum(path_y_);
    return sign_minimizing_potential(joint);
}

void StripeState::apply(const Point2& p, int sign) {
    const uint64_t leaf_x = embed_point(p.x, params_);
    const uint64_t leaf_y = embed_point(p.y, params_);
    tree_x_.apply_arrival(leaf_x, sign);
    tree_y_.apply_arrival(leaf_y, sign);
    tracker_x_.add(p.x, sign);
    tracker_y_.add(p.y, sign);
    transcript_.xs.push_back(p.x);
    transcript_.ys.push_back(p.y);
    transcript_.signs.push_back(static_cast<int8_t>(sign));
}

int StripeState::color(const Point2& p) {
    const int sign = choose_sign(p);
    apply(p, sign);
    return sign;
}

StripeRunResult run_online_stripe(std::span<const Point2> arrivals,
                                  const EmbeddingParams& params, double lambda) {
    StripeState state(params, lambda, arrivals);
    for (const Point2& p : arrivals) state.color(p);
    return StripeRunResult{
        state.transcript(),
        params,
        state.tree_x().tree_discrepancy(),
        state.tree_y().tree_discrepancy(),
        state.tracker_x().running_discrepancy(),
        state.tracker_y().running_discrepancy(),
        state.running_stripe_discrepancy(),
        state.tracker_x().current_discrepancy(),
        state.tracker_y().current_discrepancy(),
        std::max(state.tracker_x().current_discrepancy(), state.tracker_y().current_discrepancy()),
    };
}

Transcript project_transcript(const Transcript2D& transcript, Axis axis) {
    if (transcript.xs.size() != transcript.signs.size() ||
        transcript.ys.size() != transcript.signs.size())
        throw std::invalid_argument("transcript2d: coordinate/sign length mismatch");
    Transcript out;
    out.positions = (axis == Axis::x) ? transcript.xs : transcript.ys;
    out.signs = transcript.signs;
    return out;
}

}  // namespace discsim
