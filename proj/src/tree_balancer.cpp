#include "discsim/tree_balancer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace discsim {

namespace {

// |lambda * d| beyond this would push sinh/cosh outside double range.
constexpr double kHyperbolicGuard = 700.0;

// log(cosh(a)) and log(|sinh(a)|), stable for any magnitude.
double log_cosh(double a) {
    a = std::fabs(a);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_abs_sinh(double a) {
    a = std::fabs(a);
    return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0);
}

double clamped_exp(double lg) {
    if (lg > 708.0) return std::numeric_limits<double>::max();
    return std::exp(lg);
}

uint64_t checked_node_count(uint64_t m, uint32_t h) {
    // count = 1 + m + m^2 + ... + m^h with overflow detection
    uint64_t count = 1;
    uint64_t level = 1;
    for (uint32_t depth = 0; depth < h; ++depth) {
        if (level > std::numeric_limits<uint64_t>::max() / m)
            throw std::invalid_argument("tree shape: node count overflows uint64");
        level *= m;
        if (count > std::numeric_limits<uint64_t>::max() - level)
            throw std::invalid_argument("tree shape: node count overflows uint64");
        count += level;
    }
    return count;
}

}  // namespace

TreeShape TreeShape::create(uint32_t arity, uint32_t height) {
    if (arity < 2) throw std::invalid_argument("tree shape: arity must be >= 2");
    checked_node_count(arity, height);
    return TreeShape{arity, height};
}

uint64_t TreeShape::node_count() const { return checked_node_count(arity, height); }

uint64_t TreeShape::leaf_count() const {
    uint64_t leaves = 1;
    for (uint32_t depth = 0; depth < height; ++depth) leaves *= arity;
    return leaves;
}

double drift_f(uint32_t h) {
    return 4.0 * std::pow(200.0 * kDriftBeta, static_cast<double>(h));
}

BalancedTree::BalancedTree(TreeShape shape, double lambda)
    : shape_(TreeShape::create(shape.arity, shape.height)), lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("balanced tree: lambda must be positive and finite");
    const uint64_t nodes = shape_.node_count();
    imbalance_.assign(nodes, 0);
    first_leaf_ = nodes - shape_.leaf_count();
    sinh_lambda_ = std::sinh(lambda_);
    cosh_lambda_minus_1_ = std::cosh(lambda_) - 1.0;
    potential_ = static_cast<double>(nodes);  // cosh(0) per node
}

void BalancedTree::check_node(uint64_t node) const {
    if (node >= imbalance_.size()) throw std::out_of_range("balanced tree: node id out of range");
}

int64_t BalancedTree::imbalance(uint64_t node) const {
    check_node(node);
    return imbalance_[node];
}

std::vector<uint64_t> BalancedTree::root_leaf_path(uint64_t leaf_index) const {
    std::vector<uint64_t> path;
    root_leaf_path(leaf_index, path);
    return path;
}

void BalancedTree::root_leaf_path(uint64_t leaf_index, std::vector<uint64_t>& out) const {
    if (leaf_index >= shape_.leaf_count())
        throw std::out_of_range("balanced tree: leaf index out of range");
    out.assign(shape_.height + 1, 0);
    uint64_t node = first_leaf_ + leaf_index;
    for (uint32_t depth = shape_.height;; --depth) {
        out[depth] = node;
        if (depth == 0) break;
        node = (node - 1) / shape_.arity;
    }
}

double BalancedTree::path_sinh_sum(std::span<const uint64_t> path) const {
    double max_arg = 0.0;
    for (uint64_t node : path) {
        check_node(node);
        max_arg = std::max(max_arg, std::fabs(lambda_ * static_cast<double>(imbalance_[node])));
    }
    if (max_arg <= kHyperbolicGuard) {
        double sum = 0.0;
        for (uint64_t node : path) sum += std::sinh(lambda_ * static_cast<double>(imbalance_[node]));
        return sum;
    }
    // Guarded path: factor out exp(max_arg) so each term stays in [-1, 1].
    double scaled = 0.0;
    for (uint64_t node : path) {
        const double a = lambda_ * static_cast<double>(imbalance_[node]);
        const double mag = std::fabs(a);
        const double term = 0.5 * (std::exp(mag - max_arg) - std::exp(-mag - max_arg));
        scaled += (a < 0.0) ? -term : term;
    }
    if (scaled == 0.0) return 0.0;
    const double lg = max_arg + std::log(std::fabs(scaled));
    const double mag = clamped_exp(lg);
    return scaled < 0.0 ? -mag : mag;
}

double BalancedTree::path_cosh_sum(std::span<const uint64_t> path) const {
    double max_arg = 0.0;
    for (uint64_t node : path) {
        check_node(node);
        max_arg = std::max(max_arg, std::fabs(lambda_ * static_cast<double>(imbalance_[node])));
    }
    if (max_arg <= kHyperbolicGuard) {
        double sum = 0.0;
        for (uint64_t node : path) sum += std::cosh(lambda_ * static_cast<double>(imbalance_[node]));
        return sum;
    }
    double scaled = 0.0;
    for (uint64_t node : path) {
        const double mag = std::fabs(lambda_ * static_cast<double>(imbalance_[node]));
        scaled += 0.5 * (std::exp(mag - max_arg) + std::exp(-mag - max_arg));
    }
    return clamped_exp(max_arg + std::log(scaled));
}

int BalancedTree::choose_sign(std::span<const uint64_t> path) const {
    double max_arg = 0.0;
    for (uint64_t node : path) {
        check_node(node);
        max_arg = std::max(max_arg, std::fabs(lambda_ * static_cast<double>(imbalance_[node])));
    }
    double sum = 0.0;
    if (max_arg <= kHyperbolicGuard) {
        for (uint64_t node : path) sum += std::sinh(lambda_ * static_cast<double>(imbalance_[node]));
    } else {
        for (uint64_t node : path) {
            const double a = lambda_ * static_cast<double>(imbalance_[node]);
            const double mag = std::fabs(a);
            const double term = 0.5 * (std::exp(mag - max_arg) - std::exp(-mag - max_arg));
            sum += (a < 0.0) ? -term : term;
        }
    }
    return sign_minimizing_potential(sum);
}

void BalancedTree::apply_arrival(uint64_t leaf_index, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("balanced tree: sign must be -1 or +1");
    if (leaf_index >= shape_.leaf_count())
        throw std::out_of_range("balanced tree: leaf index out of range");
    uint64_t node = first_leaf_ + leaf_index;
    for (;;) {
        const int64_t old = imbalance_[node];
        const int64_t fresh = old + sign;
        imbalance_[node] = fresh;
        max_abs_seen_ = std::max<int64_t>(max_abs_seen_, std::llabs(fresh));
        if (!overflowed_) {
            const double a_old = lambda_ * static_cast<double>(old);
            const double a_new = lambda_ * static_cast<double>(fresh);
            if (std::fabs(a_old) > kHyperbolicGuard || std::fabs(a_new) > kHyperbolicGuard) {
                overflowed_ = true;
            } else {
                // cosh(a +- lambda) - cosh(a) = cosh(a)(cosh(lambda)-1) +- sinh(a)sinh(lambda)
                const double e = std::exp(a_old);
                const double c = 0.5 * (e + 1.0 / e);
                const double s = 0.5 * (e - 1.0 / e);
                potential_ += c * cosh_lambda_minus_1_ + sign * s * sinh_lambda_;
            }
        }
        if (node == 0) break;
        node = (node - 1) / shape_.arity;
    }
    ++arrivals_;
}

double BalancedTree::node_cosh(int64_t d) const {
    const double a = lambda_ * static_cast<double>(d);
    if (std::fabs(a) > kHyperbolicGuard) return std::numeric_limits<double>::infinity();
    return std::cosh(a);
}

double BalancedTree::potential_recomputed() const {
    double sum = 0.0;
    for (int64_t d : imbalance_) sum += node_cosh(d);
    return sum;
}

void BalancedTree::prescribe_imbalance(uint64_t node, int64_t value) {
    check_node(node);
    const int64_t old = imbalance_[node];
    imbalance_[node] = value;
    max_abs_seen_ = std::max<int64_t>(max_abs_seen_, std::llabs(value));
    if (overflowed_) return;
    const double a_old = lambda_ * static_cast<double>(old);
    const double a_new = lambda_ * static_cast<double>(value);
    if (std::fabs(a_old) > kHyperbolicGuard || std::fabs(a_new) > kHyperbolicGuard) {
        overflowed_ = true;
        return;
    }
    potential_ += std::cosh(a_new) - std::cosh(a_old);
}

DangerousSetReport dangerous_set_facts_check(double x, double y, double lambda, uint64_t n) {
    DangerousSetReport report{};
    if (!(lambda > 0.0) || n < 2) {
        report.message = "lambda must be positive and n >= 2";
        return report;
    }
    const double threshold = std::log(static_cast<double>(n)) / lambda;
    if (std::fabs(x) < threshold) {
        report.message = "|x| below ln(n)/lambda";
        return report;
    }
    report.hypothesis_ok = true;

    const double half_width = std::log(10.0) / lambda;
    report.y_dangerous = (y >= -x - half_width) && (y <= -x + half_width);

    const double lx = lambda * x;
    const double ly = lambda * y;
    if (report.y_dangerous) {
        const double lc = log_cosh(lx) - log_cosh(ly);
        report.cosh_ratio = clamped_exp(std::fabs(lc));
        const double ls = log_abs_sinh(lx) - log_abs_sinh(ly);
        report.sinh_ratio = clamped_exp(std::fabs(ls));
        report.pass = report.cosh_ratio <= 11.0 && report.sinh_ratio <= 11.0;
    } else {
        // Scale by exp(max |arg|) so the comparison never overflows.
        const double m = std::max(std::fabs(lx), std::fabs(ly));
        auto scaled_sinh = [m](double a) {
            const double mag = std::fabs(a);
            const double t = 0.5 * (std::exp(mag - m) - std::exp(-mag - m));
            return a < 0.0 ? -t : t;
        };
        const double sx = scaled_sinh(lx);
        const double sy = scaled_sinh(ly);
        const double combined_scaled = std::fabs(sx + sy);
        const double bound_scaled = (8.0 / 9.0) * std::max(std::fabs(sx), std::fabs(sy));
        report.pass = combined_scaled >= bound_scaled;
        report.combined = combined_scaled == 0.0
                              ? 0.0
                              : clamped_exp(m + std::log(combined_scaled));
        report.bound = bound_scaled == 0.0 ? 0.0 : clamped_exp(m + std::log(bound_scaled));
    }
    return report;
}

TightnessFixture separation_tightness_fixture(uint32_t arity, uint32_t height, uint64_t n,
                                              uint64_t samples, Rng& rng) {
    if (arity < 2) throw std::invalid_argument("tightness fixture: arity must be >= 2");
    if (height < 1) throw std::invalid_argument("tightness fixture: height must be >= 1");
    if (n < 3) throw std::invalid_argument("tightness fixture: n must be >= 3");
    TreeShape shape = TreeShape::create(arity, height);
    if (shape.node_count() > (uint64_t{1} << 26))
        throw std::invalid_argument("tightness fixture: tree too large to materialize");

    TightnessReport report{};
    const double log_n = std::log(static_cast<double>(n));
    report.lambda = 1.0 / log_n;
    report.root_imbalance = 5.0 * log_n / report.lambda;  // 5 ln(n)^2
    const double sinh_root = std::sinh(report.lambda * report.root_imbalance);
    report.cosh_root = std::cosh(report.lambda * report.root_imbalance);
    if (!std::isfinite(sinh_root))
        throw std::invalid_argument("tightness fixture: n too large, sinh(5 ln n) overflows");

    const double growth = 1.0 + 1.0 / log_n;
    report.levels.resize(height);
    double factor = 1.0;
    for (uint32_t i = 0; i < height; ++i) {
        TightnessLevel& lv = report.levels[i];
        lv.sinh_minus = -factor * sinh_root;
        lv.sinh_plus = factor * sinh_root / log_n;
        lv.d_minus = std::asinh(lv.sinh_minus) / report.lambda;
        lv.d_plus = std::asinh(lv.sinh_plus) / report.lambda;
        lv.p_plus = std::fabs(lv.d_minus) / (std::fabs(lv.d_plus) + std::fabs(lv.d_minus));
        const auto rounded = static_cast<uint32_t>(std::llround(lv.p_plus * arity));
        lv.positive_children = std::clamp<uint32_t>(rounded, 1, arity - 1);
        factor *= growth;
    }

    // Monte Carlo over uniform root-leaf paths of the real-valued assignment.
    report.samples = samples;
    auto cosh_from_sinh = [](double s) {
        const double mag = std::fabs(s);
        if (mag > 1e150) return mag;
        return std::sqrt(1.0 + s * s);
    };
    double sum_abs_l = 0.0;
    double sum_q = 0.0;
    for (uint64_t it = 0; it < samples; ++it) {
        double l = sinh_root;
        double q = report.cosh_root;
        bool alive = true;
        for (uint32_t i = 0; i < height; ++i) {
            if (!alive) {
                q += 1.0;  // empty subtree: d = 0
                continue;
            }
            const TightnessLevel& lv = report.levels[i];
            if (rng.next_below(arity) < lv.positive_children) {
                l += lv.sinh_plus;
                q += cosh_from_sinh(lv.sinh_plus);
            } else {
                l += lv.sinh_minus;
                q += cosh_from_sinh(lv.sinh_minus);
                alive = false;
            }
        }
        sum_abs_l += std::fabs(l);
        sum_q += q;
    }
    report.mean_abs_l = samples ? sum_abs_l / static_cast<double>(samples) : 0.0;
    report.mean_q = samples ? sum_q / static_cast<double>(samples) : 0.0;
    report.ratio = report.mean_q > 0.0 ? report.mean_abs_l / report.mean_q : 0.0;

    // Materialize with integer-rounded imbalances: the first positive_children
    // children of an alive node are positive, subtrees under negative nodes
    // stay empty (imbalance 0).
    BalancedTree tree(shape, report.lambda);
    tree.prescribe_imbalance(0, std::llround(report.root_imbalance));
    std::vector<uint8_t> alive(shape.node_count(), 0);
    alive[0] = 1;
    uint64_t level_begin = 0;
    uint64_t level_size = 1;
    for (uint32_t depth = 0; depth < height; ++depth) {
        const TightnessLevel& lv = report.levels[depth];
        const int64_t d_plus = std::llround(lv.d_plus);
        const int64_t d_minus = std::llround(lv.d_minus);
        const uint64_t child_begin = level_begin + level_size;
        for (uint64_t offset = 0; offset < level_size; ++offset) {
            const uint64_t parent = level_begin + offset;
            if (!alive[parent]) continue;
            const uint64_t first_child = child_begin + offset * arity;
            for (uint32_t c = 0; c < arity; ++c) {
                const uint64_t child = first_child + c;
                if (c < lv.positive_children) {
                    tree.prescribe_imbalance(child, d_plus);
                    alive[child] = 1;
                } else {
                    tree.prescribe_imbalance(child, d_minus);
                }
            }
        }
        level_begin = child_begin;
        level_size *= arity;
    }
    return TightnessFixture{std::move(tree), std::move(report)};
}

}  // namespace discsim
