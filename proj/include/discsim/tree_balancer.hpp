#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "discsim/rng.hpp"

namespace discsim {

/// Complete m-ary tree geometry. A single node has height 0.
struct TreeShape {
    uint32_t arity;   // m, at least 2
    uint32_t height;  // h

    /// Validates arity >= 2 and that the node count fits uint64.
    /// Throws std::invalid_argument otherwise.
    static TreeShape create(uint32_t arity, uint32_t height);

    uint64_t node_count() const;  // (m^(h+1) - 1) / (m - 1)
    uint64_t leaf_count() const;  // m^h
};

/// Drift bookkeeping constants: beta = 100 and f(h) = 4 * (200*beta)^h,
/// i.e. f(0) = 4, f(h) = 200*beta*f(h-1).
inline constexpr int kDriftBeta = 100;
double drift_f(uint32_t h);

/// Sign that minimizes the potential increase given the path sinh-sum L:
/// -sign(L), with the L == 0 tie resolved to +1.
inline int sign_minimizing_potential(double path_sinh_sum) {
    if (path_sinh_sum > 0.0) return -1;
    if (path_sinh_sum < 0.0) return +1;
    return +1;
}

/// Potential value with an explicit overflow flag. Once any |lambda*d_v|
/// passes the floating guard the incremental value stops being meaningful
/// and the flag latches.
struct Potential {
    double value;
    bool overflowed;
};

/**
 * Complete m-ary tree with per-node signed imbalances and the cosh potential.
 *
 * Nodes are stored in implicit heap layout: the root is node 0 and the
 * children of node i are m*i+1 .. m*i+m, so root-leaf paths are computed by
 * arithmetic alone. Leaves occupy the last m^h slots.
 *
 * Every arrival picks a leaf; the greedy rule colors it with the sign of
 * -sum(sinh(lambda*d_v)) over the root-leaf path, which is equivalent to
 * minimizing the potential increase without ever evaluating cosh at large
 * arguments. All hyperbolic evaluations route through a guard at
 * |lambda*d| = 700 to stay finite.
 */
class BalancedTree {
public:
    BalancedTree(TreeShape shape, double lambda);

    const TreeShape& shape() const { return shape_; }
    double lambda() const { return lambda_; }
    uint64_t arrivals_seen() const { return arrivals_; }
    uint64_t node_count() const { return imbalance_.size(); }
    uint64_t first_leaf() const { return first_leaf_; }

    int64_t imbalance(uint64_t node) const;

    /// Running max of |d_v| over all nodes and all times ("during the
    /// entire process").
    int64_t max_abs_seen() const { return max_abs_seen_; }
    int64_t tree_discrepancy() const { return max_abs_seen_; }

    /// Root-first path of h+1 node ids ending at the requested leaf.
    std::vector<uint64_t> root_leaf_path(uint64_t leaf_index) const;
    void root_leaf_path(uint64_t leaf_index, std::vector<uint64_t>& out) const;

    /// L = sum of sinh(lambda * d_v) over the path. Clamped to +-DBL_MAX
    /// instead of overflowing.
    double path_sinh_sum(std::span<const uint64_t> path) const;

    /// Q = sum of cosh(lambda * d_v) over the path (same clamp).
    double path_cosh_sum(std::span<const uint64_t> path) const;

    /// Greedy sign for an arrival on this path; tie -> +1.
    int choose_sign(std::span<const uint64_t> path) const;

    /// Adds sign to every node on the root-leaf path of the given leaf and
    /// refreshes arrival count, running max and the incremental potential.
    void apply_arrival(uint64_t leaf_index, int sign);

    /// Incrementally maintained potential sum(cosh(lambda * d_v)).
    Potential potential() const { return {potential_, overflowed_}; }

    /// From-scratch recomputation (dual path used by consistency checks).
    double potential_recomputed() const;

    /// Overwrites a node's imbalance directly. Fixture/test support: bypasses
    /// the conservation invariant that arrivals maintain.
    void prescribe_imbalance(uint64_t node, int64_t value);

private:
    double node_cosh(int64_t d) const;
    void check_node(uint64_t node) const;

    TreeShape shape_;
    double lambda_;
    double sinh_lambda_;
    double cosh_lambda_minus_1_;
    uint64_t first_leaf_;
    std::vector<int64_t> imbalance_;
    int64_t max_abs_seen_ = 0;
    uint64_t arrivals_ = 0;
    double potential_;
    bool overflowed_ = false;
};

/// Outcome of checking the dangerous-set inequalities on one (x, y) pair.
/// When y lies in dangerous(x) the cosh and |sinh| ratio bounds (<= 11) are
/// checked; otherwise the no-cancellation bound
/// |sinh(lx)+sinh(ly)| >= 8/9 * max(|sinh(lx)|, |sinh(ly)|).
struct DangerousSetReport {
    bool hypothesis_ok;   // lambda > 0, n >= 2 and |x| >= ln(n)/lambda
    bool y_dangerous;     // y in [-x - ln(10)/lambda, -x + ln(10)/lambda]
    double cosh_ratio;    // dangerous case: max of the two cosh ratios
    double sinh_ratio;    // dangerous case: max of the two |sinh| ratios
    double combined;      // non-dangerous case: |sinh(lx) + sinh(ly)|
    double bound;         // non-dangerous case: 8/9 * max(|sinh|)
    bool pass;            // false whenever hypothesis_ok is false
    std::string message;  // set when the hypothesis fails
};

DangerousSetReport dangerous_set_facts_check(double x, double y, double lambda,
                                             uint64_t n);

/// One depth of the tightness construction: prescribed child imbalances
/// d_minus < 0 < d_plus, their sinh values, and the fraction of positive
/// children p_plus = |d_minus| / (|d_plus| + |d_minus|).
struct TightnessLevel {
    double d_minus;
    double d_plus;
    double sinh_minus;
    double sinh_plus;
    double p_plus;
    uint32_t positive_children;  // round(m * p_plus), clamped to [1, m-1]
};

struct TightnessReport {
    double lambda;           // 1 / ln(n)
    double root_imbalance;   // d_r = 5 ln(n) / lambda
    double cosh_root;        // cosh(lambda * d_r)
    std::vector<TightnessLevel> levels;
    uint64_t samples;
    double mean_abs_l;       // estimate of E[|L|] over uniform root-leaf paths
    double mean_q;           // estimate of E[Q]
    double ratio;            // mean_abs_l / mean_q
};

struct TightnessFixture {
    BalancedTree tree;       // prescribed imbalances rounded to integers
    TightnessReport report;
};

/**
 * Tightness construction for the separation bound: sinh(lambda*d_{i,-}) =
 * -(1 + 1/ln n)^(i-1) * sinh(lambda*d_r), sinh(lambda*d_{i,+}) the same with
 * an extra 1/ln n factor, with d_r = 5 ln(n)/lambda. Subtrees below a
 * negative node are empty, so the path sinh-sum cancels to ~0 unless every
 * node on the path is positive. E[|L|] and E[Q] are estimated by Monte Carlo
 * from the real-valued assignment; the returned tree stores the rounded
 * integer imbalances.
 *
 * Throws std::invalid_argument for infeasible parameters (arity < 2,
 * height < 1, n < 3, or a tree too large to materialize).
 */
TightnessFixture separation_tightness_fixture(uint32_t arity, uint32_t height,
                                              uint64_t n, uint64_t samples,
                                              Rng& rng);

}  // namespace discsim
