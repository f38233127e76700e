#include "discsim/envy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace discsim {

namespace {

void check_instance(std::span<const double> values, std::span<const uint8_t> allocated) {
    if (values.size() != allocated.size())
        throw std::invalid_argument("envy: values/allocation length mismatch");
}

void require_distinct(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("envy: valuations must be pairwise distinct");
}

// Items by decreasing value, ties broken by item index.
std::vector<size_t> ranking(std::span<const double> values) {
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    return order;
}

int64_t prefix_envy_over_ranking(std::span<const size_t> order,
                                 std::span<const uint8_t> allocated) {
    int64_t current = 0;
    int64_t best = 0;  // t = 0 prefix
    for (size_t idx : order) {
        current += allocated[idx] ? -1 : +1;
        best = std::max(best, current);
    }
    return best;
}

struct Fenwick {
    explicit Fenwick(size_t n) : tree(n + 1, 0) {}
    void add(size_t i) {
        for (++i; i < tree.size(); i += i & (~i + 1)) ++tree[i];
    }
    int64_t prefix(size_t i) const {  // count of inserted indices < i
        int64_t s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree[i];
        return s;
    }
    std::vector<int64_t> tree;
};

// Rank-among-seen transform: (count of previously seen values below v + 0.5)
// divided by (seen + 1).
std::vector<double> empirical_transform(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    Fenwick seen(sorted.size());
    std::vector<double> out(values.size());
    for (size_t t = 0; t < values.size(); ++t) {
        const auto rank = static_cast<size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), values[t]) - sorted.begin());
        out[t] = (static_cast<double>(seen.prefix(rank)) + 0.5) / static_cast<double>(t + 1);
        seen.add(rank);
    }
    return out;
}

EnvyRunResult run_envy_core(std::span<const double> v1, std::span<const double> v2,
                            std::span<const double> t1, std::span<const double> t2,
                            const EmbeddingParams& params, double lambda, bool empirical) {
    const size_t n = v1.size();
    std::vector<Point2> points(n);
    for (size_t j = 0; j < n; ++j) {
        if (!(t1[j] >= 0.0 && t1[j] <= 1.0) || !(t2[j] >= 0.0 && t2[j] <= 1.0))
            throw std::out_of_range("envy: transformed value outside [0,1]");
        points[j] = Point2{t1[j], t2[j]};
    }

    StripeState state(params, lambda, points);
    EnvyRunResult result{};
    result.params = params;
    result.used_empirical_cdfs = empirical;
    result.allocation.resize(n);

    double diff1 = 0.0;  // v1(S-bar) - v1(S)
    double diff2 = 0.0;  // v2(S) - v2(S-bar)
    for (size_t j = 0; j < n; ++j) {
        const int sign = state.color(points[j]);
        result.allocation[j] = (sign == -1) ? 1 : 0;
        diff1 += sign * v1[j];
        diff2 -= sign * v2[j];
        result.running_cardinal_envy_p1 =
            std::max(result.running_cardinal_envy_p1, std::max(diff1, 0.0));
        result.running_cardinal_envy_p2 =
            std::max(result.running_cardinal_envy_p2, std::max(diff2, 0.0));
        // Prefix form over the current allocation: player 1's ordinal envy is
        // a suffix sum of chi over x-ranked items, player 2's of -chi over
        // y-ranked items; both fall out of the trackers.
        const auto& tx = state.tracker_x();
        const auto& ty = state.tracker_y();
        const int64_t ordinal1 = std::max<int64_t>(0, tx.total() - tx.prefix_min());
        const int64_t ordinal2 = std::max<int64_t>(0, ty.prefix_max() - ty.total());
        result.running_ordinal_envy_p1 = std::max(result.running_ordinal_envy_p1, ordinal1);
        result.running_ordinal_envy_p2 = std::max(result.running_ordinal_envy_p2, ordinal2);
    }

    result.transcript = state.transcript();
    result.running_disc_x = state.tracker_x().running_discrepancy();
    result.running_disc_y = state.tracker_y().running_discrepancy();
    result.running_stripe_disc = state.running_stripe_discrepancy();
    result.final_disc_x = state.tracker_x().current_discrepancy();
    result.final_disc_y = state.tracker_y().current_discrepancy();
    result.final_stripe_disc = std::max(result.final_disc_x, result.final_disc_y);

    result.final_cardinal_envy_p1 = std::max(diff1, 0.0);
    result.final_cardinal_envy_p2 = std::max(diff2, 0.0);

    std::vector<uint8_t> complement(n);
    for (size_t j = 0; j < n; ++j) complement[j] = result.allocation[j] ? 0 : 1;
    result.final_ordinal_envy_p1 =
        prefix_envy_over_ranking(ranking(v1), result.allocation);
    result.final_ordinal_envy_p2 = prefix_envy_over_ranking(ranking(v2), complement);

    const double tol = 1e-9;
    result.chain_ok =
        result.final_disc_x >= result.final_ordinal_envy_p1 &&
        result.final_disc_y >= result.final_ordinal_envy_p2 &&
        static_cast<double>(result.final_ordinal_envy_p1) + tol >= result.final_cardinal_envy_p1 &&
        static_cast<double>(result.final_ordinal_envy_p2) + tol >= result.final_cardinal_envy_p2;
    return result;
}

}  // namespace

std::vector<uint8_t> EnvyInstance::allocated_to_p2() const {
    std::vector<uint8_t> complement(allocated_to_p1.size());
    for (size_t j = 0; j < complement.size(); ++j) complement[j] = allocated_to_p1[j] ? 0 : 1;
    return complement;
}

double EnvyInstance::cardinal_envy_p1() const { return cardinal_envy(v1, allocated_to_p1); }
double EnvyInstance::cardinal_envy_p2() const { return cardinal_envy(v2, allocated_to_p2()); }
int64_t EnvyInstance::ordinal_envy_p1() const { return ordinal_envy_prefix(v1, allocated_to_p1); }
int64_t EnvyInstance::ordinal_envy_p2() const { return ordinal_envy_prefix(v2, allocated_to_p2()); }
double EnvyInstance::envy() const { return pair_cardinal_envy(v1, v2, allocated_to_p1); }

double cardinal_envy(std::span<const double> values, std::span<const uint8_t> allocated) {
    check_instance(values, allocated);
    double diff = 0.0;
    for (size_t j = 0; j < values.size(); ++j)
        diff += allocated[j] ? -values[j] : values[j];
    return std::max(diff, 0.0);
}

double pair_cardinal_envy(std::span<const double> v1, std::span<const double> v2,
                          std::span<const uint8_t> allocated_to_p1) {
    check_instance(v1, allocated_to_p1);
    check_instance(v2, allocated_to_p1);
    std::vector<uint8_t> complement(allocated_to_p1.size());
    for (size_t j = 0; j < complement.size(); ++j) complement[j] = allocated_to_p1[j] ? 0 : 1;
    return std::max(cardinal_envy(v1, allocated_to_p1), cardinal_envy(v2, complement));
}

int64_t ordinal_envy_prefix(std::span<const double> values, std::span<const uint8_t> allocated) {
    check_instance(values, allocated);
    require_distinct(values);
    return prefix_envy_over_ranking(ranking(values), allocated);
}

int64_t ordinal_envy_cancellation(std::span<const double> values,
                                  std::span<const uint8_t> allocated) {
    check_instance(values, allocated);
    require_distinct(values);
    std::vector<double> unallocated;  // kept ascending
    std::vector<double> own;
    for (size_t j = 0; j < values.size(); ++j)
        (allocated[j] ? own : unallocated).push_back(values[j]);
    std::sort(unallocated.begin(), unallocated.end());
    std::sort(own.begin(), own.end(), std::greater<>());
    for (double v : own) {
        auto it = std::lower_bound(unallocated.begin(), unallocated.end(), v);
        if (it == unallocated.begin()) continue;  // nothing cheaper: remove nothing
        unallocated.erase(std::prev(it));
    }
    return static_cast<int64_t>(unallocated.size());
}

std::vector<double> worst_consistent_valuation(std::span<const double> values,
                                               std::span<const uint8_t> allocated,
                                               double epsilon) {
    check_instance(values, allocated);
    require_distinct(values);
    const size_t n = values.size();
    if (!(epsilon > 0.0) || !(epsilon < 1.0 / static_cast<double>(n) / static_cast<double>(n)))
        throw std::invalid_argument("worst_consistent_valuation: epsilon must be in (0, 1/n^2)");
    const std::vector<size_t> order = ranking(values);
    // argmax prefix
    int64_t current = 0;
    int64_t best = 0;
    size_t t_star = 0;
    for (size_t t = 0; t < n; ++t) {
        current += allocated[order[t]] ? -1 : +1;
        if (current > best) {
            best = current;
            t_star = t + 1;
        }
    }
    std::vector<double> out(n);
    for (size_t t = 0; t < n; ++t) {
        const double rank = static_cast<double>(t + 1);
        out[order[t]] = (t < t_star)
                            ? 1.0 - rank * epsilon
                            : epsilon * static_cast<double>(n - t) / static_cast<double>(n + 1);
    }
    return out;
}

int64_t ordinal_discrepancy(std::span<const double> values, std::span<const uint8_t> allocated) {
    check_instance(values, allocated);
    require_distinct(values);
    Transcript transcript;
    transcript.positions.assign(values.begin(), values.end());
    transcript.signs.resize(values.size());
    for (size_t j = 0; j < values.size(); ++j)
        transcript.signs[j] = allocated[j] ? int8_t{-1} : int8_t{1};
    return final_interval_discrepancy(transcript);
}

CdfPair CdfPair::identity() {
    auto id = [](double v) { return v; };
    return CdfPair{id, id};
}

EnvyRunResult run_online_envy(std::span<const double> v1, std::span<const double> v2,
                              const CdfPair& cdfs, const EmbeddingParams& params,
                              double lambda) {
    if (v1.size() != v2.size())
        throw std::invalid_argument("envy: valuation vectors must have equal length");
    if (!cdfs.f1 || !cdfs.f2) throw std::invalid_argument("envy: CDF pair not populated");
    std::vector<double> t1(v1.size());
    std::vector<double> t2(v2.size());
    for (size_t j = 0; j < v1.size(); ++j) {
        if (!(v1[j] >= 0.0 && v1[j] <= 1.0) || !(v2[j] >= 0.0 && v2[j] <= 1.0))
            throw std::out_of_range("envy: valuation outside [0,1]");
        t1[j] = cdfs.f1(v1[j]);
        t2[j] = cdfs.f2(v2[j]);
    }
    return run_envy_core(v1, v2, t1, t2, params, lambda, false);
}

EnvyRunResult run_online_envy_empirical(std::span<const double> v1, std::span<const double> v2,
                                        const EmbeddingParams& params, double lambda) {
    if (v1.size() != v2.size())
        throw std::invalid_argument("envy: valuation vectors must have equal length");
    for (size_t j = 0; j < v1.size(); ++j)
        if (!(v1[j] >= 0.0 && v1[j] <= 1.0) || !(v2[j] >= 0.0 && v2[j] <= 1.0))
            throw std::out_of_range("envy: valuation outside [0,1]");
    const std::vector<double> t1 = empirical_transform(v1);
    const std::vector<double> t2 = empirical_transform(v2);
    return run_envy_core(v1, v2, t1, t2, params, lambda, true);
}

}  // namespace discsim
