#include "discsim/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace discsim {

namespace {

uint64_t checked_pow(uint64_t base, uint32_t exp, uint64_t cap) {
    // min(base^exp, cap+1) without overflow
    uint64_t result = 1;
    for (uint32_t i = 0; i < exp; ++i) {
        if (result > cap / base) return cap + 1;
        result *= base;
    }
    return result;
}

uint32_t arity_for_height(uint64_t n, uint32_t h) {
    // smallest m with m^(h+1) >= n, at least 2; computed from pow() and then
    // adjusted with integer arithmetic so exact roots do not round the wrong way
    double guess = std::ceil(std::pow(static_cast<double>(n), 1.0 / (h + 1)));
    auto m = static_cast<uint64_t>(std::max(2.0, guess));
    while (m > 2 && checked_pow(m - 1, h + 1, n) >= n) --m;
    while (checked_pow(m, h + 1, n) < n) ++m;
    return static_cast<uint32_t>(std::max<uint64_t>(m, 2));
}

void check_transcript(const Transcript& t) {
    if (t.positions.size() != t.signs.size())
        throw std::invalid_argument("transcript: positions/signs length mismatch");
}

std::vector<double> sorted_unique(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Rank positions by (value, arrival index); grouping equal values is done by
// the callers that need it.
std::vector<size_t> order_by_position(std::span<const double> positions) {
    std::vector<size_t> order(positions.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (positions[a] != positions[b]) return positions[a] < positions[b];
        return a < b;
    });
    return order;
}

}  // namespace

EmbeddingParams EmbeddingParams::derive(uint64_t n, double height_divisor) {
    if (!(height_divisor > 0.0))
        throw std::invalid_argument("embedding: height divisor C must be positive");
    if (n < 4)
        throw std::invalid_argument("embedding: n must be at least 4 for h >= 1 and m >= 2");
    const double loglog = std::log2(std::log2(static_cast<double>(n)));
    auto h = static_cast<uint32_t>(std::max(1.0, std::floor(loglog / height_divisor)));
    uint32_t m = arity_for_height(n, h);
    while (h > 1 && checked_pow(m, h, n) > n) {
        --h;
        m = arity_for_height(n, h);
    }
    return EmbeddingParams{n, height_divisor, h, m};
}

uint64_t EmbeddingParams::leaf_count() const {
    uint64_t leaves = 1;
    for (uint32_t i = 0; i < height; ++i) leaves *= arity;
    return leaves;
}

uint64_t embed_point(double x, const EmbeddingParams& params) {
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::out_of_range("embed_point: position outside [0,1]");
    const uint64_t leaves = params.leaf_count();
    const auto raw = static_cast<uint64_t>(x * static_cast<double>(leaves));
    return std::min(raw, leaves - 1);
}

RunningDiscrepancyTracker::RunningDiscrepancyTracker(std::span<const double> all_positions)
    : coords_(sorted_unique(all_positions)), tree_(coords_.size()) {}

void RunningDiscrepancyTracker::add(double position, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("tracker: sign must be -1 or +1");
    const auto it = std::lower_bound(coords_.begin(), coords_.end(), position);
    if (it == coords_.end() || *it != position)
        throw std::invalid_argument("tracker: position was not registered up front");
    const auto rank = static_cast<size_t>(it - coords_.begin());
    tree_.range_add(rank, coords_.size(), sign);
    total_ += sign;
    ++arrivals_;
    running_disc_ = std::max(running_disc_, current_discrepancy());
    running_prefix_max_ = std::max(running_prefix_max_, prefix_max());
    running_prefix_min_abs_ = std::max(running_prefix_min_abs_, -prefix_min());
}

IntervalRunResult run_online_interval(std::span<const double> arrivals,
                                      const EmbeddingParams& params, double lambda) {
    BalancedTree tree(params.tree_shape(), lambda);
    RunningDiscrepancyTracker tracker(arrivals);
    Transcript transcript;
    transcript.positions.reserve(arrivals.size());
    transcript.signs.reserve(arrivals.size());
    std::vector<uint64_t> path;
    for (double x : arrivals) {
        const uint64_t leaf = embed_point(x, params);
        tree.root_leaf_path(leaf, path);
        const int sign = tree.choose_sign(path);
        tree.apply_arrival(leaf, sign);
        tracker.add(x, sign);
        transcript.positions.push_back(x);
        transcript.signs.push_back(static_cast<int8_t>(sign));
    }
    return IntervalRunResult{std::move(transcript),
                             params,
                             tree.tree_discrepancy(),
                             tracker.running_discrepancy(),
                             tracker.current_discrepancy(),
                             tree.potential(),
                             params.n};
}

int64_t final_interval_discrepancy(const Transcript& transcript, size_t up_to_time) {
    check_transcript(transcript);
    const size_t count = std::min(up_to_time, transcript.size());
    std::vector<size_t> order = order_by_position(
        std::span<const double>(transcript.positions.data(), count));
    int64_t prefix = 0;
    int64_t hi = 0;
    int64_t lo = 0;
    for (size_t k = 0; k < order.size();) {
        // arrivals sharing a position enter the prefix together
        size_t j = k;
        while (j < order.size() &&
               transcript.positions[order[j]] == transcript.positions[order[k]]) {
            prefix += transcript.signs[order[j]];
            ++j;
        }
        hi = std::max(hi, prefix);
        lo = std::min(lo, prefix);
        k = j;
    }
    return hi - lo;
}

namespace {

// Inserts arrivals one by one into a position-sorted aggregate and rescans
// the prefix sums after each step.
std::vector<int64_t> bruteforce_series_up_to(const Transcript& transcript, size_t horizon) {
    std::vector<std::pair<double, int64_t>> aggregate;  // (position, signed count)
    aggregate.reserve(horizon);
    std::vector<int64_t> series(horizon);
    int64_t best = 0;
    for (size_t t = 0; t < horizon; ++t) {
        const double x = transcript.positions[t];
        auto it = std::lower_bound(aggregate.begin(), aggregate.end(), x,
                                   [](const auto& entry, double pos) { return entry.first < pos; });
        if (it != aggregate.end() && it->first == x)
            it->second += transcript.signs[t];
        else
            aggregate.insert(it, {x, transcript.signs[t]});
        int64_t prefix = 0;
        int64_t hi = 0;
        int64_t lo = 0;
        for (const auto& [pos, s] : aggregate) {
            (void)pos;
            prefix += s;
            hi = std::max(hi, prefix);
            lo = std::min(lo, prefix);
        }
        best = std::max(best, hi - lo);
        series[t] = best;
    }
    return series;
}

}  // namespace

int64_t interval_discrepancy_bruteforce(const Transcript& transcript,
                                        std::optional<size_t> up_to_time) {
    check_transcript(transcript);
    const size_t horizon = std::min(up_to_time.value_or(transcript.size()), transcript.size());
    if (horizon == 0) return 0;
    return bruteforce_series_up_to(transcript, horizon).back();
}

std::vector<int64_t> interval_discrepancy_bruteforce_series(const Transcript& transcript) {
    check_transcript(transcript);
    return bruteforce_series_up_to(transcript, transcript.size());
}

std::vector<int8_t> offline_alternating_coloring(std::span<const double> positions) {
    std::vector<size_t> order = order_by_position(positions);
    std::vector<int8_t> signs(positions.size());
    for (size_t rank = 0; rank < order.size(); ++rank)
        signs[order[rank]] = (rank % 2 == 0) ? int8_t{1} : int8_t{-1};
    return signs;
}

Transcript random_coloring(std::span<const double> arrivals, Rng& rng) {
    Transcript transcript;
    transcript.positions.assign(arrivals.begin(), arrivals.end());
    transcript.signs.resize(arrivals.size());
    for (auto& s : transcript.signs) s = static_cast<int8_t>(rng.next_sign());
    return transcript;
}

}  // namespace discsim
