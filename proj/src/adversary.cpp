#include "discsim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace discsim {

namespace {

// Exact running interval discrepancy over distinct dyadic positions.
class ExactRunningDiscrepancy {
public:
    void add(const DyadicPosition& position, int sign) {
        const auto it = std::lower_bound(
            entries_.begin(), entries_.end(), position,
            [](const Entry& e, const DyadicPosition& p) { return e.position < p; });
        entries_.insert(it, Entry{position, sign});
        int64_t prefix = 0;
        int64_t hi = 0;
        int64_t lo = 0;
        for (const Entry& e : entries_) {
            prefix += e.sign;
            hi = std::max(hi, prefix);
            lo = std::min(lo, prefix);
        }
        running_ = std::max(running_, hi - lo);
    }

    int64_t running() const { return running_; }

private:
    struct Entry {
        DyadicPosition position;
        int sign;
    };
    std::vector<Entry> entries_;
    int64_t running_ = 0;
};

void check_sign(int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("adversary: sign must be -1 or +1");
}

}  // namespace

DyadicPosition AdaptiveAdversary::next() const {
    std::vector<uint8_t> bits = prefix_;
    bits.push_back(1);
    DyadicPosition mid(std::move(bits));
    if (mode_ == Mode::floating) {
        const double lo_d = lo();
        const double hi_d = hi();
        const double mid_d = mid.to_double();
        if (!(lo_d < mid_d && mid_d < hi_d))
            throw std::runtime_error(
                "adaptive adversary: gap degenerate at double precision; use exact mode");
    }
    return mid;
}

void AdaptiveAdversary::observe(const DyadicPosition& position, int sign) {
    check_sign(sign);
    if (!(position == next()))
        throw std::invalid_argument("adaptive adversary: position is not the last emitted arrival");
    // +1 -> the midpoint becomes the rightmost +1 (lo), -1 -> leftmost -1 (hi).
    prefix_.push_back(sign > 0 ? 1 : 0);
}

PotentialColorer::PotentialColorer(uint64_t n, double height_divisor)
    : params_(EmbeddingParams::derive(std::max<uint64_t>(n, 4), height_divisor)),
      tree_(params_.tree_shape(), 1.0 / std::log(static_cast<double>(std::max<uint64_t>(n, 4)))) {}

int PotentialColorer::color(double position) {
    const uint64_t leaf = embed_point(position, params_);
    tree_.root_leaf_path(leaf, path_);
    const int sign = tree_.choose_sign(path_);
    tree_.apply_arrival(leaf, sign);
    return sign;
}

AdversaryGameResult run_adaptive_game(OnlineColorer& algorithm, uint64_t n,
                                      AdaptiveAdversary::Mode mode) {
    AdaptiveAdversary adversary(mode);
    ExactRunningDiscrepancy disc;
    AdversaryGameResult result{};
    result.positions.reserve(n);
    result.signs.reserve(n);
    for (uint64_t t = 0; t < n; ++t) {
        DyadicPosition position = adversary.next();
        const int sign = algorithm.color(position.to_double());
        check_sign(sign);
        adversary.observe(position, sign);
        disc.add(position, sign);
        result.positions.push_back(std::move(position));
        result.signs.push_back(static_cast<int8_t>(sign));
    }
    result.discrepancy = disc.running();
    return result;
}

ObliviousScript build_oblivious_script(uint64_t n, Rng& rng) {
    ObliviousScript script;
    script.positions.reserve(n);
    script.guessed_signs.reserve(n);
    AdaptiveAdversary adversary(AdaptiveAdversary::Mode::exact);
    for (uint64_t t = 0; t < n; ++t) {
        // The position is fixed before the guess for this arrival is used.
        DyadicPosition position = adversary.next();
        const auto guess = static_cast<int8_t>(rng.next_sign());
        adversary.observe(position, guess);
        script.positions.push_back(std::move(position));
        script.guessed_signs.push_back(guess);
    }
    return script;
}

AdversaryGameResult run_script(const ObliviousScript& script, OnlineColorer& algorithm) {
    ExactRunningDiscrepancy disc;
    AdversaryGameResult result{};
    result.positions = script.positions;
    result.signs.reserve(script.positions.size());
    for (const DyadicPosition& position : script.positions) {
        const int sign = algorithm.color(position.to_double());
        check_sign(sign);
        disc.add(position, sign);
        result.signs.push_back(static_cast<int8_t>(sign));
    }
    result.discrepancy = disc.running();
    return result;
}

std::vector<int64_t> run_oblivious_trials(const ColorerFactory& make_algorithm, uint64_t n,
                                          uint64_t trials, Rng& rng) {
    std::vector<int64_t> discrepancies;
    discrepancies.reserve(trials);
    for (uint64_t trial = 0; trial < trials; ++trial) {
        Rng script_rng = rng.split(trial);
        const ObliviousScript script = build_oblivious_script(n, script_rng);
        std::unique_ptr<OnlineColorer> algorithm = make_algorithm(script, trial);
        discrepancies.push_back(run_script(script, *algorithm).discrepancy);
    }
    return discrepancies;
}

StochasticProbeReport stochastic_lowerbound_probe(uint64_t n_pieces, uint32_t pattern_length,
                                                  uint64_t trials, Rng& rng) {
    if (pattern_length < 1 || pattern_length > 6)
        throw std::invalid_argument("stochastic probe: pattern length must be in [1, 6]");
    if (n_pieces < 1) throw std::invalid_argument("stochastic probe: need at least one piece");

    StochasticProbeReport report{};
    report.pieces = n_pieces;
    report.pattern_length = pattern_length;
    report.trials = trials;

    const auto n = static_cast<double>(n_pieces);
    const auto big_n = static_cast<double>(pattern_length);
    double log_p = 0.0;
    for (uint32_t i = 0; i < pattern_length; ++i)
        log_p += std::log((n - i) / static_cast<double>(pattern_length - i));
    log_p += -big_n * std::log(n) + (n - big_n) * std::log1p(-1.0 / n);
    report.exact_piece_probability = std::exp(log_p);
    report.expected_pieces_per_trial = n * report.exact_piece_probability;
    report.pattern_probability_reference = std::exp2(-big_n * big_n);

    const uint32_t sub_pieces = 1u << pattern_length;
    std::vector<std::vector<double>> arrivals(n_pieces);
    for (uint64_t trial = 0; trial < trials; ++trial) {
        for (auto& piece : arrivals) piece.clear();
        for (uint64_t t = 0; t < n_pieces; ++t) {
            const double u = rng.next_unit();
            const auto piece = std::min<uint64_t>(static_cast<uint64_t>(u * n), n_pieces - 1);
            arrivals[piece].push_back(u * n - static_cast<double>(piece));  // fraction within piece
        }
        for (const auto& piece : arrivals) {
            if (piece.size() != pattern_length) continue;
            ++report.pieces_with_pattern_length_arrivals;
            // Adversarial consistency at sub-piece resolution for a fresh
            // random guessed coloring.
            int64_t lo = -1;
            int64_t hi = sub_pieces;
            bool match = true;
            for (double fraction : piece) {
                const auto idx = std::min<int64_t>(
                    static_cast<int64_t>(fraction * sub_pieces), sub_pieces - 1);
                if (!(lo < idx && idx < hi)) {
                    match = false;
                    break;
                }
                if (rng.next_sign() > 0)
                    lo = idx;
                else
                    hi = idx;
            }
            if (match) ++report.pattern_matches;
        }
    }
    return report;
}

}  // namespace discsim
