#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "discsim/interval.hpp"
#include "discsim/rng.hpp"

namespace discsim {

/**
 * Dyadic position in [0,1): the bit string b1 b2 ... after "0." in binary.
 * Adversary constructions only ever need midpoints of dyadic gaps, so exact
 * arithmetic reduces to appending bits; comparison is lexicographic with
 * missing bits read as 0. Every generated position ends in a 1 bit, which
 * keeps generated positions pairwise distinct.
 */
class DyadicPosition {
public:
    DyadicPosition() = default;
    explicit DyadicPosition(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

    const std::vector<uint8_t>& bits() const { return bits_; }

    double to_double() const {
        double value = 0.0;
        double scale = 0.5;
        for (uint8_t b : bits_) {
            if (b) value += scale;
            scale *= 0.5;
        }
        return value;
    }

    friend bool operator<(const DyadicPosition& a, const DyadicPosition& b) {
        const size_t len = std::max(a.bits_.size(), b.bits_.size());
        for (size_t i = 0; i < len; ++i) {
            const uint8_t ba = i < a.bits_.size() ? a.bits_[i] : 0;
            const uint8_t bb = i < b.bits_.size() ? b.bits_[i] : 0;
            if (ba != bb) return ba < bb;
        }
        return false;
    }
    friend bool operator==(const DyadicPosition& a, const DyadicPosition& b) {
        return !(a < b) && !(b < a);
    }

private:
    std::vector<uint8_t> bits_;
};

/**
 * Adaptive arrival generator: keeps the gap between the rightmost +1 point
 * (lo) and the leftmost -1 point (hi) and always emits its midpoint, so all
 * +1 points end up left of all -1 points no matter how the algorithm colors.
 *
 * The gap is always [P, P + 2^-k] for a dyadic prefix P, so the exact mode
 * never loses precision. The floating mode reproduces plain-double behavior
 * and throws std::runtime_error once the double midpoint collides with an
 * endpoint (roughly 52 arrivals per unit gap).
 */
class AdaptiveAdversary {
public:
    enum class Mode { exact, floating };

    explicit AdaptiveAdversary(Mode mode = Mode::exact) : mode_(mode) {}

    Mode mode() const { return mode_; }
    double lo() const { return DyadicPosition(prefix_).to_double(); }
    double hi() const { return lo() + std::exp2(-static_cast<double>(prefix_.size())); }

    /// Midpoint of the current gap.
    DyadicPosition next() const;

    /// Records the algorithm's sign for the last emitted arrival; +1 raises
    /// lo to the position, -1 lowers hi. Throws std::invalid_argument when
    /// the position is not the current midpoint.
    void observe(const DyadicPosition& position, int sign);

private:
    std::vector<uint8_t> prefix_;  // gap = [0.prefix, 0.prefix + 2^-k]
    Mode mode_;
};

/// Online coloring algorithm fed positions one at a time.
class OnlineColorer {
public:
    virtual ~OnlineColorer() = default;
    virtual int color(double position) = 0;
};

/// Greedy cosh-potential coloring through the interval embedding.
class PotentialColorer final : public OnlineColorer {
public:
    explicit PotentialColorer(uint64_t n, double height_divisor = 1.0);
    int color(double position) override;

private:
    EmbeddingParams params_;
    BalancedTree tree_;
    std::vector<uint64_t> path_;
};

class RandomColorer final : public OnlineColorer {
public:
    explicit RandomColorer(Rng rng) : rng_(rng) {}
    int color(double) override { return rng_.next_sign(); }

private:
    Rng rng_;
};

class ConstantColorer final : public OnlineColorer {
public:
    explicit ConstantColorer(int sign) : sign_(sign) {}
    int color(double) override { return sign_; }

private:
    int sign_;
};

class AlternatingColorer final : public OnlineColorer {
public:
    int color(double) override {
        next_ = -next_;
        return -next_;
    }

private:
    int next_ = +1;  // first arrival gets +1
};

/// Replays a fixed sign sequence (test/cheat algorithm).
class ScriptedColorer final : public OnlineColorer {
public:
    explicit ScriptedColorer(std::vector<int8_t> signs) : signs_(std::move(signs)) {}
    int color(double) override { return signs_.at(index_++); }

private:
    std::vector<int8_t> signs_;
    size_t index_ = 0;
};

struct AdversaryGameResult {
    std::vector<DyadicPosition> positions;  // arrival order
    std::vector<int8_t> signs;
    int64_t discrepancy;  // running interval discrepancy, exact order
};

/// Plays the adaptive adversary against an algorithm for n arrivals and
/// measures the running interval discrepancy on the exact position order.
AdversaryGameResult run_adaptive_game(OnlineColorer& algorithm, uint64_t n,
                                      AdaptiveAdversary::Mode mode = AdaptiveAdversary::Mode::exact);

/// Arrival sequence fixed before the algorithm runs: positions are what the
/// adaptive adversary would produce against the guessed coloring. The i-th
/// position depends only on guesses 1..i-1.
struct ObliviousScript {
    std::vector<DyadicPosition> positions;
    std::vector<int8_t> guessed_signs;
};

ObliviousScript build_oblivious_script(uint64_t n, Rng& rng);

/// Runs an algorithm over a fixed script; discrepancy is measured exactly.
AdversaryGameResult run_script(const ObliviousScript& script, OnlineColorer& algorithm);

using ColorerFactory =
    std::function<std::unique_ptr<OnlineColorer>(const ObliviousScript&, uint64_t trial)>;

/// Empirical discrepancy distribution over fresh scripts.
std::vector<int64_t> run_oblivious_trials(const ColorerFactory& make_algorithm, uint64_t n,
                                          uint64_t trials, Rng& rng);

struct StochasticProbeReport {
    uint64_t pieces;
    uint32_t pattern_length;  // N
    uint64_t trials;
    uint64_t pieces_with_pattern_length_arrivals;  // total over trials
    uint64_t pattern_matches;
    double exact_piece_probability;        // C(n,N) (1/n)^N (1-1/n)^(n-N)
    double expected_pieces_per_trial;      // n * p
    double pattern_probability_reference;  // 2^(-N^2), the discretized constant
};

/**
 * Simulates n uniform arrivals per trial over n equal pieces and counts, for
 * pieces with exactly N arrivals, how often the arrival sequence is
 * consistent with the adaptive-adversary construction for a random guessed
 * coloring at sub-piece resolution 2^N: each arrival, discretized to its
 * sub-piece, must fall strictly inside the open gap left by the previous
 * guesses. The first arrival is unconstrained, so N = 1 always matches.
 * Requires 1 <= N <= 6.
 */
StochasticProbeReport stochastic_lowerbound_probe(uint64_t n_pieces, uint32_t pattern_length,
                                                  uint64_t trials, Rng& rng);

}  // namespace discsim
