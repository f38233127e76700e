#include "discsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "discsim/adversary.hpp"
#include "discsim/envy.hpp"
#include "discsim/experiment.hpp"
#include "discsim/interval.hpp"
#include "discsim/rng.hpp"
#include "discsim/stripe.hpp"
#include "discsim/tree_balancer.hpp"

namespace discsim {

namespace {

class SuiteBuilder {
public:
    explicit SuiteBuilder(std::string name) { report_.suite = std::move(name); }

    void check(const std::string& name, bool pass, const std::string& detail = "") {
        report_.checks.push_back(VerifyCheck{name, pass, detail});
    }

    VerifyReport finish() {
        report_.pass = std::all_of(report_.checks.begin(), report_.checks.end(),
                                   [](const VerifyCheck& c) { return c.pass; });
        return std::move(report_);
    }

private:
    VerifyReport report_;
};

std::vector<double> uniform_positions(Rng& rng, size_t count) {
    std::vector<double> out(count);
    for (auto& x : out) x = rng.next_unit();
    return out;
}

// Tracker output must equal the brute-force oracle at every time step.
void suite_oracles(SuiteBuilder& b) {
    uint64_t mismatches = 0;
    uint64_t steps = 0;
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        Rng root(seed);
        Rng pos_rng = root.split(1);
        Rng sign_rng = root.split(2);
        const size_t n = 2 + pos_rng.next_below(299);
        const std::vector<double> positions = uniform_positions(pos_rng, n);
        const EmbeddingParams params = EmbeddingParams::derive(std::max<uint64_t>(n, 4), 1.0);
        const double lambda = 1.0 / std::log(static_cast<double>(std::max<uint64_t>(n, 4)));

        Transcript transcripts[2];
        transcripts[0] = run_online_interval(positions, params, lambda).transcript;
        transcripts[1] = random_coloring(positions, sign_rng);
        for (const Transcript& t : transcripts) {
            RunningDiscrepancyTracker tracker(t.positions);
            const std::vector<int64_t> oracle = interval_discrepancy_bruteforce_series(t);
            for (size_t j = 0; j < t.size(); ++j) {
                tracker.add(t.positions[j], t.signs[j]);
                ++steps;
                if (tracker.running_discrepancy() != oracle[j]) ++mismatches;
            }
        }
    }
    std::ostringstream detail;
    detail << steps << " time steps compared, " << mismatches << " mismatches";
    b.check("tracker-equals-bruteforce", mismatches == 0, detail.str());
}

void suite_invariants(SuiteBuilder& b) {
    // Conservation + monotone running max on random greedy runs.
    {
        bool conservation = true;
        bool monotone = true;
        Rng rng(11);
        for (int trial = 0; trial < 6 && conservation; ++trial) {
            const uint32_t m = 2 + static_cast<uint32_t>(rng.next_below(3));
            const uint32_t h = 1 + static_cast<uint32_t>(rng.next_below(3));
            BalancedTree tree(TreeShape::create(m, h), 0.2);
            int64_t last_max = 0;
            std::vector<uint64_t> path;
            for (int t = 0; t < 300; ++t) {
                const uint64_t leaf = rng.next_below(tree.shape().leaf_count());
                tree.root_leaf_path(leaf, path);
                tree.apply_arrival(leaf, tree.choose_sign(path));
                if (tree.tree_discrepancy() < last_max) monotone = false;
                last_max = tree.tree_discrepancy();
                if (t % 37 != 0) continue;
                for (uint64_t v = 0; v < tree.first_leaf(); ++v) {
                    int64_t sum = 0;
                    for (uint32_t c = 1; c <= m; ++c)
                        sum += tree.imbalance(m * v + c);
                    if (sum != tree.imbalance(v)) conservation = false;
                }
            }
        }
        b.check("conservation", conservation);
        b.check("monotone-max", monotone);
    }
    // Incremental potential equals the from-scratch sum.
    {
        BalancedTree tree(TreeShape::create(3, 3), 0.37);
        Rng rng(5);
        std::vector<uint64_t> path;
        double worst = 0.0;
        for (int t = 0; t < 20000; ++t) {
            const uint64_t leaf = rng.next_below(tree.shape().leaf_count());
            tree.root_leaf_path(leaf, path);
            tree.apply_arrival(leaf, tree.choose_sign(path));
        }
        const double scratch = tree.potential_recomputed();
        worst = std::fabs(tree.potential().value - scratch) / scratch;
        std::ostringstream detail;
        detail << "relative error " << worst;
        b.check("potential-consistency", !tree.potential().overflowed && worst <= 1e-9,
                detail.str());
    }
    // Greedy sign equals argmin of the directly evaluated potential increase.
    {
        bool agree = true;
        Rng rng(7);
        for (int trial = 0; trial < 400 && agree; ++trial) {
            BalancedTree tree(TreeShape::create(2 + static_cast<uint32_t>(rng.next_below(3)),
                                                1 + static_cast<uint32_t>(rng.next_below(3))),
                              0.05 + 0.4 * rng.next_unit());
            for (uint64_t v = 0; v < tree.node_count(); ++v)
                tree.prescribe_imbalance(v, static_cast<int64_t>(rng.next_below(41)) - 20);
            const uint64_t leaf = rng.next_below(tree.shape().leaf_count());
            const std::vector<uint64_t> path = tree.root_leaf_path(leaf);
            double delta_plus = 0.0;
            double delta_minus = 0.0;
            for (uint64_t v : path) {
                const double a = tree.lambda() * static_cast<double>(tree.imbalance(v));
                delta_plus += std::cosh(a + tree.lambda()) - std::cosh(a);
                delta_minus += std::cosh(a - tree.lambda()) - std::cosh(a);
            }
            const double tol = 1e-12 * (std::fabs(delta_plus) + std::fabs(delta_minus) + 1.0);
            const int chosen = tree.choose_sign(path);
            if (delta_plus < delta_minus - tol)
                agree = (chosen == +1);
            else if (delta_minus < delta_plus - tol)
                agree = (chosen == -1);
            else if (tree.path_sinh_sum(path) == 0.0)
                agree = (chosen == +1);
        }
        b.check("greedy-equivalence", agree);
    }
    // Decomposition bound on greedy transcripts.
    {
        bool holds = true;
        for (uint64_t seed = 1; seed <= 5 && holds; ++seed) {
            Rng rng(seed);
            const std::vector<double> positions = uniform_positions(rng, 500);
            const EmbeddingParams params = EmbeddingParams::derive(500, 1.0);
            const double lambda = 1.0 / std::log(500.0);
            IntervalRunResult r = run_online_interval(positions, params, lambda);
            BalancedTree replay(params.tree_shape(), lambda);
            std::vector<int64_t> occupancy(params.leaf_count(), 0);
            for (size_t j = 0; j < r.transcript.size(); ++j) {
                const uint64_t leaf = embed_point(r.transcript.positions[j], params);
                replay.apply_arrival(leaf, r.transcript.signs[j]);
                ++occupancy[leaf];
            }
            int64_t max_node = 0;
            for (uint64_t v = 0; v < replay.node_count(); ++v)
                max_node = std::max<int64_t>(max_node, std::llabs(replay.imbalance(v)));
            const int64_t max_occ = *std::max_element(occupancy.begin(), occupancy.end());
            const int64_t bound =
                2 * static_cast<int64_t>(params.arity) * params.height * max_node + max_occ;
            holds = final_interval_discrepancy(r.transcript) <= bound;
        }
        b.check("decomposition-bound", holds);
    }
    // Alternating offline coloring has final discrepancy <= 1.
    {
        bool holds = true;
        Rng rng(3);
        for (int trial = 0; trial < 100 && holds; ++trial) {
            const size_t n = 1 + rng.next_below(1000);
            Transcript t;
            t.positions = uniform_positions(rng, n);
            t.signs = offline_alternating_coloring(t.positions);
            holds = final_interval_discrepancy(t) <= 1;
        }
        b.check("alternating-offline-disc", holds);
    }
    // Joint greedy rule and shared-root property of the stripe state.
    {
        Rng rng(13);
        const EmbeddingParams params = EmbeddingParams::derive(64, 1.0);
        std::vector<Point2> points(64);
        for (auto& p : points) p = Point2{rng.next_unit(), rng.next_unit()};
        StripeState state(params, 1.0 / std::log(64.0), points);
        bool joint = true;
        for (const Point2& p : points) {
            const int sign = state.choose_sign(p);
            const auto px = state.tree_x().root_leaf_path(embed_point(p.x, params));
            const auto py = state.tree_y().root_leaf_path(embed_point(p.y, params));
            const double joint_l =
                state.tree_x().path_sinh_sum(px) + state.tree_y().path_sinh_sum(py);
            if (sign != sign_minimizing_potential(joint_l)) joint = false;
            state.apply(p, sign);
        }
        const bool roots =
            state.tree_x().imbalance(0) == state.tree_y().imbalance(0) &&
            state.tree_x().arrivals_seen() == state.tree_y().arrivals_seen();
        b.check("stripe-joint-greedy", joint);
        b.check("stripe-shared-root", roots);
    }
}

void suite_envy_equivalence(SuiteBuilder& b) {
    bool prefix_eq_cancellation = true;
    bool sandwich = true;
    bool chain = true;
    bool order_invariant = true;
    const double eps = 1e-9;

    // Exhaustive over all (ranking, S) for n <= 8; values only matter
    // through their order, so one strictly decreasing vector per n plus a
    // random monotone remap covers all rankings.
    Rng rng(101);
    for (size_t n = 1; n <= 8; ++n) {
        std::vector<double> values(n);
        for (size_t i = 0; i < n; ++i)
            values[i] = 0.9 - 0.8 * static_cast<double>(i) / static_cast<double>(n);
        for (uint64_t mask_bits = 0; mask_bits < (uint64_t{1} << n); ++mask_bits) {
            std::vector<uint8_t> mask(n);
            for (size_t i = 0; i < n; ++i) mask[i] = (mask_bits >> i) & 1;
            const int64_t p = ordinal_envy_prefix(values, mask);
            const int64_t c = ordinal_envy_cancellation(values, mask);
            if (p != c) prefix_eq_cancellation = false;
            const std::vector<double> worst = worst_consistent_valuation(values, mask, eps);
            const double worst_envy = cardinal_envy(worst, mask);
            const double n2eps = static_cast<double>(n) * static_cast<double>(n) * eps;
            if (worst_envy > static_cast<double>(p) + 1e-12 ||
                worst_envy < static_cast<double>(p) - n2eps - 1e-12)
                sandwich = false;
            const int64_t disc = ordinal_discrepancy(values, mask);
            if (disc < p || static_cast<double>(p) + 1e-12 < cardinal_envy(values, mask))
                chain = false;
            // monotone remap x -> x^3 keeps the order
            std::vector<double> remapped(n);
            for (size_t i = 0; i < n; ++i) remapped[i] = values[i] * values[i] * values[i];
            if (ordinal_envy_prefix(remapped, mask) != p) order_invariant = false;
        }
    }

    // Randomized instances up to n = 64.
    for (int trial = 0; trial < 10000; ++trial) {
        const size_t n = 1 + rng.next_below(64);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.next_unit();
        std::sort(values.begin(), values.end());
        if (std::adjacent_find(values.begin(), values.end()) != values.end()) continue;
        std::vector<uint8_t> mask(n);
        for (auto& m : mask) m = static_cast<uint8_t>(rng.next_below(2));
        const int64_t p = ordinal_envy_prefix(values, mask);
        if (p != ordinal_envy_cancellation(values, mask)) prefix_eq_cancellation = false;
        if (ordinal_discrepancy(values, mask) < p ||
            static_cast<double>(p) + 1e-12 < cardinal_envy(values, mask))
            chain = false;
        // random order-consistent valuation stays below the ordinal envy
        std::vector<double> consistent(n);
        for (auto& v : consistent) v = rng.next_unit();
        std::sort(consistent.begin(), consistent.end());
        std::vector<size_t> order(n);
        for (size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t bb) { return values[a] > values[bb]; });
        std::vector<double> remapped(n);
        for (size_t rank = 0; rank < n; ++rank)
            remapped[order[rank]] = consistent[n - 1 - rank];
        if (cardinal_envy(remapped, mask) > static_cast<double>(p) + 1e-12) sandwich = false;
    }

    b.check("prefix-equals-cancellation", prefix_eq_cancellation);
    b.check("definition3-sandwich", sandwich);
    b.check("dominance-chain", chain);
    b.check("order-invariance", order_invariant);
}

void suite_adversary(SuiteBuilder& b) {
    bool adaptive_bound = true;
    bool split_property = true;
    std::ostringstream detail;
    for (uint64_t n : {uint64_t{10}, uint64_t{100}, uint64_t{500}}) {
        for (int alg = 0; alg < 4; ++alg) {
            std::unique_ptr<OnlineColorer> colorer;
            switch (alg) {
                case 0: colorer = std::make_unique<PotentialColorer>(n); break;
                case 1: colorer = std::make_unique<RandomColorer>(Rng(42)); break;
                case 2: colorer = std::make_unique<ConstantColorer>(+1); break;
                default: colorer = std::make_unique<AlternatingColorer>(); break;
            }
            const AdversaryGameResult r = run_adaptive_game(*colorer, n);
            const auto bound = static_cast<int64_t>((n + 1) / 2);
            if (r.discrepancy < bound) {
                adaptive_bound = false;
                detail << "alg " << alg << " n " << n << " disc " << r.discrepancy << "; ";
            }
            // all +1 arrivals left of all -1 arrivals
            const DyadicPosition* right_plus = nullptr;
            const DyadicPosition* left_minus = nullptr;
            for (size_t j = 0; j < r.positions.size(); ++j) {
                if (r.signs[j] > 0) {
                    if (!right_plus || *right_plus < r.positions[j]) right_plus = &r.positions[j];
                } else {
                    if (!left_minus || r.positions[j] < *left_minus) left_minus = &r.positions[j];
                }
            }
            if (right_plus && left_minus && !(*right_plus < *left_minus)) split_property = false;
        }
    }
    b.check("adaptive-halves", adaptive_bound, detail.str());
    b.check("adaptive-split-property", split_property);

    // Scripts are deterministic in the seed and the cheat replay meets n/2.
    {
        Rng a(9);
        Rng c(9);
        const ObliviousScript s1 = build_oblivious_script(64, a);
        const ObliviousScript s2 = build_oblivious_script(64, c);
        bool identical = s1.guessed_signs == s2.guessed_signs &&
                         s1.positions.size() == s2.positions.size();
        for (size_t j = 0; identical && j < s1.positions.size(); ++j)
            identical = s1.positions[j].bits() == s2.positions[j].bits();
        b.check("oblivious-script-determinism", identical);

        bool cheat_ok = true;
        Rng rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            Rng script_rng = rng.split(trial);
            const ObliviousScript script = build_oblivious_script(100, script_rng);
            ScriptedColorer cheat(script.guessed_signs);
            if (run_script(script, cheat).discrepancy < 50) cheat_ok = false;
        }
        b.check("oblivious-cheat-replay", cheat_ok);

        Rng one(1);
        const ObliviousScript tiny = build_oblivious_script(1, one);
        ConstantColorer plus(+1);
        b.check("oblivious-n1", run_script(tiny, plus).discrepancy == 1);
    }
}

void suite_facts(SuiteBuilder& b) {
    const uint64_t n = uint64_t{1} << 20;
    const double lambda = 1.0 / std::log(static_cast<double>(n));
    ExperimentConfig config;
    config.kind = ExperimentKind::facts_check;
    config.n = n;
    config.seeds = {1};
    const ResultRow row = run_single(config, 1);
    std::ostringstream detail;
    detail << "pass fraction " << row.facts_pass_fraction.value_or(0.0);
    b.check("dangerous-set-facts", row.facts_pass_fraction.value_or(0.0) == 1.0, detail.str());

    const DangerousSetReport center = dangerous_set_facts_check(
        std::log(static_cast<double>(n)) / lambda, -std::log(static_cast<double>(n)) / lambda,
        lambda, n);
    b.check("facts-center-ratio-one", center.hypothesis_ok && center.y_dangerous &&
                                          center.pass && std::fabs(center.cosh_ratio - 1.0) < 1e-9);
    const DangerousSetReport same = dangerous_set_facts_check(
        std::log(static_cast<double>(n)) / lambda, std::log(static_cast<double>(n)) / lambda,
        lambda, n);
    b.check("facts-same-sign", same.hypothesis_ok && !same.y_dangerous && same.pass);
}

}  // namespace

VerifyReport verify_suite(const std::string& suite) {
    SuiteBuilder b(suite);
    if (suite == "oracles")
        suite_oracles(b);
    else if (suite == "invariants")
        suite_invariants(b);
    else if (suite == "envy-equivalence")
        suite_envy_equivalence(b);
    else if (suite == "adversary")
        suite_adversary(b);
    else if (suite == "facts")
        suite_facts(b);
    else if (suite == "all") {
        suite_oracles(b);
        suite_invariants(b);
        suite_envy_equivalence(b);
        suite_adversary(b);
        suite_facts(b);
    } else {
        throw ConfigError("unknown verify suite: " + suite);
    }
    return b.finish();
}

void write_verify_json(std::ostream& out, const VerifyReport& report) {
    nlohmann::json j;
    j["suite"] = report.suite;
    j["pass"] = report.pass;
    j["checks"] = nlohmann::json::array();
    for (const VerifyCheck& check : report.checks) {
        nlohmann::json c;
        c["name"] = check.name;
        c["pass"] = check.pass;
        c["detail"] = check.detail;
        j["checks"].push_back(c);
    }
    out << j.dump(2) << '\n';
}

void write_verify_text(std::ostream& out, const VerifyReport& report) {
    for (const VerifyCheck& check : report.checks)
        out << (check.pass ? "[PASS] " : "[FAIL] ") << report.suite << "/" << check.name
            << (check.detail.empty() ? "" : "  (" + check.detail + ")") << '\n';
    out << (report.pass ? "PASS" : "FAIL") << " suite " << report.suite << '\n';
}

}  // namespace discsim
