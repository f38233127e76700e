#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "discsim/adversary.hpp"
#include "discsim/envy.hpp"
#include "discsim/experiment.hpp"
#include "discsim/interval.hpp"
#include "discsim/stripe.hpp"
#include "discsim/tree_balancer.hpp"
#include "discsim/verify.hpp"

namespace py = pybind11;
using namespace discsim;

namespace {

std::vector<uint8_t> to_mask(const std::vector<int>& allocated) {
    std::vector<uint8_t> mask(allocated.size());
    for (size_t i = 0; i < allocated.size(); ++i) mask[i] = allocated[i] ? 1 : 0;
    return mask;
}

std::vector<Point2> to_points(const std::vector<std::pair<double, double>>& pts) {
    std::vector<Point2> out(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) out[i] = Point2{pts[i].first, pts[i].second};
    return out;
}

std::unique_ptr<OnlineColorer> make_colorer(const std::string& name, uint64_t n, uint64_t seed) {
    if (name == "potential") return std::make_unique<PotentialColorer>(n);
    if (name == "random") return std::make_unique<RandomColorer>(Rng(seed));
    if (name == "constant") return std::make_unique<ConstantColorer>(+1);
    if (name == "alternating") return std::make_unique<AlternatingColorer>();
    throw std::invalid_argument("unknown colorer: " + name);
}

py::dict row_to_dict(const ResultRow& row) {
    py::dict d;
    d["kind"] = row.kind;
    d["n"] = row.n;
    d["seed"] = row.seed;
    d["algorithm"] = row.algorithm;
    d["h"] = row.h;
    d["m"] = row.m;
    d["lambda"] = row.lambda;
    d["arrivals"] = row.arrivals;
    auto put_i = [&d](const char* key, const std::optional<int64_t>& v) {
        if (v) d[key] = *v; else d[key] = py::none();
    };
    auto put_d = [&d](const char* key, const std::optional<double>& v) {
        if (v) d[key] = *v; else d[key] = py::none();
    };
    put_i("running_interval_disc", row.running_interval_disc);
    put_i("final_interval_disc", row.final_interval_disc);
    put_i("tree_disc", row.tree_disc);
    put_i("stripe_disc_x", row.stripe_disc_x);
    put_i("stripe_disc_y", row.stripe_disc_y);
    put_i("stripe_disc", row.stripe_disc);
    put_d("envy_cardinal_p1", row.envy_cardinal_p1);
    put_d("envy_cardinal_p2", row.envy_cardinal_p2);
    put_i("envy_ordinal_p1", row.envy_ordinal_p1);
    put_i("envy_ordinal_p2", row.envy_ordinal_p2);
    if (row.potential_overflow)
        d["potential"] = "overflow";
    else
        put_d("potential", row.potential);
    put_d("tightness_mean_abs_l", row.tightness_mean_abs_l);
    put_d("tightness_mean_q", row.tightness_mean_q);
    put_d("tightness_ratio", row.tightness_ratio);
    put_d("facts_pass_fraction", row.facts_pass_fraction);
    d["wall_time_ms"] = row.wall_time_ms;
    return d;
}

}  // namespace

PYBIND11_MODULE(_discsim, m) {
    m.doc() = "online discrepancy minimization: cosh-potential tree balancing, interval/stripe "
              "coloring, ordinal-envy reduction and adversary constructions";

    py::class_<TreeShape>(m, "TreeShape")
        .def(py::init(&TreeShape::create), py::arg("arity"), py::arg("height"))
        .def_readonly("arity", &TreeShape::arity)
        .def_readonly("height", &TreeShape::height)
        .def("node_count", &TreeShape::node_count)
        .def("leaf_count", &TreeShape::leaf_count);

    py::class_<Potential>(m, "Potential")
        .def_readonly("value", &Potential::value)
        .def_readonly("overflowed", &Potential::overflowed);

    py::class_<BalancedTree>(m, "BalancedTree")
        .def(py::init<TreeShape, double>(), py::arg("shape"), py::arg("lambda_"))
        .def(py::init([](uint32_t arity, uint32_t height, double lambda) {
                 return BalancedTree(TreeShape::create(arity, height), lambda);
             }),
             py::arg("arity"), py::arg("height"), py::arg("lambda_"))
        .def_property_readonly("arity", [](const BalancedTree& t) { return t.shape().arity; })
        .def_property_readonly("height", [](const BalancedTree& t) { return t.shape().height; })
        .def_property_readonly("lambda_", &BalancedTree::lambda)
        .def("node_count", &BalancedTree::node_count)
        .def("arrivals_seen", &BalancedTree::arrivals_seen)
        .def("imbalance", &BalancedTree::imbalance, py::arg("node"))
        .def("max_abs_seen", &BalancedTree::max_abs_seen)
        .def("tree_discrepancy", &BalancedTree::tree_discrepancy)
        .def("root_leaf_path",
             [](const BalancedTree& t, uint64_t leaf) { return t.root_leaf_path(leaf); },
             py::arg("leaf_index"))
        .def("path_sinh_sum",
             [](const BalancedTree& t, const std::vector<uint64_t>& path) {
                 return t.path_sinh_sum(path);
             })
        .def("path_cosh_sum",
             [](const BalancedTree& t, const std::vector<uint64_t>& path) {
                 return t.path_cosh_sum(path);
             })
        .def("choose_sign",
             [](const BalancedTree& t, const std::vector<uint64_t>& path) {
                 return t.choose_sign(path);
             })
        .def("choose_sign_for_leaf",
             [](const BalancedTree& t, uint64_t leaf) {
                 return t.choose_sign(t.root_leaf_path(leaf));
             })
        .def("apply_arrival", &BalancedTree::apply_arrival, py::arg("leaf_index"), py::arg("sign"))
        .def("potential", &BalancedTree::potential)
        .def("potential_recomputed", &BalancedTree::potential_recomputed)
        .def("prescribe_imbalance", &BalancedTree::prescribe_imbalance);

    m.def("sign_minimizing_potential", &sign_minimizing_potential, py::arg("path_sinh_sum"));
    m.def("drift_f", &drift_f, py::arg("h"));

    py::class_<DangerousSetReport>(m, "DangerousSetReport")
        .def_readonly("hypothesis_ok", &DangerousSetReport::hypothesis_ok)
        .def_readonly("y_dangerous", &DangerousSetReport::y_dangerous)
        .def_readonly("cosh_ratio", &DangerousSetReport::cosh_ratio)
        .def_readonly("sinh_ratio", &DangerousSetReport::sinh_ratio)
        .def_readonly("combined", &DangerousSetReport::combined)
        .def_readonly("bound", &DangerousSetReport::bound)
        .def_readonly("passed", &DangerousSetReport::pass)
        .def_readonly("message", &DangerousSetReport::message);

    m.def("dangerous_set_facts_check", &dangerous_set_facts_check, py::arg("x"), py::arg("y"),
          py::arg("lambda_"), py::arg("n"));

    py::class_<TightnessLevel>(m, "TightnessLevel")
        .def_readonly("d_minus", &TightnessLevel::d_minus)
        .def_readonly("d_plus", &TightnessLevel::d_plus)
        .def_readonly("p_plus", &TightnessLevel::p_plus)
        .def_readonly("positive_children", &TightnessLevel::positive_children);

    py::class_<TightnessReport>(m, "TightnessReport")
        .def_readonly("lambda_", &TightnessReport::lambda)
        .def_readonly("root_imbalance", &TightnessReport::root_imbalance)
        .def_readonly("cosh_root", &TightnessReport::cosh_root)
        .def_readonly("levels", &TightnessReport::levels)
        .def_readonly("samples", &TightnessReport::samples)
        .def_readonly("mean_abs_l", &TightnessReport::mean_abs_l)
        .def_readonly("mean_q", &TightnessReport::mean_q)
        .def_readonly("ratio", &TightnessReport::ratio);

    m.def("separation_tightness_fixture",
          [](uint32_t arity, uint32_t height, uint64_t n, uint64_t samples, uint64_t seed) {
              Rng rng(seed);
              TightnessFixture f = separation_tightness_fixture(arity, height, n, samples, rng);
              return py::make_tuple(std::move(f.tree), std::move(f.report));
          },
          py::arg("arity"), py::arg("height"), py::arg("n"), py::arg("samples") = 100000,
          py::arg("seed") = 1);

    py::class_<EmbeddingParams>(m, "EmbeddingParams")
        .def_readonly("n", &EmbeddingParams::n)
        .def_readonly("height_divisor", &EmbeddingParams::height_divisor)
        .def_readonly("height", &EmbeddingParams::height)
        .def_readonly("arity", &EmbeddingParams::arity)
        .def("leaf_count", &EmbeddingParams::leaf_count);

    m.def("derive_params", &EmbeddingParams::derive, py::arg("n"), py::arg("height_divisor") = 1.0);
    m.def("embed_point", &embed_point, py::arg("x"), py::arg("params"));

    py::class_<Transcript>(m, "Transcript")
        .def(py::init([](std::vector<double> positions, std::vector<int> signs) {
                 Transcript t;
                 t.positions = std::move(positions);
                 t.signs.reserve(signs.size());
                 for (int s : signs) t.signs.push_back(static_cast<int8_t>(s));
                 return t;
             }),
             py::arg("positions"), py::arg("signs"))
        .def_readonly("positions", &Transcript::positions)
        .def_property_readonly("signs",
                               [](const Transcript& t) {
                                   std::vector<int> out(t.signs.begin(), t.signs.end());
                                   return out;
                               })
        .def("__len__", &Transcript::size);

    py::class_<IntervalRunResult>(m, "IntervalRunResult")
        .def_readonly("transcript", &IntervalRunResult::transcript)
        .def_readonly("params", &IntervalRunResult::params)
        .def_readonly("tree_discrepancy", &IntervalRunResult::tree_discrepancy)
        .def_readonly("running_interval_disc", &IntervalRunResult::running_interval_disc)
        .def_readonly("final_interval_disc", &IntervalRunResult::final_interval_disc)
        .def_readonly("final_potential", &IntervalRunResult::final_potential)
        .def_readonly("configured_n", &IntervalRunResult::configured_n);

    m.def("run_online_interval",
          [](const std::vector<double>& arrivals, const EmbeddingParams& params, double lambda) {
              return run_online_interval(arrivals, params, lambda);
          },
          py::arg("arrivals"), py::arg("params"), py::arg("lambda_"));
    m.def("final_interval_discrepancy", &final_interval_discrepancy, py::arg("transcript"),
          py::arg("up_to_time") = static_cast<size_t>(-1));
    m.def("interval_discrepancy_bruteforce",
          [](const Transcript& t, std::optional<size_t> up_to) {
              return interval_discrepancy_bruteforce(t, up_to);
          },
          py::arg("transcript"), py::arg("up_to_time") = std::nullopt);
    m.def("interval_discrepancy_bruteforce_series", &interval_discrepancy_bruteforce_series);
    m.def("offline_alternating_coloring",
          [](const std::vector<double>& positions) {
              std::vector<int8_t> signs = offline_alternating_coloring(positions);
              return std::vector<int>(signs.begin(), signs.end());
          },
          py::arg("positions"));
    m.def("random_coloring",
          [](const std::vector<double>& arrivals, uint64_t seed) {
              Rng rng(seed);
              return random_coloring(arrivals, rng);
          },
          py::arg("arrivals"), py::arg("seed"));

    py::class_<Transcript2D>(m, "Transcript2D")
        .def_readonly("xs", &Transcript2D::xs)
        .def_readonly("ys", &Transcript2D::ys)
        .def_property_readonly("signs",
                               [](const Transcript2D& t) {
                                   return std::vector<int>(t.signs.begin(), t.signs.end());
                               })
        .def("__len__", &Transcript2D::size);

    py::class_<StripeRunResult>(m, "StripeRunResult")
        .def_readonly("transcript", &StripeRunResult::transcript)
        .def_readonly("tree_disc_x", &StripeRunResult::tree_disc_x)
        .def_readonly("tree_disc_y", &StripeRunResult::tree_disc_y)
        .def_readonly("running_disc_x", &StripeRunResult::running_disc_x)
        .def_readonly("running_disc_y", &StripeRunResult::running_disc_y)
        .def_readonly("running_stripe_disc", &StripeRunResult::running_stripe_disc)
        .def_readonly("final_disc_x", &StripeRunResult::final_disc_x)
        .def_readonly("final_disc_y", &StripeRunResult::final_disc_y)
        .def_readonly("final_stripe_disc", &StripeRunResult::final_stripe_disc);

    m.def("run_online_stripe",
          [](const std::vector<std::pair<double, double>>& arrivals, const EmbeddingParams& params,
             double lambda) { return run_online_stripe(to_points(arrivals), params, lambda); },
          py::arg("arrivals"), py::arg("params"), py::arg("lambda_"));
    m.def("project_transcript",
          [](const Transcript2D& t, const std::string& axis) {
              return project_transcript(t, axis == "y" ? Axis::y : Axis::x);
          },
          py::arg("transcript"), py::arg("axis"));

    py::class_<EnvyInstance>(m, "EnvyInstance")
        .def(py::init([](std::vector<double> v1, std::vector<double> v2,
                         const std::vector<int>& allocated) {
                 return EnvyInstance{std::move(v1), std::move(v2), to_mask(allocated)};
             }),
             py::arg("v1"), py::arg("v2"), py::arg("allocated_to_p1"))
        .def_readonly("v1", &EnvyInstance::v1)
        .def_readonly("v2", &EnvyInstance::v2)
        .def("cardinal_envy_p1", &EnvyInstance::cardinal_envy_p1)
        .def("cardinal_envy_p2", &EnvyInstance::cardinal_envy_p2)
        .def("ordinal_envy_p1", &EnvyInstance::ordinal_envy_p1)
        .def("ordinal_envy_p2", &EnvyInstance::ordinal_envy_p2)
        .def("envy", &EnvyInstance::envy);

    m.def("cardinal_envy",
          [](const std::vector<double>& values, const std::vector<int>& allocated) {
              return cardinal_envy(values, to_mask(allocated));
          },
          py::arg("values"), py::arg("allocated"));
    m.def("pair_cardinal_envy",
          [](const std::vector<double>& v1, const std::vector<double>& v2,
             const std::vector<int>& allocated) {
              return pair_cardinal_envy(v1, v2, to_mask(allocated));
          },
          py::arg("v1"), py::arg("v2"), py::arg("allocated_to_p1"));
    m.def("ordinal_envy_prefix",
          [](const std::vector<double>& values, const std::vector<int>& allocated) {
              return ordinal_envy_prefix(values, to_mask(allocated));
          },
          py::arg("values"), py::arg("allocated"));
    m.def("ordinal_envy_cancellation",
          [](const std::vector<double>& values, const std::vector<int>& allocated) {
              return ordinal_envy_cancellation(values, to_mask(allocated));
          },
          py::arg("values"), py::arg("allocated"));
    m.def("worst_consistent_valuation",
          [](const std::vector<double>& values, const std::vector<int>& allocated, double eps) {
              return worst_consistent_valuation(values, to_mask(allocated), eps);
          },
          py::arg("values"), py::arg("allocated"), py::arg("epsilon"));
    m.def("ordinal_discrepancy",
          [](const std::vector<double>& values, const std::vector<int>& allocated) {
              return ordinal_discrepancy(values, to_mask(allocated));
          },
          py::arg("values"), py::arg("allocated"));

    py::class_<EnvyRunResult>(m, "EnvyRunResult")
        .def_property_readonly("allocation",
                               [](const EnvyRunResult& r) {
                                   return std::vector<int>(r.allocation.begin(),
                                                           r.allocation.end());
                               })
        .def_readonly("transcript", &EnvyRunResult::transcript)
        .def_readonly("running_disc_x", &EnvyRunResult::running_disc_x)
        .def_readonly("running_disc_y", &EnvyRunResult::running_disc_y)
        .def_readonly("running_stripe_disc", &EnvyRunResult::running_stripe_disc)
        .def_readonly("final_disc_x", &EnvyRunResult::final_disc_x)
        .def_readonly("final_disc_y", &EnvyRunResult::final_disc_y)
        .def_readonly("final_stripe_disc", &EnvyRunResult::final_stripe_disc)
        .def_readonly("final_cardinal_envy_p1", &EnvyRunResult::final_cardinal_envy_p1)
        .def_readonly("final_cardinal_envy_p2", &EnvyRunResult::final_cardinal_envy_p2)
        .def_readonly("running_cardinal_envy_p1", &EnvyRunResult::running_cardinal_envy_p1)
        .def_readonly("running_cardinal_envy_p2", &EnvyRunResult::running_cardinal_envy_p2)
        .def_readonly("final_ordinal_envy_p1", &EnvyRunResult::final_ordinal_envy_p1)
        .def_readonly("final_ordinal_envy_p2", &EnvyRunResult::final_ordinal_envy_p2)
        .def_readonly("running_ordinal_envy_p1", &EnvyRunResult::running_ordinal_envy_p1)
        .def_readonly("running_ordinal_envy_p2", &EnvyRunResult::running_ordinal_envy_p2)
        .def_readonly("chain_ok", &EnvyRunResult::chain_ok)
        .def_readonly("used_empirical_cdfs", &EnvyRunResult::used_empirical_cdfs);

    m.def("run_online_envy",
          [](const std::vector<double>& v1, const std::vector<double>& v2,
             const EmbeddingParams& params, double lambda,
             const std::function<double(double)>& cdf1,
             const std::function<double(double)>& cdf2) {
              CdfPair cdfs = CdfPair::identity();
              if (cdf1) cdfs.f1 = cdf1;
              if (cdf2) cdfs.f2 = cdf2;
              return run_online_envy(v1, v2, cdfs, params, lambda);
          },
          py::arg("v1"), py::arg("v2"), py::arg("params"), py::arg("lambda_"),
          py::arg("cdf1") = nullptr, py::arg("cdf2") = nullptr);
    m.def("run_online_envy_empirical",
          [](const std::vector<double>& v1, const std::vector<double>& v2,
             const EmbeddingParams& params, double lambda) {
              return run_online_envy_empirical(v1, v2, params, lambda);
          },
          py::arg("v1"), py::arg("v2"), py::arg("params"), py::arg("lambda_"));

    m.def("run_adaptive_game",
          [](const std::string& algorithm, uint64_t n, uint64_t seed) {
              auto colorer = make_colorer(algorithm, n, seed);
              const AdversaryGameResult r = run_adaptive_game(*colorer, n);
              std::vector<double> positions;
              positions.reserve(r.positions.size());
              for (const auto& p : r.positions) positions.push_back(p.to_double());
              return py::make_tuple(r.discrepancy, positions,
                                    std::vector<int>(r.signs.begin(), r.signs.end()));
          },
          py::arg("algorithm"), py::arg("n"), py::arg("seed") = 1,
          "returns (discrepancy, positions, signs)");

    m.def("run_oblivious_trials",
          [](const std::string& algorithm, uint64_t n, uint64_t trials, uint64_t seed) {
              Rng rng(seed);
              ColorerFactory factory = [&](const ObliviousScript& script, uint64_t trial) {
                  if (algorithm == "cheat")
                      return std::unique_ptr<OnlineColorer>(
                          new ScriptedColorer(script.guessed_signs));
                  return make_colorer(algorithm, n, seed ^ (trial + 1));
              };
              return run_oblivious_trials(factory, n, trials, rng);
          },
          py::arg("algorithm"), py::arg("n"), py::arg("trials"), py::arg("seed") = 1);

    py::class_<StochasticProbeReport>(m, "StochasticProbeReport")
        .def_readonly("pieces", &StochasticProbeReport::pieces)
        .def_readonly("pattern_length", &StochasticProbeReport::pattern_length)
        .def_readonly("trials", &StochasticProbeReport::trials)
        .def_readonly("pieces_with_pattern_length_arrivals",
                      &StochasticProbeReport::pieces_with_pattern_length_arrivals)
        .def_readonly("pattern_matches", &StochasticProbeReport::pattern_matches)
        .def_readonly("exact_piece_probability", &StochasticProbeReport::exact_piece_probability)
        .def_readonly("expected_pieces_per_trial",
                      &StochasticProbeReport::expected_pieces_per_trial)
        .def_readonly("pattern_probability_reference",
                      &StochasticProbeReport::pattern_probability_reference);

    m.def("stochastic_lowerbound_probe",
          [](uint64_t n_pieces, uint32_t pattern_length, uint64_t trials, uint64_t seed) {
              Rng rng(seed);
              return stochastic_lowerbound_probe(n_pieces, pattern_length, trials, rng);
          },
          py::arg("n_pieces"), py::arg("pattern_length"), py::arg("trials"), py::arg("seed") = 1);

    m.def("run_rows",
          [](const std::string& kind, uint64_t n, const std::vector<uint64_t>& seeds,
             const std::string& algorithm, double height_divisor, double lambda) {
              ExperimentConfig config;
              config.kind = parse_experiment_kind(kind);
              config.n = n;
              config.seeds = seeds;
              config.algorithm = parse_algorithm_kind(algorithm);
              config.height_divisor = height_divisor;
              if (lambda > 0.0) config.lambda = lambda;
              py::list rows;
              for (const ResultRow& row : run_experiment(config)) rows.append(row_to_dict(row));
              return rows;
          },
          py::arg("kind"), py::arg("n"), py::arg("seeds"), py::arg("algorithm") = "potential",
          py::arg("height_divisor") = 1.0, py::arg("lambda_") = 0.0);

    m.def("verify",
          [](const std::string& suite) {
              const VerifyReport report = verify_suite(suite);
              py::list checks;
              for (const VerifyCheck& c : report.checks)
                  checks.append(py::make_tuple(c.name, c.pass, c.detail));
              return py::make_tuple(report.pass, checks);
          },
          py::arg("suite") = "all");
}
