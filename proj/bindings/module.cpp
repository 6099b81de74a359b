#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fscpu/clustering.hpp"
#include "fscpu/dataset.hpp"
#include "fscpu/errors.hpp"
#include "fscpu/evaluation.hpp"
#include "fscpu/mask.hpp"
#include "fscpu/objective.hpp"
#include "fscpu/optimizer.hpp"
#include "fscpu/selfcheck.hpp"
#include "fscpu/serialize.hpp"

namespace py = pybind11;
using namespace fscpu;

namespace {

py::array_t<double> matrix_array(const std::vector<double>& buf, std::size_t rows, std::size_t cols) {
    py::array_t<double> out({rows, cols});
    std::copy(buf.begin(), buf.end(), out.mutable_data());
    return out;
}

std::vector<std::uint8_t> mask_from_array(const py::array& arr, std::size_t expected) {
    const auto a = py::array_t<bool, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 1 || static_cast<std::size_t>(a.size()) != expected)
        throw ConfigError("mask must be a 1-d array of length " + std::to_string(expected));
    std::vector<std::uint8_t> bits(expected);
    for (std::size_t i = 0; i < expected; ++i) bits[i] = a.at(i) ? 1 : 0;
    return bits;
}

Dataset dataset_from_arrays(const py::array& x, const py::array& s,
                            const std::vector<std::string>& names,
                            const std::optional<py::array>& relevant,
                            const std::optional<py::array>& y) {
    const auto xa = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(x);
    if (!xa || xa.ndim() != 2) throw ConfigError("x must be a 2-d array");
    Dataset data;
    data.n_rows = static_cast<std::size_t>(xa.shape(0));
    data.n_features = static_cast<std::size_t>(xa.shape(1));
    data.X.assign(xa.data(), xa.data() + xa.size());

    const auto sa = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(s);
    if (!sa || sa.ndim() != 1 || static_cast<std::size_t>(sa.size()) != data.n_rows)
        throw ConfigError("s must be a 1-d array with one entry per row");
    data.s.assign(sa.data(), sa.data() + sa.size());

    if (!names.empty()) {
        if (names.size() != data.n_features)
            throw ConfigError("feature_names length does not match the column count");
        data.feature_names = names;
    } else {
        for (std::size_t j = 0; j < data.n_features; ++j)
            data.feature_names.push_back("f" + std::to_string(j));
    }
    if (relevant) data.relevant_truth = mask_from_array(*relevant, data.n_features);
    if (y) data.y_truth = mask_from_array(*y, data.n_rows);
    data.validate();
    return data;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Feature selection for positive-unlabeled data";

    py::register_exception<ConfigError>(m, "FscpuConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "FscpuDataError", PyExc_ValueError);

    // ---- dataset ----
    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init([](bool cluster_assumption, double labeled_rate, int n_negative_clusters,
                         int n_positive_clusters, std::uint64_t seed) {
                 SyntheticSpec spec;
                 spec.cluster_assumption = cluster_assumption;
                 spec.labeled_rate = labeled_rate;
                 spec.n_negative_clusters = n_negative_clusters;
                 spec.n_positive_clusters = n_positive_clusters;
                 spec.seed = seed;
                 return spec;
             }),
             py::arg("cluster_assumption") = true, py::arg("labeled_rate") = 0.4,
             py::arg("n_negative_clusters") = 8, py::arg("n_positive_clusters") = 1,
             py::arg("seed") = 0)
        .def_readwrite("cluster_assumption", &SyntheticSpec::cluster_assumption)
        .def_readwrite("labeled_rate", &SyntheticSpec::labeled_rate)
        .def_readwrite("n_negative_clusters", &SyntheticSpec::n_negative_clusters)
        .def_readwrite("n_positive_clusters", &SyntheticSpec::n_positive_clusters)
        .def_readwrite("seed", &SyntheticSpec::seed);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_arrays), py::arg("x"), py::arg("s"),
             py::arg("feature_names") = std::vector<std::string>{},
             py::arg("relevant_truth") = std::nullopt, py::arg("y_truth") = std::nullopt)
        .def_property_readonly("n_rows", [](const Dataset& d) { return d.n_rows; })
        .def_property_readonly("n_features", [](const Dataset& d) { return d.n_features; })
        .def_property_readonly("x", [](const Dataset& d) { return matrix_array(d.X, d.n_rows, d.n_features); })
        .def_property_readonly("s", [](const Dataset& d) { return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(d.s.size()), d.s.data()); })
        .def_property_readonly("feature_names", [](const Dataset& d) { return d.feature_names; })
        .def_property_readonly("relevant_truth",
                               [](const Dataset& d) -> py::object {
                                   if (d.relevant_truth.empty()) return py::none();
                                   return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(d.relevant_truth.size()), d.relevant_truth.data());
                               })
        .def_property_readonly("y_truth",
                               [](const Dataset& d) -> py::object {
                                   if (d.y_truth.empty()) return py::none();
                                   return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(d.y_truth.size()), d.y_truth.data());
                               })
        .def("labeled_count", &Dataset::labeled_count)
        .def("__repr__", [](const Dataset& d) {
            return "<Dataset " + std::to_string(d.n_rows) + "x" + std::to_string(d.n_features) +
                   ", " + std::to_string(d.labeled_count()) + " labeled>";
        });

    m.def("generate_clustered", &generate_clustered, py::arg("spec"));
    m.def("generate_outlier", &generate_outlier, py::arg("labeled_rate"), py::arg("seed") = 0);
    m.def("subsample_rows", &subsample_rows, py::arg("data"), py::arg("n_keep"), py::arg("seed") = 0);
    m.def("load_csv", &load_csv, py::arg("path"), py::arg("label_column"));
    m.def("write_csv", &write_csv, py::arg("data"), py::arg("path"));

    py::class_<NormalizationParams>(m, "NormalizationParams")
        .def_readonly("mins", &NormalizationParams::mins)
        .def_readonly("maxs", &NormalizationParams::maxs);
    m.def("fit_minmax", &fit_minmax, py::arg("data"));
    m.def("apply_minmax", &apply_minmax, py::arg("data"), py::arg("params"));
    m.def(
        "normalize",
        [](const Dataset& data) { return apply_minmax(data, fit_minmax(data)); },
        py::arg("data"), "Min-max normalize with parameters fitted on the same data");

    // ---- clustering ----
    py::enum_<ClusterBackend>(m, "ClusterBackend")
        .value("gmm", ClusterBackend::gmm)
        .value("kmeans", ClusterBackend::kmeans);

    py::class_<ClusterConfig>(m, "ClusterConfig")
        .def(py::init([](int n_components, int max_iter, double tol, double var_floor,
                         const std::string& backend) {
                 ClusterConfig config;
                 config.n_components = n_components;
                 config.max_iter = max_iter;
                 config.tol = tol;
                 config.var_floor = var_floor;
                 config.backend = parse_backend(backend);
                 return config;
             }),
             py::arg("n_components") = 10, py::arg("max_iter") = 100, py::arg("tol") = 1e-4,
             py::arg("var_floor") = 1e-6, py::arg("backend") = "gmm")
        .def_readwrite("n_components", &ClusterConfig::n_components)
        .def_readwrite("max_iter", &ClusterConfig::max_iter)
        .def_readwrite("tol", &ClusterConfig::tol)
        .def_readwrite("var_floor", &ClusterConfig::var_floor)
        .def_readwrite("backend", &ClusterConfig::backend);

    py::class_<Clustering>(m, "Clustering")
        .def_static("from_counts", &Clustering::from_counts, py::arg("sizes"),
                    py::arg("labeled_counts"))
        .def_property_readonly("assignment", [](const Clustering& c) { return py::array_t<int>(static_cast<py::ssize_t>(c.assignment.size()), c.assignment.data()); })
        .def_readonly("n_clusters", &Clustering::n_clusters)
        .def_readonly("sizes", &Clustering::sizes)
        .def_readonly("labeled_counts", &Clustering::labeled_counts);

    m.def(
        "fit_predict",
        [](const py::array& x, const ClusterConfig& config, std::uint64_t seed) {
            const auto xa = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(x);
            if (!xa || xa.ndim() != 2) throw ConfigError("x must be a 2-d array");
            std::vector<double> buf(xa.data(), xa.data() + xa.size());
            return fit_predict(buf, static_cast<std::size_t>(xa.shape(0)),
                               static_cast<std::size_t>(xa.shape(1)), config, seed);
        },
        py::arg("x"), py::arg("config") = ClusterConfig{}, py::arg("seed") = 0);
    m.def(
        "count_labeled",
        [](const Clustering& clustering, const py::array& s) {
            const auto sa = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(s);
            if (!sa || sa.ndim() != 1) throw ConfigError("s must be a 1-d array");
            std::vector<std::uint8_t> sv(sa.data(), sa.data() + sa.size());
            return count_labeled(clustering, sv);
        },
        py::arg("clustering"), py::arg("s"));

    // ---- objective ----
    py::class_<ObjectiveReport>(m, "ObjectiveReport")
        .def_readonly("f", &ObjectiveReport::f_value)
        .def_readonly("recall", &ObjectiveReport::recall)
        .def_readonly("precision", &ObjectiveReport::precision)
        .def_readonly("chosen_clusters", &ObjectiveReport::chosen_clusters)
        .def_readonly("ratios", &ObjectiveReport::per_cluster_ratio)
        .def_readonly("mi", &ObjectiveReport::mi_value)
        .def_readonly("combined", &ObjectiveReport::combined_value)
        .def_readonly("hits", &ObjectiveReport::hits)
        .def_readonly("union_size", &ObjectiveReport::union_size)
        .def_readonly("labeled_total", &ObjectiveReport::labeled_total)
        .def("to_json", [](const ObjectiveReport& r) { return to_json(r).dump(); })
        .def("__repr__", [](const ObjectiveReport& r) {
            return "<ObjectiveReport f=" + std::to_string(r.f_value) + ">";
        });

    m.def("objective_value", &objective_value, py::arg("clustering"));
    m.def("brute_force_best_subset", &brute_force_best_subset, py::arg("clustering"));
    m.def("same_f_value", &same_f_value, py::arg("a"), py::arg("b"));
    m.def(
        "evaluate_mask",
        [](const Dataset& data, const py::array& mask, const ClusterConfig& config,
           std::uint64_t seed) {
            return evaluate_mask(data, mask_from_array(mask, data.n_features), config, seed);
        },
        py::arg("data"), py::arg("mask"), py::arg("config") = ClusterConfig{}, py::arg("seed") = 0);
    m.def(
        "mi_score",
        [](const Dataset& data, const py::array& mask) {
            return mi_score(data, mask_from_array(mask, data.n_features));
        },
        py::arg("data"), py::arg("mask"));

    py::class_<ScoreLog>(m, "ScoreLog")
        .def(py::init<>())
        .def("append", &ScoreLog::append, py::arg("f"), py::arg("mi"))
        .def_readonly("f_scores", &ScoreLog::f_scores)
        .def_readonly("mi_scores", &ScoreLog::mi_scores);
    m.def("combined_score", &combined_score, py::arg("f"), py::arg("mi"), py::arg("log"));

    // ---- optimizer ----
    py::enum_<ObjectiveMode>(m, "ObjectiveMode")
        .value("fscpu", ObjectiveMode::fscpu)
        .value("fscpu_mi", ObjectiveMode::fscpu_mi);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init([](int iterations, std::uint64_t seed, const std::string& objective,
                         int trace_every, const ClusterConfig& clustering, bool parallel_candidates) {
                 RunConfig config;
                 config.iterations = iterations;
                 config.seed = seed;
                 config.objective_mode = parse_objective_mode(objective);
                 config.trace_every = trace_every;
                 config.clustering = clustering;
                 config.parallel_candidates = parallel_candidates;
                 return config;
             }),
             py::arg("iterations") = 3000, py::arg("seed") = 0, py::arg("objective") = "fscpu",
             py::arg("trace_every") = 10, py::arg("clustering") = ClusterConfig{},
             py::arg("parallel_candidates") = true)
        .def_readwrite("iterations", &RunConfig::iterations)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("objective_mode", &RunConfig::objective_mode)
        .def_readwrite("trace_every", &RunConfig::trace_every)
        .def_readwrite("clustering", &RunConfig::clustering)
        .def_readwrite("parallel_candidates", &RunConfig::parallel_candidates);

    py::class_<ThetaVector>(m, "ThetaVector")
        .def_readonly("theta", &ThetaVector::theta)
        .def_readonly("epsilon", &ThetaVector::epsilon)
        .def_readonly("eta", &ThetaVector::eta);
    m.def(
        "init_theta",
        [](const std::vector<double>& costs, double budget) {
            return init_theta(costs, budget);
        },
        py::arg("costs"), py::arg("budget"));

    py::class_<FeatureMask>(m, "FeatureMask")
        .def_property_readonly("bits", [](const FeatureMask& f) { return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(f.bits.size()), f.bits.data()); })
        .def_readonly("costs", &FeatureMask::costs)
        .def_readonly("budget", &FeatureMask::budget)
        .def("count", &FeatureMask::count)
        .def("total_cost", &FeatureMask::total_cost)
        .def("feasible", &FeatureMask::feasible)
        .def("maximal", &FeatureMask::maximal);

    m.def(
        "sample_and_repair",
        [](const ThetaVector& theta, const std::vector<double>& costs, double budget,
           std::uint64_t seed) {
            Rng rng(seed);
            return repair(sample_mask(theta, costs, budget, rng), theta, rng);
        },
        py::arg("theta"), py::arg("costs"), py::arg("budget"), py::arg("seed") = 0,
        "Draw one Bernoulli mask and project it onto the feasible-and-maximal set");

    py::class_<ThetaTraceRow>(m, "ThetaTraceRow")
        .def_readonly("iteration", &ThetaTraceRow::iteration)
        .def_readonly("theta", &ThetaTraceRow::theta);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("final_theta", &RunResult::final_theta)
        .def_property_readonly("selected_features", [](const RunResult& r) { return r.selected_features; })
        .def_readonly("theta_trace", &RunResult::theta_trace)
        .def_property_readonly("best_mask", [](const RunResult& r) { return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(r.best_mask.size()), r.best_mask.data()); })
        .def_readonly("best_score", &RunResult::best_score)
        .def_readonly("best_f", &RunResult::best_f)
        .def_readonly("best_mi", &RunResult::best_mi)
        .def_readonly("best_iteration", &RunResult::best_iteration)
        .def_readonly("convergence_fraction", &RunResult::convergence_fraction)
        .def_readonly("evaluations", &RunResult::evaluations)
        .def_readonly("wall_seconds", &RunResult::wall_seconds)
        .def("to_json",
             [](const RunResult& r, bool include_wall_seconds) {
                 return to_json(r, include_wall_seconds).dump();
             },
             py::arg("include_wall_seconds") = true)
        .def("theta_trace_csv", [](const RunResult& r) { return theta_trace_csv(r); });

    m.def(
        "run",
        [](const Dataset& data, const RunConfig& config, std::optional<std::vector<double>> costs,
           double budget) {
            const std::vector<double> c = costs ? *costs : unit_costs(data.n_features);
            py::gil_scoped_release release;
            return run(data, config, c, budget);
        },
        py::arg("data"), py::arg("config") = RunConfig{}, py::arg("costs") = std::nullopt,
        py::arg("budget") = 25.0, "Optimize a feature mask for the dataset");

    m.def(
        "optimize",
        [](std::size_t d, const std::vector<double>& costs, double budget, RunConfig config,
           const std::function<double(py::array, std::uint64_t)>& objective) {
            // Python objectives run under the GIL, so evaluate sequentially.
            config.parallel_candidates = false;
            const ScoreFn fn = [&objective](const FeatureMask& mask, std::uint64_t seed) {
                py::gil_scoped_acquire acquire;
                py::array_t<std::uint8_t> bits(static_cast<py::ssize_t>(mask.bits.size()), mask.bits.data());
                CandidateScores scores;
                scores.f = objective(bits, seed);
                return scores;
            };
            py::gil_scoped_release release;
            return optimize(d, costs, budget, config, fn);
        },
        py::arg("d"), py::arg("costs"), py::arg("budget"), py::arg("config"), py::arg("objective"),
        "Run the two-candidate loop against a custom objective(mask_bits, seed)");

    // ---- evaluation ----
    m.def(
        "fsr",
        [](const std::vector<std::size_t>& selected, const py::array& relevant) {
            const auto ra = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(relevant);
            if (!ra || ra.ndim() != 1) throw ConfigError("relevant_truth must be a 1-d array");
            std::vector<std::uint8_t> rv(ra.data(), ra.data() + ra.size());
            return fsr(selected, rv);
        },
        py::arg("selected"), py::arg("relevant_truth"));

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("condition", &ExperimentResult::condition)
        .def_readonly("seeds", &ExperimentResult::seeds)
        .def_readonly("fsr_values", &ExperimentResult::fsr_values)
        .def_readonly("runtimes", &ExperimentResult::runtimes)
        .def_readonly("mean_fsr", &ExperimentResult::mean_fsr)
        .def_readonly("std_fsr", &ExperimentResult::std_fsr)
        .def("to_json", [](const ExperimentResult& r) { return to_json(r).dump(); });

    py::class_<ConditionConfig>(m, "ConditionConfig")
        .def(py::init([](const RunConfig& run, std::optional<std::vector<double>> costs,
                         double budget, std::size_t subsample, int jobs) {
                 ConditionConfig config;
                 config.run = run;
                 if (costs) config.costs = *costs;
                 config.budget = budget;
                 config.subsample = subsample;
                 config.jobs = jobs;
                 return config;
             }),
             py::arg("run") = RunConfig{}, py::arg("costs") = std::nullopt,
             py::arg("budget") = 25.0, py::arg("subsample") = 0, py::arg("jobs") = 1)
        .def_readwrite("run", &ConditionConfig::run)
        .def_readwrite("budget", &ConditionConfig::budget)
        .def_readwrite("subsample", &ConditionConfig::subsample)
        .def_readwrite("jobs", &ConditionConfig::jobs);

    m.def(
        "run_condition",
        [](const SyntheticSpec& condition, int n_seeds, const ConditionConfig& config) {
            py::gil_scoped_release release;
            return run_condition(condition, n_seeds, config);
        },
        py::arg("condition"), py::arg("n_seeds") = 5, py::arg("config") = ConditionConfig{});

    m.def("experiment_table_csv", &experiment_table_csv, py::arg("results"));

    // ---- self checks ----
    m.def(
        "run_checks",
        [](std::uint64_t seed, int oracle_trials) {
            check::CheckOptions options;
            options.seed = seed;
            options.oracle_trials = oracle_trials;
            py::gil_scoped_release release;
            const auto results = check::run_checks(options);
            py::gil_scoped_acquire acquire;
            py::list out;
            for (const auto& r : results)
                out.append(py::dict(py::arg("name") = r.name, py::arg("passed") = r.passed,
                                    py::arg("detail") = r.detail, py::arg("seconds") = r.seconds));
            return out;
        },
        py::arg("seed") = 0, py::arg("oracle_trials") = 200);

#ifdef FSCPU_VERSION
    m.attr("__version__") = FSCPU_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
