// fscpu: feature selection for positive-unlabeled data.
//
// Subcommands:
//   synth   generate a synthetic benchmark dataset (CSV + ground-truth sidecar)
//   select  run the optimizer on a CSV and write the selection artifacts
//   eval    score a selected-features file against a ground-truth sidecar
//   check   run the built-in property suite
//
// Exit codes: 0 success, 1 internal error, 2 configuration error, 3 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fscpu/dataset.hpp"
#include "fscpu/errors.hpp"
#include "fscpu/evaluation.hpp"
#include "fscpu/objective.hpp"
#include "fscpu/optimizer.hpp"
#include "fscpu/selfcheck.hpp"
#include "fscpu/serialize.hpp"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct SelectOptions {
    std::string data_path;
    std::string label_column;
    std::string out_dir = ".";
    std::string config_path;
    std::string costs = "unit";
    std::string objective = "fscpu";
    std::string backend = "gmm";
    double budget = 0.0;
    int iterations = 3000;
    int clusters = 10;
    int trace_every = 10;
    int em_max_iter = 100;
    double em_tol = 1e-4;
    double var_floor = 1e-6;
    std::uint64_t seed = 0;
};

// Configuration file values fill any flag the command line left untouched
// (precedence: flags > config file > defaults). A run_result.json is accepted
// directly; its embedded "config" object is used.
void apply_config_file(const CLI::App& cmd, const std::string& path, SelectOptions& opt) {
    nlohmann::json j = nlohmann::json::parse(fscpu::read_text_file(path));
    if (j.contains("config")) j = j["config"];

    const auto unset = [&](const std::string& flag) { return cmd.count(flag) == 0; };
    if (unset("--iters") && j.contains("iterations")) opt.iterations = j["iterations"];
    if (unset("--seed") && j.contains("seed")) opt.seed = j["seed"];
    if (unset("--objective") && j.contains("objective")) opt.objective = j["objective"];
    if (unset("--trace-every") && j.contains("trace_every")) opt.trace_every = j["trace_every"];
    if (unset("--budget") && j.contains("budget")) opt.budget = j["budget"];
    if (j.contains("clustering")) {
        const auto& c = j["clustering"];
        if (unset("--clusters") && c.contains("n_components")) opt.clusters = c["n_components"];
        if (unset("--em-max-iter") && c.contains("max_iter")) opt.em_max_iter = c["max_iter"];
        if (unset("--em-tol") && c.contains("tol")) opt.em_tol = c["tol"];
        if (unset("--var-floor") && c.contains("var_floor")) opt.var_floor = c["var_floor"];
        if (unset("--backend") && c.contains("backend")) opt.backend = c["backend"];
    }
}

std::vector<double> load_costs(const std::string& spec, std::size_t d) {
    if (spec == "unit") return fscpu::unit_costs(d);
    std::ifstream in(spec);
    if (!in)
        throw fscpu::DataError(fscpu::DataErrorCode::missing_file, "cannot open cost file: " + spec);
    std::vector<double> costs;
    double v;
    while (in >> v) costs.push_back(v);
    if (costs.size() != d)
        throw fscpu::ConfigError("cost file has " + std::to_string(costs.size()) +
                                 " entries, dataset has " + std::to_string(d) + " features");
    return costs;
}

int cmd_select(const CLI::App& cmd, SelectOptions& opt) {
    if (!opt.config_path.empty()) apply_config_file(cmd, opt.config_path, opt);
    if (opt.budget < 1.0) throw fscpu::ConfigError("--budget must be >= 1");

    fscpu::Dataset data = fscpu::load_csv(opt.data_path, opt.label_column);
    data = fscpu::apply_minmax(data, fscpu::fit_minmax(data));
    const std::vector<double> costs = load_costs(opt.costs, data.n_features);

    fscpu::RunConfig config;
    config.iterations = opt.iterations;
    config.seed = opt.seed;
    config.objective_mode = fscpu::parse_objective_mode(opt.objective);
    config.trace_every = opt.trace_every;
    config.clustering.n_components = opt.clusters;
    config.clustering.max_iter = opt.em_max_iter;
    config.clustering.tol = opt.em_tol;
    config.clustering.var_floor = opt.var_floor;
    config.clustering.backend = fscpu::parse_backend(opt.backend);

    const fscpu::RunResult result = fscpu::run(data, config, costs, opt.budget);

    std::filesystem::create_directories(opt.out_dir);
    const auto out = [&](const std::string& name) {
        return (std::filesystem::path(opt.out_dir) / name).string();
    };
    nlohmann::json result_json = fscpu::to_json(result);
    result_json["data"] = opt.data_path;
    result_json["label_column"] = opt.label_column;
    fscpu::write_text_file(out("run_result.json"), result_json.dump(2) + "\n");
    fscpu::write_text_file(out("theta_trace.csv"), fscpu::theta_trace_csv(result));

    std::string names;
    for (std::size_t idx : result.selected_features) names += data.feature_names[idx] + "\n";
    fscpu::write_text_file(out("selected_features.txt"), names);

    std::cout << "selected " << result.selected_features.size() << " features (best f "
              << result.best_f << ", " << result.wall_seconds << " s) -> " << opt.out_dir
              << std::endl;
    return 0;
}

int cmd_synth(bool cluster_assumption, bool outlier, double labeled_rate, int neg, int pos,
              std::uint64_t seed, const std::string& out_path) {
    if (cluster_assumption == outlier)
        throw fscpu::ConfigError("pass exactly one of --cluster-assumption or --outlier");

    fscpu::Dataset data;
    if (cluster_assumption) {
        fscpu::SyntheticSpec spec;
        spec.cluster_assumption = true;
        spec.labeled_rate = labeled_rate;
        spec.n_negative_clusters = neg;
        spec.n_positive_clusters = pos;
        spec.seed = seed;
        data = fscpu::generate_clustered(spec);
    } else {
        data = fscpu::generate_outlier(labeled_rate, seed);
    }
    const auto parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    fscpu::write_csv(data, out_path);
    std::cout << data.n_rows << " rows x " << data.n_features << " features ("
              << data.labeled_count() << " labeled) -> " << out_path << std::endl;
    return 0;
}

int cmd_eval(const std::string& selected_path, const std::string& sidecar) {
    std::ifstream in(selected_path);
    if (!in)
        throw fscpu::DataError(fscpu::DataErrorCode::missing_file,
                               "cannot open selected-features file: " + selected_path);
    std::set<std::string> selected;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) selected.insert(line);
    }

    nlohmann::json j = nlohmann::json::parse(fscpu::read_text_file(sidecar));
    if (!j.contains("relevant_features"))
        throw fscpu::DataError(fscpu::DataErrorCode::no_ground_truth,
                               "sidecar lists no relevant features: " + sidecar);
    std::size_t relevant = 0, correct = 0;
    for (const auto& name : j["relevant_features"]) {
        ++relevant;
        if (selected.count(name.get<std::string>())) ++correct;
    }
    if (relevant == 0)
        throw fscpu::DataError(fscpu::DataErrorCode::no_ground_truth,
                               "sidecar lists no relevant features: " + sidecar);

    std::printf("%.17g\n", static_cast<double>(correct) / static_cast<double>(relevant));
    return 0;
}

int cmd_check(int trials, std::uint64_t seed, bool faulty) {
    fscpu::check::CheckOptions options;
    options.seed = seed;
    options.oracle_trials = trials;
    options.faulty_objective = faulty;

    const auto results = fscpu::check::run_checks(options);
    for (const auto& r : results)
        std::printf("[%s] %-22s %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), r.seconds);
    const bool ok = fscpu::check::all_passed(results);
    std::printf("%s\n", ok ? "all checks passed" : "CHECKS FAILED");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature selection for positive-unlabeled data"};
    app.require_subcommand(1);

    // select
    auto* select = app.add_subcommand("select", "Select features from a CSV dataset");
    SelectOptions sopt;
    select->add_option("data", sopt.data_path, "Input CSV")->required();
    select->add_option("--label-col", sopt.label_column, "Name of the 0/1 PU label column")
        ->required();
    select->add_option("--budget", sopt.budget, "Total cost budget (max feature count at unit costs)");
    select->add_option("--costs", sopt.costs, "Cost file (one value per feature) or 'unit'");
    select->add_option("--objective", sopt.objective, "Score: fscpu or fscpu-mi");
    select->add_option("--iters", sopt.iterations, "Optimizer iterations");
    select->add_option("--clusters", sopt.clusters, "Number of mixture components");
    select->add_option("--backend", sopt.backend, "Clustering backend: gmm or kmeans");
    select->add_option("--trace-every", sopt.trace_every, "Theta trace sampling stride");
    select->add_option("--em-max-iter", sopt.em_max_iter, "EM iteration cap");
    select->add_option("--em-tol", sopt.em_tol, "EM mean log-likelihood tolerance");
    select->add_option("--var-floor", sopt.var_floor, "Variance floor for the mixture");
    select->add_option("--seed", sopt.seed, "RNG seed");
    select->add_option("--out", sopt.out_dir, "Output directory");
    select->add_option("--config", sopt.config_path, "JSON config file (or a run_result.json)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
    bool cluster_assumption = false, outlier = false;
    double labeled_rate = 0.4;
    int neg = 8, pos = 1;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "synthetic.csv";
    synth->add_flag("--cluster-assumption", cluster_assumption,
                    "Positives form their own Gaussian clusters");
    synth->add_flag("--outlier", outlier, "Positives are the high-norm tail");
    synth->add_option("--labeled-rate", labeled_rate, "Fraction of positives that get s=1");
    synth->add_option("--neg", neg, "Number of negative clusters");
    synth->add_option("--pos", pos, "Number of positive clusters");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--out", synth_out, "Output CSV path");

    // eval
    auto* eval = app.add_subcommand("eval", "Feature selection recall of a selection");
    std::string selected_path, sidecar_path;
    eval->add_option("selected", selected_path, "Selected-features file (one name per line)")
        ->required();
    eval->add_option("sidecar", sidecar_path, "Ground-truth sidecar JSON")->required();

    // check
    auto* check = app.add_subcommand("check", "Run the built-in property suite");
    int trials = 1000;
    std::uint64_t check_seed = 0;
    bool faulty = false;
    check->add_option("--trials", trials, "Size of the subset-search sweep");
    check->add_option("--seed", check_seed, "RNG seed");
    check->add_flag("--inject-faulty-objective", faulty, "Negative control for the suite")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (select->parsed()) return cmd_select(*select, sopt);
        if (synth->parsed())
            return cmd_synth(cluster_assumption, outlier, labeled_rate, neg, pos, synth_seed,
                             synth_out);
        if (eval->parsed()) return cmd_eval(selected_path, sidecar_path);
        if (check->parsed()) return cmd_check(trials, check_seed, faulty);
    } catch (const fscpu::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const fscpu::DataError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitInternal;
    }
    return kExitConfig;
}
