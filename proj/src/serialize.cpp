#include "fscpu/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fscpu/errors.hpp"

namespace fscpu {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

nlohmann::json to_json(const SyntheticSpec& spec) {
    return {{"cluster_assumption", spec.cluster_assumption},
            {"labeled_rate", spec.labeled_rate},
            {"n_negative_clusters", spec.n_negative_clusters},
            {"n_positive_clusters", spec.n_positive_clusters},
            {"seed", spec.seed}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
    SyntheticSpec spec;
    spec.cluster_assumption = j.value("cluster_assumption", spec.cluster_assumption);
    spec.labeled_rate = j.value("labeled_rate", spec.labeled_rate);
    spec.n_negative_clusters = j.value("n_negative_clusters", spec.n_negative_clusters);
    spec.n_positive_clusters = j.value("n_positive_clusters", spec.n_positive_clusters);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

nlohmann::json to_json(const ObjectiveReport& report) {
    nlohmann::json j = {{"f", report.f_value},
                        {"recall", report.recall},
                        {"precision", report.precision},
                        {"chosen_clusters", report.chosen_clusters},
                        {"ratios", report.per_cluster_ratio}};
    j["mi"] = report.mi_value ? nlohmann::json(*report.mi_value) : nlohmann::json();
    j["combined"] = report.combined_value ? nlohmann::json(*report.combined_value) : nlohmann::json();
    return j;
}

nlohmann::json to_json(const ClusterConfig& config) {
    return {{"n_components", config.n_components},
            {"max_iter", config.max_iter},
            {"tol", config.tol},
            {"var_floor", config.var_floor},
            {"backend", backend_name(config.backend)}};
}

nlohmann::json to_json(const RunConfig& config) {
    return {{"iterations", config.iterations},
            {"seed", config.seed},
            {"objective", objective_mode_name(config.objective_mode)},
            {"trace_every", config.trace_every},
            {"clustering", to_json(config.clustering)}};
}

nlohmann::json to_json(const RunResult& result, bool include_wall_seconds) {
    nlohmann::json config = to_json(result.config);
    config["budget"] = result.budget;
    bool unit = true;
    for (double c : result.costs) unit = unit && c == 1.0;
    config["costs"] = unit ? nlohmann::json("unit") : nlohmann::json(result.costs);

    nlohmann::json j = {{"selected_features", result.selected_features},
                        {"final_theta", result.final_theta.theta},
                        {"best_f", result.best_f},
                        {"best_score", result.best_score},
                        {"best_iteration", result.best_iteration},
                        {"best_mask", result.best_mask},
                        {"convergence_fraction", result.convergence_fraction},
                        {"evaluations", result.evaluations},
                        {"config", config}};
    if (result.best_mi) j["best_mi"] = *result.best_mi;
    if (include_wall_seconds) j["wall_seconds"] = result.wall_seconds;
    return j;
}

nlohmann::json to_json(const ExperimentResult& result) {
    return {{"condition", to_json(result.condition)},
            {"seeds", result.seeds},
            {"fsr", result.fsr_values},
            {"mean_fsr", result.mean_fsr},
            {"std_fsr", result.std_fsr},
            {"runtimes_seconds", result.runtimes}};
}

std::string experiment_table_csv(const std::vector<ExperimentResult>& results) {
    std::size_t max_seeds = 0;
    for (const auto& r : results) max_seeds = std::max(max_seeds, r.fsr_values.size());

    std::ostringstream out;
    out << "cluster_assumption,labeled_rate,n_negative_clusters,n_positive_clusters,mean_fsr,std_fsr";
    for (std::size_t i = 0; i < max_seeds; ++i) out << ",fsr_seed" << i;
    out << '\n';
    for (const auto& r : results) {
        const auto& c = r.condition;
        out << (c.cluster_assumption ? 1 : 0) << ',' << format_value(c.labeled_rate) << ',';
        if (c.cluster_assumption)
            out << c.n_negative_clusters << ',' << c.n_positive_clusters;
        else
            out << ',';
        out << ',' << format_value(r.mean_fsr) << ',' << format_value(r.std_fsr);
        for (std::size_t i = 0; i < max_seeds; ++i) {
            out << ',';
            if (i < r.fsr_values.size()) out << format_value(r.fsr_values[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::string theta_trace_csv(const RunResult& result) {
    const std::size_t d = result.final_theta.size();
    std::ostringstream out;
    out << "iteration";
    for (std::size_t j = 0; j < d; ++j) out << ",theta_" << j;
    out << '\n';
    for (const auto& row : result.theta_trace) {
        out << row.iteration;
        for (double v : row.theta) out << ',' << format_value(v);
        out << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError(DataErrorCode::io_failure, "cannot write file: " + path);
    out << content;
    if (!out) throw DataError(DataErrorCode::io_failure, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(DataErrorCode::missing_file, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fscpu
