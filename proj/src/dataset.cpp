#include "fscpu/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fscpu/errors.hpp"
#include "fscpu/rng.hpp"

#include "json.hpp"

namespace fscpu {

namespace {

constexpr std::size_t kRelevantCols = 25;
constexpr std::size_t kUniformCols = 20;
constexpr std::size_t kNoiseCols = 5;
constexpr std::size_t kTotalCols = kRelevantCols + kUniformCols + kNoiseCols;
constexpr std::size_t kNegativeRows = 4000;
constexpr std::size_t kPositiveRows = 500;
constexpr std::size_t kTotalRows = kNegativeRows + kPositiveRows;

std::vector<std::string> default_feature_names(std::size_t d) {
    std::vector<std::string> names(d);
    for (std::size_t j = 0; j < d; ++j) names[j] = "f" + std::to_string(j);
    return names;
}

// Shared irrelevant block: columns 25..44 uniform on [-10, 10], then columns
// 45..49 copy a random uniform column and add unit-variance noise per row.
// Draw order (after the relevant block): uniform cells row-major, the 5
// source-column picks, then the noise cells row-major.
void fill_irrelevant_columns(Dataset& data, Rng& rng) {
    for (std::size_t i = 0; i < data.n_rows; ++i)
        for (std::size_t j = 0; j < kUniformCols; ++j)
            data.at(i, kRelevantCols + j) = rng.uniform(-10.0, 10.0);

    std::vector<std::size_t> sources = rng.sample_without_replacement(kUniformCols, kNoiseCols);
    std::sort(sources.begin(), sources.end());
    for (std::size_t i = 0; i < data.n_rows; ++i)
        for (std::size_t t = 0; t < kNoiseCols; ++t)
            data.at(i, kRelevantCols + kUniformCols + t) =
                data.at(i, kRelevantCols + sources[t]) + rng.normal(0.0, 1.0);
}

void assign_labels(Dataset& data, double labeled_rate, Rng& rng) {
    std::vector<std::size_t> positive_rows;
    for (std::size_t i = 0; i < data.n_rows; ++i)
        if (data.y_truth[i]) positive_rows.push_back(i);

    const auto n_labeled = static_cast<std::size_t>(
        std::floor(labeled_rate * static_cast<double>(positive_rows.size())));
    std::vector<std::size_t> picks =
        rng.sample_without_replacement(positive_rows.size(), n_labeled);
    data.s.assign(data.n_rows, 0);
    for (std::size_t p : picks) data.s[positive_rows[p]] = 1;
}

void validate_rate(double labeled_rate) {
    if (!(labeled_rate > 0.0) || labeled_rate > 1.0)
        throw ConfigError("labeled_rate must be in (0, 1], got " + std::to_string(labeled_rate));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::size_t Dataset::labeled_count() const {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

void Dataset::validate() const {
    if (n_rows == 0 || n_features == 0)
        throw DataError(DataErrorCode::zero_rows, "dataset must have at least one row and one feature");
    if (X.size() != n_rows * n_features || s.size() != n_rows)
        throw DataError(DataErrorCode::length_mismatch, "dataset buffers have inconsistent lengths");
    for (double v : X)
        if (!std::isfinite(v))
            throw DataError(DataErrorCode::non_finite_value, "dataset contains a non-finite value");
    const std::size_t labeled = labeled_count();
    if (labeled == 0)
        throw DataError(DataErrorCode::all_unlabeled, "dataset has no labeled-positive row");
    if (labeled == n_rows)
        throw DataError(DataErrorCode::all_labeled, "dataset has no unlabeled row");
    if (!relevant_truth.empty()) {
        if (relevant_truth.size() != n_features)
            throw DataError(DataErrorCode::length_mismatch, "relevant_truth length mismatch");
        if (std::count(relevant_truth.begin(), relevant_truth.end(), std::uint8_t{1}) == 0)
            throw DataError(DataErrorCode::no_ground_truth, "relevant_truth marks no feature");
    }
    if (!y_truth.empty() && y_truth.size() != n_rows)
        throw DataError(DataErrorCode::length_mismatch, "y_truth length mismatch");
}

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".truth.json"; }

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError(DataErrorCode::missing_file, "cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError(DataErrorCode::zero_rows, "empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_csv_line(line);
    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == label_column) label_idx = j;
    if (label_idx == header.size())
        throw DataError(DataErrorCode::missing_column,
                        "label column '" + label_column + "' not found in " + path);

    Dataset data;
    data.n_features = header.size() - 1;
    if (data.n_features == 0)
        throw DataError(DataErrorCode::zero_rows, "no feature columns in " + path);
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != label_idx) data.feature_names.push_back(header[j]);

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(DataErrorCode::length_mismatch,
                            "row " + std::to_string(row + 1) + " has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(header.size()));
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const char* text = cells[j].c_str();
            char* end = nullptr;
            const double v = std::strtod(text, &end);
            if (end == text || *end != '\0')
                throw DataError(DataErrorCode::non_numeric_cell,
                                "non-numeric cell '" + cells[j] + "' at row " + std::to_string(row + 1) +
                                    ", column '" + header[j] + "'");
            if (!std::isfinite(v))
                throw DataError(DataErrorCode::non_finite_value,
                                "non-finite value at row " + std::to_string(row + 1) + ", column '" +
                                    header[j] + "'");
            if (j == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw DataError(DataErrorCode::invalid_pu_label,
                                    "invalid PU label '" + cells[j] + "' at row " +
                                        std::to_string(row + 1) + " (expected 0 or 1)");
                data.s.push_back(static_cast<std::uint8_t>(v));
            } else {
                data.X.push_back(v);
            }
        }
        ++row;
    }
    data.n_rows = row;
    if (data.n_rows == 0) throw DataError(DataErrorCode::zero_rows, "no data rows in " + path);

    const std::size_t labeled = data.labeled_count();
    if (labeled == 0)
        throw DataError(DataErrorCode::all_unlabeled, "no labeled-positive row in " + path);
    if (labeled == data.n_rows)
        throw DataError(DataErrorCode::all_labeled, "every row is labeled positive in " + path);

    // Ground truth, if a sidecar sits next to the CSV.
    std::ifstream side(sidecar_path(path));
    if (side) {
        nlohmann::json j;
        try {
            side >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(DataErrorCode::invalid_sidecar,
                            "cannot parse sidecar " + sidecar_path(path) + ": " + e.what());
        }
        if (j.contains("relevant_features")) {
            data.relevant_truth.assign(data.n_features, 0);
            for (const auto& name : j["relevant_features"]) {
                const std::string n = name.get<std::string>();
                const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), n);
                if (it == data.feature_names.end())
                    throw DataError(DataErrorCode::invalid_sidecar,
                                    "sidecar names unknown feature '" + n + "'");
                data.relevant_truth[static_cast<std::size_t>(it - data.feature_names.begin())] = 1;
            }
        }
        if (j.contains("positive_rows")) {
            data.y_truth.assign(data.n_rows, 0);
            for (const auto& idx : j["positive_rows"]) {
                const auto i = idx.get<std::size_t>();
                if (i >= data.n_rows)
                    throw DataError(DataErrorCode::invalid_sidecar, "sidecar row index out of range");
                data.y_truth[i] = 1;
            }
        }
        if (j.contains("generator")) {
            SyntheticSpec spec;
            const auto& g = j["generator"];
            spec.cluster_assumption = g.value("cluster_assumption", true);
            spec.labeled_rate = g.value("labeled_rate", 0.0);
            spec.n_negative_clusters = g.value("n_negative_clusters", 1);
            spec.n_positive_clusters = g.value("n_positive_clusters", 1);
            spec.seed = g.value("seed", std::uint64_t{0});
            data.generator = spec;
        }
    }

    data.validate();
    return data;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(DataErrorCode::io_failure, "cannot write file: " + path);

    const std::vector<std::string> names =
        data.feature_names.empty() ? default_feature_names(data.n_features) : data.feature_names;
    for (std::size_t j = 0; j < data.n_features; ++j) out << names[j] << ',';
    out << "label\n";
    for (std::size_t i = 0; i < data.n_rows; ++i) {
        for (std::size_t j = 0; j < data.n_features; ++j) out << format_value(data.at(i, j)) << ',';
        out << int(data.s[i]) << '\n';
    }
    if (!out) throw DataError(DataErrorCode::io_failure, "write failed: " + path);
    out.close();

    if (!data.relevant_truth.empty() || !data.y_truth.empty()) {
        nlohmann::json j;
        if (!data.relevant_truth.empty()) {
            auto& rel = j["relevant_features"] = nlohmann::json::array();
            for (std::size_t k = 0; k < data.n_features; ++k)
                if (data.relevant_truth[k]) rel.push_back(names[k]);
        }
        if (!data.y_truth.empty()) {
            auto& rows = j["positive_rows"] = nlohmann::json::array();
            for (std::size_t i = 0; i < data.n_rows; ++i)
                if (data.y_truth[i]) rows.push_back(i);
        }
        if (data.generator) {
            j["generator"] = {{"cluster_assumption", data.generator->cluster_assumption},
                              {"labeled_rate", data.generator->labeled_rate},
                              {"n_negative_clusters", data.generator->n_negative_clusters},
                              {"n_positive_clusters", data.generator->n_positive_clusters},
                              {"seed", data.generator->seed}};
        }
        std::ofstream side(sidecar_path(path));
        if (!side) throw DataError(DataErrorCode::io_failure, "cannot write sidecar for " + path);
        side << j.dump(2) << '\n';
    }
}

NormalizationParams fit_minmax(const Dataset& data) {
    NormalizationParams params;
    params.mins.assign(data.n_features, std::numeric_limits<double>::infinity());
    params.maxs.assign(data.n_features, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.n_rows; ++i)
        for (std::size_t j = 0; j < data.n_features; ++j) {
            const double v = data.at(i, j);
            params.mins[j] = std::min(params.mins[j], v);
            params.maxs[j] = std::max(params.maxs[j], v);
        }
    return params;
}

Dataset apply_minmax(const Dataset& data, const NormalizationParams& params) {
    if (params.mins.size() != data.n_features)
        throw DataError(DataErrorCode::length_mismatch, "normalization params length mismatch");
    Dataset out = data;
    for (std::size_t j = 0; j < data.n_features; ++j) {
        const double range = params.maxs[j] - params.mins[j];
        for (std::size_t i = 0; i < data.n_rows; ++i)
            out.at(i, j) = range == 0.0 ? 0.0 : (data.at(i, j) - params.mins[j]) / range;
    }
    return out;
}

Dataset generate_clustered(const SyntheticSpec& spec) {
    if (!spec.cluster_assumption)
        throw ConfigError("generate_clustered requires cluster_assumption=true");
    validate_rate(spec.labeled_rate);
    if (spec.n_negative_clusters < 1 || spec.n_positive_clusters < 1)
        throw ConfigError("cluster counts must be >= 1");

    Rng rng(spec.seed);
    Dataset data;
    data.n_rows = kTotalRows;
    data.n_features = kTotalCols;
    data.X.assign(data.n_rows * data.n_features, 0.0);
    data.feature_names = default_feature_names(kTotalCols);

    const auto n_neg = static_cast<std::size_t>(spec.n_negative_clusters);
    const auto n_pos = static_cast<std::size_t>(spec.n_positive_clusters);
    const double sigma = std::sqrt(10.0);

    std::vector<double> neg_means(n_neg * kRelevantCols);
    for (double& m : neg_means) m = rng.uniform(-5.0, 5.0);
    std::vector<double> pos_means(n_pos * kRelevantCols);
    for (double& m : pos_means) m = rng.uniform(-5.0, 5.0);

    // Rows split equally across the clusters (remainder to the earlier ones).
    std::size_t row = 0;
    for (std::size_t c = 0; c < n_neg; ++c) {
        const std::size_t count = kNegativeRows / n_neg + (c < kNegativeRows % n_neg ? 1 : 0);
        for (std::size_t r = 0; r < count; ++r, ++row)
            for (std::size_t j = 0; j < kRelevantCols; ++j)
                data.at(row, j) = rng.normal(neg_means[c * kRelevantCols + j], sigma);
    }
    for (std::size_t c = 0; c < n_pos; ++c) {
        const std::size_t count = kPositiveRows / n_pos + (c < kPositiveRows % n_pos ? 1 : 0);
        for (std::size_t r = 0; r < count; ++r, ++row)
            for (std::size_t j = 0; j < kRelevantCols; ++j)
                data.at(row, j) = rng.normal(pos_means[c * kRelevantCols + j], sigma);
    }

    fill_irrelevant_columns(data, rng);

    data.relevant_truth.assign(kTotalCols, 0);
    for (std::size_t j = 0; j < kRelevantCols; ++j) data.relevant_truth[j] = 1;
    data.y_truth.assign(kTotalRows, 0);
    for (std::size_t i = kNegativeRows; i < kTotalRows; ++i) data.y_truth[i] = 1;

    assign_labels(data, spec.labeled_rate, rng);
    data.generator = spec;
    data.validate();
    return data;
}

Dataset generate_outlier(double labeled_rate, std::uint64_t seed) {
    validate_rate(labeled_rate);

    Rng rng(seed);
    Dataset data;
    data.n_rows = kTotalRows;
    data.n_features = kTotalCols;
    data.X.assign(data.n_rows * data.n_features, 0.0);
    data.feature_names = default_feature_names(kTotalCols);

    for (std::size_t i = 0; i < kTotalRows; ++i)
        for (std::size_t j = 0; j < kRelevantCols; ++j)
            data.at(i, j) = rng.normal(0.0, 5.0);

    // True positives: the 500 rows of largest norm over the relevant block.
    std::vector<std::size_t> order(kTotalRows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> sq_norm(kTotalRows, 0.0);
    for (std::size_t i = 0; i < kTotalRows; ++i)
        for (std::size_t j = 0; j < kRelevantCols; ++j)
            sq_norm[i] += data.at(i, j) * data.at(i, j);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sq_norm[a] > sq_norm[b]; });

    fill_irrelevant_columns(data, rng);

    data.relevant_truth.assign(kTotalCols, 0);
    for (std::size_t j = 0; j < kRelevantCols; ++j) data.relevant_truth[j] = 1;
    data.y_truth.assign(kTotalRows, 0);
    for (std::size_t t = 0; t < kPositiveRows; ++t) data.y_truth[order[t]] = 1;

    assign_labels(data, labeled_rate, rng);
    SyntheticSpec spec;
    spec.cluster_assumption = false;
    spec.labeled_rate = labeled_rate;
    spec.n_negative_clusters = 1;
    spec.n_positive_clusters = 1;
    spec.seed = seed;
    data.generator = spec;
    data.validate();
    return data;
}

Dataset subsample_rows(const Dataset& data, std::size_t n_keep, std::uint64_t seed) {
    if (n_keep == 0 || n_keep > data.n_rows)
        throw ConfigError("subsample size must be in [1, n_rows]");
    if (n_keep == data.n_rows) return data;

    Rng rng(seed);
    std::vector<std::size_t> keep = rng.sample_without_replacement(data.n_rows, n_keep);
    std::sort(keep.begin(), keep.end());

    Dataset out;
    out.n_rows = n_keep;
    out.n_features = data.n_features;
    out.feature_names = data.feature_names;
    out.relevant_truth = data.relevant_truth;
    out.generator = data.generator;
    out.X.reserve(n_keep * data.n_features);
    out.s.reserve(n_keep);
    if (!data.y_truth.empty()) out.y_truth.reserve(n_keep);
    for (std::size_t i : keep) {
        out.X.insert(out.X.end(), data.X.begin() + static_cast<std::ptrdiff_t>(i * data.n_features),
                     data.X.begin() + static_cast<std::ptrdiff_t>((i + 1) * data.n_features));
        out.s.push_back(data.s[i]);
        if (!data.y_truth.empty()) out.y_truth.push_back(data.y_truth[i]);
    }
    out.validate();
    return out;
}

}  // namespace fscpu
