#pragma once

#include <stdexcept>
#include <string>

namespace fscpu {

enum class DataErrorCode {
    missing_file,
    io_failure,
    non_numeric_cell,
    non_finite_value,
    invalid_pu_label,
    missing_column,
    zero_rows,
    all_labeled,
    all_unlabeled,
    length_mismatch,
    no_labeled_data,
    empty_mask,
    too_many_clusters,
    no_ground_truth,
    invalid_sidecar,
};

// Problems rooted in the input data or data files. CLI maps these to exit 3.
class DataError : public std::runtime_error {
public:
    DataError(DataErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DataErrorCode code() const noexcept { return code_; }

private:
    DataErrorCode code_;
};

// Invalid configuration or parameters. CLI maps these to exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fscpu
