#pragma once

#include <string>
#include <vector>

#include "fscpu/evaluation.hpp"
#include "fscpu/objective.hpp"
#include "fscpu/optimizer.hpp"

#include "json.hpp"

namespace fscpu {

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ObjectiveReport& report);

nlohmann::json to_json(const ClusterConfig& config);
nlohmann::json to_json(const RunConfig& config);

// include_wall_seconds=false gives the byte-stable form used by the
// reproducibility checks (wall time is the one non-deterministic field).
nlohmann::json to_json(const RunResult& result, bool include_wall_seconds = true);

nlohmann::json to_json(const ExperimentResult& result);
// One row per condition, Table-style: condition columns, then mean, std and
// the per-seed values.
std::string experiment_table_csv(const std::vector<ExperimentResult>& results);

std::string theta_trace_csv(const RunResult& result);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace fscpu
