#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcbm/mesh.hpp"
#include "qcbm/mitigation.hpp"
#include "qcbm/noise.hpp"
#include "qcbm/train.hpp"

namespace qcbm {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Parses text written by `format_double` (or any decimal literal).
double parse_double(const std::string& text);

// Count and estimator tables are CSV files whose first line is `# ` followed
// by a one-line JSON header, then a column header row, then data rows.

void write_counts_csv(std::ostream& out, const LossyCounts& counts);
LossyCounts read_counts_csv(std::istream& in);

void write_estimator_csv(std::ostream& out, const EstimatorOutput& est);
EstimatorOutput read_estimator_csv(std::istream& in);

Json mesh_params_to_json(const MeshParams& params);
MeshParams mesh_params_from_json(const Json& j);

Json record_to_json(const TrainingRecord& record);
TrainingRecord record_from_json(const Json& j);

/// One JSON object per line.
void write_history_jsonl(std::ostream& out, const TrainingHistory& history);
std::vector<TrainingRecord> read_history_jsonl(std::istream& in);

/// `iteration,loss` rows.
void write_curve_csv(std::ostream& out, const TrainingHistory& history);

Json target_to_json(const TargetDistribution& target);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qcbm
