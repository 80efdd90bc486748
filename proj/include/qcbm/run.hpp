#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcbm/config.hpp"
#include "qcbm/permanent_bench.hpp"

namespace qcbm {

inline constexpr const char* kVersion = "0.1.0";

/// Stream tags for seeds derived from RunConfig::seed.
namespace streams {
inline constexpr std::uint64_t init = 0x1417;
inline constexpr std::uint64_t spsa = 0x5b5a;
inline constexpr std::uint64_t sample = 0x5a3b;
inline constexpr std::uint64_t bench = 0xbe1c;
inline constexpr std::uint64_t matrix = 0x3a7;
}  // namespace streams

/// Target distribution named by the config (bins taken from target.bins).
TargetDistribution build_target(const TargetConfig& config);

/// Explicit phases when given, otherwise phases drawn uniformly from the
/// config seed. Shared by every training method.
MeshParams initial_params(const RunConfig& config);

// ---------------------------------------------------------------------------

struct MethodResult {
  EstimatorMethod method = EstimatorMethod::lossless;
  TrainingHistory history;
  double seconds = 0.0;
};

struct TrainResult {
  TargetDistribution target;
  Metric metric = Metric::kl;
  MeshParams initial;
  std::vector<MethodResult> methods;
};

/// Trains every method in config.train_methods from the same initial
/// parameters. Writes nothing.
TrainResult train_all(const RunConfig& config);

// ---------------------------------------------------------------------------

struct BenchRow {
  double eta = 0.0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  std::optional<double> tvd_post;  ///< unset when the n-click stratum is empty
  std::optional<double> tvd_mit;
  std::optional<double> tvd_raw;
  std::uint64_t shots_post = 0;
  std::uint64_t shots_recycled = 0;
};

struct BenchSummary {
  double eta = 0.0;
  int seeds = 0;
  double median_tvd_post = 0.0;
  double median_tvd_mit = 0.0;
  double win_fraction = 0.0;        ///< seeds where mitigation beats post-selection
  double median_improvement = 0.0;  ///< median over seeds of 1 − TVD_mit / TVD_post
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSummary> summaries;  ///< one per η
};

/// Haar-random circuits, one per seed index and η; post-selection vs.
/// recycling mitigation against the ideal reference.
BenchResult mitigate_bench(const RunConfig& config);

// ---------------------------------------------------------------------------

/// Reads a square matrix from JSON: rows of numbers, or rows of [re, im].
ComplexMatrix read_matrix_json(const std::string& path);

ComparisonReport permanent_bench(const RunConfig& config);

// ---------------------------------------------------------------------------

/// Runs config.mode and writes its artifacts under config.output_dir.
/// Returns the summary document (also written as summary.json).
Json run(const RunConfig& config);

}  // namespace qcbm
