#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcbm/io.hpp"
#include "qcbm/mitigation.hpp"
#include "qcbm/train.hpp"

namespace qcbm {

enum class RunMode { simulate, train, mitigate_bench, permanent_bench };
std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct CircuitConfig {
  int m = 12;
  int n = 4;
  int k = 1;
  std::vector<int> input_occupations;  ///< empty in the document → alternating default
  bool single_phase_mode = false;
  bool tied_blocks = false;
  std::optional<std::vector<double>> phases;  ///< flat k·m(m−1) vector
};

enum class TargetKind { gaussian_mixture, csv };

struct TargetConfig {
  TargetKind kind = TargetKind::gaussian_mixture;
  int bins = 50;
  GaussianMixtureParams gaussian;
  std::string path;
  double clip_lo = 0.01;
  double clip_hi = 0.99;
};

struct MitigateBenchConfig {
  int seeds = 20;
  std::vector<double> etas;  ///< empty → {noise.eta}
};

struct PermanentBenchConfig {
  std::string matrix_path;  ///< empty → random Gaussian matrix
  int size = 3;
  std::optional<std::uint64_t> matrix_seed;
  double epsilon = 0.1;
  double delta = 0.05;
  std::vector<std::uint64_t> budgets = {100, 300, 1000, 3000, 10000};
  int repetitions = 100;
  std::string csv = "permanent_bench.csv";
};

struct RunConfig {
  std::optional<RunMode> mode;
  CircuitConfig circuit;
  double eta = 0.8;
  std::uint64_t shots_per_evaluation = 200000;
  unsigned threads = 1;
  EstimatorMethod estimator = EstimatorMethod::recycled_mitigated;
  std::vector<EstimatorMethod> train_methods = {EstimatorMethod::lossless, EstimatorMethod::postselect,
                                                EstimatorMethod::recycled_mitigated};
  MitigationConfig mitigation;
  TargetConfig target;
  std::optional<Metric> metric;  ///< unset → chosen from the target's sparsity
  SpsaConfig spsa;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  MitigateBenchConfig mitigate_bench;
  PermanentBenchConfig permanent_bench;

  FockState input_state() const { return FockState(circuit.input_occupations); }
};

/// Photons in modes 0, 2, …, 2(n−1). Requires 2n ≤ m + 1.
FockState default_input_state(int m, int n);

/// Parses and validates a run config. Unknown keys, type mismatches and
/// invariant violations are all collected into one ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const Json& doc);

/// Re-checks invariants after programmatic edits (e.g. CLI overrides).
void validate_config(const RunConfig& config);

/// Fully resolved config (defaults filled). parse_config(config_to_json(c))
/// reproduces c.
Json config_to_json(const RunConfig& config);

}  // namespace qcbm
