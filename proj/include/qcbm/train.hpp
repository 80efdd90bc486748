#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcbm/mesh.hpp"
#include "qcbm/metrics.hpp"
#include "qcbm/mitigation.hpp"
#include "qcbm/noise.hpp"

namespace qcbm {

// ---------------------------------------------------------------------------
// Binning

/// Partition of the C(m, n) n-click patterns (in canonical rank order) into
/// B contiguous blocks whose sizes differ by at most one.
struct BinMap {
  int modes = 0;
  int photons = 0;
  int bin_count = 0;
  std::vector<int> assignment;  ///< pattern rank → bin

  std::size_t pattern_count() const { return assignment.size(); }
};

BinMap build_bin_map(int modes, int photons, int bins);

/// Σ of pattern probabilities per bin.
RealVector model_bin_distribution(const EstimatorOutput& est, const BinMap& map);
RealVector model_bin_distribution(const RealVector& pattern_probs, const BinMap& map);

// ---------------------------------------------------------------------------
// Targets

struct GaussianMixtureParams {
  double mu1 = -2.0;
  double mu2 = 2.0;
  double sigma1 = 0.5;
  double sigma2 = 0.5;
  double weight = 0.5;  ///< mass of the first component
  double x_min = -4.0;
  double x_max = 4.0;
  int bins = 30;
};

struct CsvDatasetSource {
  std::string path;
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  int bins = 30;
};

struct TargetDistribution {
  RealVector bin_probs;
  double x_min = 0.0;
  double x_max = 1.0;
  std::variant<GaussianMixtureParams, CsvDatasetSource> provenance;

  int bins() const { return static_cast<int>(bin_probs.size()); }
  /// Fraction of bins with zero mass.
  double zero_fraction() const;
};

/// Mixture density integrated per bin with a 64-point midpoint rule, renormalized.
TargetDistribution gaussian_mixture_target(const GaussianMixtureParams& params);

/// Log returns from a CSV with a header row holding either `price` (optionally
/// with `date`) or `log_return`. Prices give r_t = ln(p_t / p_{t-1}).
std::vector<double> read_log_returns(std::istream& in);

/// Returns clipped to [quantile(lo), quantile(hi)] and histogrammed over that
/// range. A degenerate range widens to ±0.5 around its value.
TargetDistribution returns_histogram(const std::vector<double>& returns, int bins, double clip_lo, double clip_hi);

TargetDistribution csv_returns_target(const std::string& path, int bins, double clip_lo = 0.0, double clip_hi = 1.0);

/// Linear-interpolated sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

// ---------------------------------------------------------------------------
// Losses

enum class Metric { kl, tvd };
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

/// TVD for sparse targets (more than a quarter of the bins empty), KL otherwise.
Metric suggest_metric(const TargetDistribution& target);

double metric_value(Metric metric, const RealVector& target, const RealVector& model);

/// How a parameter vector becomes a model distribution.
struct LossPipeline {
  FockState input;
  LossModel loss;
  std::uint64_t shots = 0;
  EstimatorMethod method = EstimatorMethod::lossless;
  MitigationConfig mitigation;
  unsigned threads = 1;
};

/// Model estimate for `params`: exact collision-free distribution for the
/// lossless method, otherwise lossy sampling followed by the estimator.
EstimatorOutput model_estimate(const MeshParams& params, const LossPipeline& pipeline, Rng& rng);

/// Metric between target and the binned model estimate.
double evaluate_loss(const MeshParams& params, const LossPipeline& pipeline, const TargetDistribution& target,
                     const BinMap& map, Metric metric, Rng& rng);

/// Noise-free loss of the lossless model at `params`.
double exact_loss(const MeshParams& params, const FockState& input, const TargetDistribution& target,
                  const BinMap& map, Metric metric);

// ---------------------------------------------------------------------------
// SPSA

struct SpsaConfig {
  std::optional<double> a;  ///< unset: calibrated so the first step has norm ≈ target_step rad
  double c = 0.1;
  double alpha = 0.602;
  double gamma = 0.101;
  std::optional<double> big_a;  ///< unset: 0.1 · max_iters
  int max_iters = 300;
  std::uint64_t seed = 0;
  int record_every = 1;
  int calibration_steps = 5;
  double target_step = 0.1;

  void validate() const;
  double stability() const { return big_a.value_or(0.1 * max_iters); }
};

/// A stochastic objective. `evaluate` must draw all randomness from the
/// stream it is handed; `monitor`, when set, gives a noise-free reference
/// value stored alongside each record.
struct LossFunction {
  std::function<double(const MeshParams&, Rng&)> evaluate;
  std::uint64_t shots_per_call = 0;
  std::function<double(const MeshParams&)> monitor;
  std::string method;
};

struct TrainingRecord {
  int iteration = 0;
  double loss = 0.0;
  std::optional<double> exact_loss;
  std::string method;
  std::uint64_t shots_spent = 0;
  RealVector phases;
};

struct TrainingHistory {
  std::vector<TrainingRecord> records;
  MeshParams final_params;
  double gain_a = 0.0;
  bool aborted = false;
  std::string diagnostic;
};

/// Gain-scheduled SPSA on the free phases of `initial`. Records the loss at
/// the unperturbed point at iteration 0, every `record_every` iterations and
/// at the last iteration.
TrainingHistory spsa_train(const MeshParams& initial, const SpsaConfig& cfg, const LossFunction& loss);

/// SPSA on a plain real vector, for objectives that are not circuits.
struct VectorSpsaResult {
  RealVector x;
  std::vector<double> losses;
};
VectorSpsaResult spsa_minimize(const RealVector& x0, const SpsaConfig& cfg,
                               const std::function<double(const RealVector&, Rng&)>& loss);

}  // namespace qcbm
