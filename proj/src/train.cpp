#include "qcbm/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qcbm/fock.hpp"

namespace qcbm {

// ---------------------------------------------------------------------------
// Binning

BinMap build_bin_map(int modes, int photons, int bins) {
  if (modes < 1 || photons < 0 || photons > modes) throw InputError("build_bin_map: bad circuit shape");
  const std::uint64_t count = binomial(static_cast<std::uint64_t>(modes), static_cast<std::uint64_t>(photons));
  if (bins < 1 || static_cast<std::uint64_t>(bins) > count)
    throw InputError("build_bin_map: " + std::to_string(bins) + " bins for " + std::to_string(count) + " patterns");
  BinMap map;
  map.modes = modes;
  map.photons = photons;
  map.bin_count = bins;
  map.assignment.resize(count);
  for (int b = 0; b < bins; ++b) {
    const std::uint64_t lo = static_cast<std::uint64_t>(b) * count / static_cast<std::uint64_t>(bins);
    const std::uint64_t hi = static_cast<std::uint64_t>(b + 1) * count / static_cast<std::uint64_t>(bins);
    for (std::uint64_t r = lo; r < hi; ++r) map.assignment[r] = b;
  }
  return map;
}

RealVector model_bin_distribution(const RealVector& pattern_probs, const BinMap& map) {
  if (static_cast<std::size_t>(pattern_probs.size()) != map.pattern_count())
    throw InputError("model_bin_distribution: pattern count does not match bin map");
  RealVector bins = RealVector::Zero(map.bin_count);
  for (std::size_t r = 0; r < map.assignment.size(); ++r)
    bins[map.assignment[r]] += pattern_probs[static_cast<Eigen::Index>(r)];
  return bins;
}

RealVector model_bin_distribution(const EstimatorOutput& est, const BinMap& map) {
  if (est.table.size() && (est.table.pattern(0).modes != map.modes || est.table.pattern(0).click_count() != map.photons))
    throw InputError("model_bin_distribution: estimator shape does not match bin map");
  return model_bin_distribution(est.table.probs(), map);
}

// ---------------------------------------------------------------------------
// Targets

double TargetDistribution::zero_fraction() const {
  if (bin_probs.size() == 0) return 0.0;
  return static_cast<double>((bin_probs.array() <= 0.0).count()) / static_cast<double>(bin_probs.size());
}

TargetDistribution gaussian_mixture_target(const GaussianMixtureParams& params) {
  if (!(params.x_min < params.x_max)) throw InputError("gaussian_mixture_target: x_min must be below x_max");
  if (!(params.sigma1 > 0.0 && params.sigma2 > 0.0)) throw InputError("gaussian_mixture_target: sigmas must be > 0");
  if (!(params.weight >= 0.0 && params.weight <= 1.0)) throw InputError("gaussian_mixture_target: weight outside [0, 1]");
  if (params.bins < 1) throw InputError("gaussian_mixture_target: need at least one bin");

  auto density = [&](double x) {
    auto normal = [](double x, double mu, double sigma) {
      const double z = (x - mu) / sigma;
      return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    return params.weight * normal(x, params.mu1, params.sigma1) +
           (1.0 - params.weight) * normal(x, params.mu2, params.sigma2);
  };
  constexpr int kSubPoints = 64;
  const double width = (params.x_max - params.x_min) / params.bins;
  RealVector probs(params.bins);
  for (int b = 0; b < params.bins; ++b) {
    const double left = params.x_min + b * width;
    double mass = 0.0;
    for (int k = 0; k < kSubPoints; ++k) mass += density(left + (k + 0.5) * width / kSubPoints);
    probs[b] = mass * width / kSubPoints;
  }
  const double total = probs.sum();
  if (!(total > 0.0)) throw InputError("gaussian_mixture_target: no mass inside the range");
  TargetDistribution out;
  out.bin_probs = probs / total;
  out.x_min = params.x_min;
  out.x_max = params.x_max;
  out.provenance = params;
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r\"");
    const auto last = field.find_last_not_of(" \t\r\"");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(value)) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ParseError("not a finite number: '" + text + "'", line);
  }
}

}  // namespace

std::vector<double> read_log_returns(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw InputError("dataset: missing header row");
  std::ptrdiff_t price_col = -1;
  std::ptrdiff_t return_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "price") price_col = static_cast<std::ptrdiff_t>(i);
    if (header[i] == "log_return") return_col = static_cast<std::ptrdiff_t>(i);
  }
  if (price_col < 0 && return_col < 0) throw ParseError("header needs a 'price' or 'log_return' column", line_no);
  const std::size_t col = static_cast<std::size_t>(return_col >= 0 ? return_col : price_col);

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                       line_no);
    const double value = parse_number(fields[col], line_no);
    if (return_col < 0 && !(value > 0.0)) throw ParseError("price must be positive", line_no);
    values.push_back(value);
  }

  if (return_col >= 0) {
    if (values.empty()) throw InputError("dataset: need at least one log_return row");
    return values;
  }
  if (values.size() < 2) throw InputError("dataset: need at least two price rows");
  std::vector<double> returns;
  returns.reserve(values.size() - 1);
  for (std::size_t t = 1; t < values.size(); ++t) returns.push_back(std::log(values[t] / values[t - 1]));
  return returns;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InputError("quantile of empty data");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile level outside [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TargetDistribution returns_histogram(const std::vector<double>& returns, int bins, double clip_lo, double clip_hi) {
  if (returns.empty()) throw InputError("returns_histogram: no data");
  if (bins < 1) throw InputError("returns_histogram: need at least one bin");
  if (!(clip_lo >= 0.0 && clip_lo < clip_hi && clip_hi <= 1.0))
    throw InputError("returns_histogram: clip quantiles must satisfy 0 <= lo < hi <= 1");
  std::vector<double> sorted = returns;
  std::sort(sorted.begin(), sorted.end());
  double lo = quantile_sorted(sorted, clip_lo);
  double hi = quantile_sorted(sorted, clip_hi);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  RealVector counts = RealVector::Zero(bins);
  for (double r : returns) {
    const double x = std::clamp(r, lo, hi);
    const auto b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
    counts[std::clamp(b, 0, bins - 1)] += 1.0;
  }
  TargetDistribution out;
  out.bin_probs = counts / counts.sum();
  out.x_min = lo;
  out.x_max = hi;
  out.provenance = CsvDatasetSource{"", clip_lo, clip_hi, bins};
  return out;
}

TargetDistribution csv_returns_target(const std::string& path, int bins, double clip_lo, double clip_hi) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  TargetDistribution out = returns_histogram(read_log_returns(in), bins, clip_lo, clip_hi);
  out.provenance = CsvDatasetSource{path, clip_lo, clip_hi, bins};
  return out;
}

// ---------------------------------------------------------------------------
// Losses

std::string to_string(Metric metric) { return metric == Metric::kl ? "kl" : "tvd"; }

Metric metric_from_string(const std::string& name) {
  if (name == "kl") return Metric::kl;
  if (name == "tvd") return Metric::tvd;
  throw InputError("unknown metric '" + name + "'");
}

Metric suggest_metric(const TargetDistribution& target) {
  return target.zero_fraction() > 0.25 ? Metric::tvd : Metric::kl;
}

double metric_value(Metric metric, const RealVector& target, const RealVector& model) {
  return metric == Metric::kl ? kl_divergence(target, model) : tvd(target, model);
}

EstimatorOutput model_estimate(const MeshParams& params, const LossPipeline& pipeline, Rng& rng) {
  const ComplexMatrix u = compose(params);
  const FockDistribution ideal = ideal_distribution(u, pipeline.input);
  if (pipeline.method == EstimatorMethod::lossless) return ideal_reference(ideal);

  const int n = pipeline.input.photon_count();
  const LossyCounts counts = lossy_sample(ideal, pipeline.loss, pipeline.shots, rng, pipeline.threads);
  switch (pipeline.method) {
    case EstimatorMethod::postselect: return postselect(counts, n);
    case EstimatorMethod::recycled_raw: return recycled_raw(recycle(counts, n));
    case EstimatorMethod::recycled_mitigated: return mitigate(recycle(counts, n), pipeline.mitigation);
    case EstimatorMethod::lossless: break;
  }
  throw InputError("model_estimate: unsupported method");
}

double evaluate_loss(const MeshParams& params, const LossPipeline& pipeline, const TargetDistribution& target,
                     const BinMap& map, Metric metric, Rng& rng) {
  if (target.bins() != map.bin_count) throw InputError("evaluate_loss: target and bin map disagree on bin count");
  if (pipeline.input.modes() != params.modes() || map.modes != params.modes() ||
      map.photons != pipeline.input.photon_count())
    throw InputError("evaluate_loss: inconsistent circuit shapes");
  const EstimatorOutput est = model_estimate(params, pipeline, rng);
  return metric_value(metric, target.bin_probs, model_bin_distribution(est, map));
}

double exact_loss(const MeshParams& params, const FockState& input, const TargetDistribution& target,
                  const BinMap& map, Metric metric) {
  LossPipeline pipeline;
  pipeline.input = input;
  Rng unused(0);
  return evaluate_loss(params, pipeline, target, map, metric, unused);
}

// ---------------------------------------------------------------------------
// SPSA

void SpsaConfig::validate() const {
  std::vector<std::string> problems;
  if (a && !(*a >= 0.0)) problems.push_back("spsa.a: must be >= 0");
  if (!(c > 0.0)) problems.push_back("spsa.c: must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) problems.push_back("spsa.alpha: must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) problems.push_back("spsa.gamma: must lie in (0, 1]");
  if (big_a && !(*big_a >= 0.0)) problems.push_back("spsa.big_a: must be >= 0");
  if (max_iters < 0) problems.push_back("spsa.max_iters: must be >= 0");
  if (record_every < 1) problems.push_back("spsa.record_every: must be >= 1");
  if (calibration_steps < 1) problems.push_back("spsa.calibration_steps: must be >= 1");
  if (!(target_step > 0.0)) problems.push_back("spsa.target_step: must be > 0");
  if (!problems.empty()) throw ConfigError(problems);
}

namespace {

/// Evaluation streams: stream 3k+j for probe j of iteration k, calibration
/// and records draw from separate ranges.
enum StreamKind : std::uint64_t { kProbe = 0, kCalibration = 1, kRecord = 2 };

Rng eval_stream(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
  return Rng(derive_seed(derive_seed(seed, 0x5b5a + kind), index));
}

struct SpsaCallbacks {
  std::function<double(const RealVector&, Rng&)> evaluate;
  std::function<RealVector(const RealVector&)> canonical;  // e.g. phase wrapping
  std::function<void(int, const RealVector&, double)> record;
};

/// Returns the gain a actually used.
double run_spsa(RealVector x, const SpsaConfig& cfg, const SpsaCallbacks& cb) {
  cfg.validate();
  Rng perturbation(derive_seed(cfg.seed, 0xde17a));
  const Eigen::Index dim = x.size();
  const double big_a = cfg.stability();

  auto draw_delta = [&] {
    RealVector delta(dim);
    for (Eigen::Index i = 0; i < dim; ++i) delta[i] = perturbation.sign();
    return delta;
  };
  auto checked = [](double value, const char* what, int iteration) {
    if (!std::isfinite(value))
      throw NumericalError(std::string("non-finite loss at ") + what + " evaluation, iteration " +
                           std::to_string(iteration));
    return value;
  };

  double a = 0.0;
  if (cfg.a) {
    a = *cfg.a;
  } else {
    // Mean |(L+ − L−) / 2c| at the first perturbation size.
    const double c1 = cfg.c;
    double magnitude = 0.0;
    for (int s = 0; s < cfg.calibration_steps; ++s) {
      const RealVector delta = draw_delta();
      Rng plus_rng = eval_stream(cfg.seed, kCalibration, 2 * static_cast<std::uint64_t>(s));
      Rng minus_rng = eval_stream(cfg.seed, kCalibration, 2 * static_cast<std::uint64_t>(s) + 1);
      const double plus = checked(cb.evaluate(x + c1 * delta, plus_rng), "calibration", 0);
      const double minus = checked(cb.evaluate(x - c1 * delta, minus_rng), "calibration", 0);
      magnitude += std::abs(plus - minus) / (2.0 * c1);
    }
    // The first step a₁·ĝ has Euclidean norm a₁·|ĝ|·√dim.
    magnitude *= std::sqrt(static_cast<double>(dim)) / cfg.calibration_steps;
    a = cfg.target_step * std::pow(big_a + 1.0, cfg.alpha) / (magnitude > 0.0 ? magnitude : 1.0);
  }

  auto record = [&](int k) {
    Rng rng = eval_stream(cfg.seed, kRecord, static_cast<std::uint64_t>(k));
    cb.record(k, x, checked(cb.evaluate(x, rng), "record", k));
  };
  record(0);
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const double ak = a / std::pow(big_a + k, cfg.alpha);
    const double ck = cfg.c / std::pow(static_cast<double>(k), cfg.gamma);
    const RealVector delta = draw_delta();
    Rng plus_rng = eval_stream(cfg.seed, kProbe, 2 * static_cast<std::uint64_t>(k));
    Rng minus_rng = eval_stream(cfg.seed, kProbe, 2 * static_cast<std::uint64_t>(k) + 1);
    const double plus = checked(cb.evaluate(x + ck * delta, plus_rng), "probe", k);
    const double minus = checked(cb.evaluate(x - ck * delta, minus_rng), "probe", k);
    // Δ⁻¹ = Δ for ±1 entries.
    const RealVector gradient = ((plus - minus) / (2.0 * ck)) * delta;
    x = cb.canonical ? cb.canonical(x - ak * gradient) : RealVector(x - ak * gradient);
    if (k % cfg.record_every == 0 || k == cfg.max_iters) record(k);
  }
  return a;
}

}  // namespace

TrainingHistory spsa_train(const MeshParams& initial, const SpsaConfig& cfg, const LossFunction& loss) {
  if (!loss.evaluate) throw InputError("spsa_train: loss function missing");
  TrainingHistory history;
  history.final_params = initial;
  std::uint64_t spent = 0;
  int iteration = 0;

  SpsaCallbacks cb;
  cb.evaluate = [&](const RealVector& free, Rng& rng) {
    spent += loss.shots_per_call;
    return loss.evaluate(initial.with_free_values(free), rng);
  };
  cb.canonical = [&](const RealVector& free) { return initial.with_free_values(free).free_values(); };
  cb.record = [&](int k, const RealVector& free, double value) {
    iteration = k;
    const MeshParams params = initial.with_free_values(free);
    TrainingRecord rec;
    rec.iteration = k;
    rec.loss = value;
    if (loss.monitor) rec.exact_loss = loss.monitor(params);
    rec.method = loss.method;
    rec.shots_spent = spent;
    rec.phases = params.phases();
    history.records.push_back(std::move(rec));
    history.final_params = params;
  };

  try {
    history.gain_a = run_spsa(initial.free_values(), cfg, cb);
  } catch (const NumericalError& e) {
    history.aborted = true;
    history.diagnostic = e.what();
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError("after iteration " + std::to_string(iteration) + ": " + e.what());
  }
  return history;
}

VectorSpsaResult spsa_minimize(const RealVector& x0, const SpsaConfig& cfg,
                               const std::function<double(const RealVector&, Rng&)>& loss) {
  VectorSpsaResult result;
  result.x = x0;
  SpsaCallbacks cb;
  cb.evaluate = loss;
  cb.record = [&](int, const RealVector& x, double value) {
    result.x = x;
    result.losses.push_back(value);
  };
  run_spsa(x0, cfg, cb);
  return result;
}

}  // namespace qcbm
