#include "qcbm/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "qcbm/fock.hpp"
#include "qcbm/metrics.hpp"
#include "qcbm/parallel.hpp"
#include "qcbm/permanent.hpp"

namespace qcbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return dir.empty() ? name : dir + "/" + name;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json summary_header(const RunConfig& config) {
  return {{"version", kVersion}, {"mode", to_string(*config.mode)}, {"seed", config.seed},
          {"config", config_to_json(config)}};
}

// --- simulate --------------------------------------------------------------

Json run_simulate(const RunConfig& config) {
  const auto t0 = Clock::now();
  const MeshParams params = initial_params(config);
  const FockState input = config.input_state();
  const ComplexMatrix u = compose(params);
  const FockDistribution ideal = ideal_distribution(u, input);

  Rng rng(derive_seed(config.seed, streams::sample));
  LossyCounts counts = lossy_sample(ideal, LossModel(config.eta), config.shots_per_evaluation, rng, config.threads);
  counts.seed = config.seed;
  {
    std::ostringstream out;
    write_counts_csv(out, counts);
    write_text_file(join_path(config.output_dir, "counts.csv"), out.str());
  }

  Json summary = summary_header(config);
  Json estimators = Json::object();
  std::optional<EstimatorOutput> reference;
  try {
    reference = ideal_reference(ideal);
  } catch (const DegenerateInputError& e) {
    summary["reference_error"] = e.what();
  }

  auto emit = [&](EstimatorMethod method, auto&& build) {
    Json entry;
    try {
      const EstimatorOutput est = build();
      std::ostringstream out;
      write_estimator_csv(out, est);
      write_text_file(join_path(config.output_dir, "estimators/" + to_string(method) + ".csv"), out.str());
      entry["shots_used"] = est.shots_used;
      entry["converged"] = est.converged;
      entry["iterations"] = est.iterations;
      if (reference) {
        const ErrorReport err = estimator_errors(est, *reference);
        entry["tvd"] = err.tvd;
        entry["kl"] = err.kl;
        entry["max_abs"] = err.max_abs;
      }
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    estimators[to_string(method)] = entry;
  };

  if (reference) emit(EstimatorMethod::lossless, [&] { return *reference; });
  emit(EstimatorMethod::postselect, [&] { return postselect(counts, input.photon_count()); });
  emit(EstimatorMethod::recycled_raw, [&] { return recycled_raw(recycle(counts, input.photon_count())); });
  emit(EstimatorMethod::recycled_mitigated,
       [&] { return mitigate(recycle(counts, input.photon_count()), config.mitigation); });

  std::uint64_t zero_clicks = counts.stratum_total(0);
  summary["shots"] = counts.total_shots;
  summary["n_click_shots"] = counts.stratum_total(input.photon_count());
  summary["n_minus_one_click_shots"] = input.photon_count() > 0 ? counts.stratum_total(input.photon_count() - 1) : 0;
  summary["zero_click_shots"] = zero_clicks;
  summary["estimators"] = estimators;
  summary["timing"] = {{"seconds", seconds_since(t0)}};
  return summary;
}

// --- train -----------------------------------------------------------------

Json run_train(const RunConfig& config) {
  const auto t0 = Clock::now();
  const TrainResult result = train_all(config);
  Json summary = summary_header(config);
  summary["metric"] = to_string(result.metric);
  summary["target"] = target_to_json(result.target);
  summary["initial_params"] = mesh_params_to_json(result.initial);
  Json methods = Json::object();
  Json timing = Json::object();
  for (const auto& m : result.methods) {
    const std::string name = to_string(m.method);
    {
      std::ostringstream out;
      write_history_jsonl(out, m.history);
      write_text_file(join_path(config.output_dir, "history." + name + ".jsonl"), out.str());
    }
    {
      std::ostringstream out;
      write_curve_csv(out, m.history);
      write_text_file(join_path(config.output_dir, "curve." + name + ".csv"), out.str());
    }
    Json entry = {{"aborted", m.history.aborted}, {"gain_a", m.history.gain_a}};
    if (!m.history.diagnostic.empty()) entry["diagnostic"] = m.history.diagnostic;
    if (!m.history.records.empty()) {
      const auto& first = m.history.records.front();
      const auto& last = m.history.records.back();
      entry["initial_loss"] = first.loss;
      entry["final_loss"] = last.loss;
      entry["initial_exact_loss"] = optional_json(first.exact_loss);
      entry["final_exact_loss"] = optional_json(last.exact_loss);
      entry["iterations"] = last.iteration;
      entry["shots_spent"] = last.shots_spent;
    }
    entry["final_params"] = mesh_params_to_json(m.history.final_params);
    methods[name] = entry;
    timing[name] = m.seconds;
  }
  timing["total"] = seconds_since(t0);
  summary["methods"] = methods;
  summary["timing"] = timing;
  return summary;
}

// --- mitigate-bench --------------------------------------------------------

Json run_mitigate_bench(const RunConfig& config) {
  const auto t0 = Clock::now();
  const BenchResult bench = mitigate_bench(config);
  std::ostringstream csv;
  csv << "eta,seed_index,seed,tvd_post,tvd_mit,tvd_raw,shots_post,shots_recycled\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : bench.rows)
    csv << format_double(r.eta) << ',' << r.seed_index << ',' << r.seed << ',' << cell(r.tvd_post) << ','
        << cell(r.tvd_mit) << ',' << cell(r.tvd_raw) << ',' << r.shots_post << ',' << r.shots_recycled << '\n';
  write_text_file(join_path(config.output_dir, "mitigate_bench.csv"), csv.str());

  Json summary = summary_header(config);
  Json per_eta = Json::array();
  for (const auto& s : bench.summaries)
    per_eta.push_back({{"eta", s.eta},
                       {"seeds", s.seeds},
                       {"median_tvd_post", s.median_tvd_post},
                       {"median_tvd_mit", s.median_tvd_mit},
                       {"win_fraction", s.win_fraction},
                       {"median_improvement", s.median_improvement},
                       {"mitigation_wins_median", s.median_tvd_mit < s.median_tvd_post}});
  summary["results"] = per_eta;
  summary["timing"] = {{"seconds", seconds_since(t0)}};
  return summary;
}

// --- permanent-bench -------------------------------------------------------

Json run_permanent_bench(const RunConfig& config) {
  const auto t0 = Clock::now();
  const ComparisonReport report = permanent_bench(config);
  const std::string csv_path = join_path(config.output_dir, config.permanent_bench.csv);
  write_text_file(csv_path, comparison_csv(report));

  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"budget", r.budget},
                    {"gurvits_mean_error", r.gurvits_mean_error},
                    {"gurvits_bound", r.gurvits_bound},
                    {"sampler_mean_error", r.sampler_mean_error},
                    {"sampler_bound", r.sampler_bound}});
  const auto& pb = config.permanent_bench;
  Json summary = summary_header(config);
  summary["order"] = report.order;
  summary["exact_squared"] = report.exact_squared;
  summary["spectral_norm"] = report.norm;
  summary["encoded_probability"] = report.encoded_probability;
  summary["gurvits_slope"] = report.gurvits_slope;
  summary["sampler_slope"] = report.sampler_slope;
  summary["gurvits_samples_for_epsilon"] = gurvits_sample_count(pb.epsilon, pb.delta);
  summary["rows"] = rows;
  summary["csv"] = csv_path;
  summary["timing"] = {{"seconds", seconds_since(t0)}};
  return summary;
}

}  // namespace

TargetDistribution build_target(const TargetConfig& config) {
  if (config.kind == TargetKind::csv)
    return csv_returns_target(config.path, config.bins, config.clip_lo, config.clip_hi);
  GaussianMixtureParams g = config.gaussian;
  g.bins = config.bins;
  return gaussian_mixture_target(g);
}

MeshParams initial_params(const RunConfig& config) {
  const auto& c = config.circuit;
  if (c.phases) {
    const RealVector phases = Eigen::Map<const RealVector>(c.phases->data(), static_cast<Eigen::Index>(c.phases->size()));
    return MeshParams(c.m, c.k, phases, c.single_phase_mode, c.tied_blocks);
  }
  Rng rng(derive_seed(config.seed, streams::init));
  return MeshParams::random(c.m, c.k, rng, c.single_phase_mode, c.tied_blocks);
}

TrainResult train_all(const RunConfig& config) {
  TrainResult result;
  result.target = build_target(config.target);
  result.metric = config.metric.value_or(suggest_metric(result.target));
  result.initial = initial_params(config);
  const FockState input = config.input_state();
  const BinMap map = build_bin_map(config.circuit.m, config.circuit.n, config.target.bins);

  SpsaConfig spsa = config.spsa;
  spsa.seed = derive_seed(config.seed, streams::spsa);
  for (EstimatorMethod method : config.train_methods) {
    const auto t0 = Clock::now();
    LossPipeline pipeline{input, LossModel(config.eta), config.shots_per_evaluation, method, config.mitigation,
                          config.threads};
    LossFunction loss;
    loss.method = to_string(method);
    loss.shots_per_call = method == EstimatorMethod::lossless ? 0 : config.shots_per_evaluation;
    loss.evaluate = [&](const MeshParams& p, Rng& rng) {
      return evaluate_loss(p, pipeline, result.target, map, result.metric, rng);
    };
    loss.monitor = [&](const MeshParams& p) { return exact_loss(p, input, result.target, map, result.metric); };
    MethodResult mr;
    mr.method = method;
    mr.history = spsa_train(result.initial, spsa, loss);
    mr.seconds = seconds_since(t0);
    result.methods.push_back(std::move(mr));
  }
  return result;
}

BenchResult mitigate_bench(const RunConfig& config) {
  const int m = config.circuit.m;
  const FockState input = config.input_state();
  const int n = input.photon_count();
  std::vector<double> etas = config.mitigate_bench.etas;
  if (etas.empty()) etas.push_back(config.eta);
  const int seeds = config.mitigate_bench.seeds;

  BenchResult result;
  result.rows.resize(etas.size() * static_cast<std::size_t>(seeds));
  // Each (η, seed) job owns its stream; the Haar circuit depends on the seed
  // index only, so every η sees the same circuits.
  parallel_for_each(result.rows.size(), config.threads, [&](std::size_t job) {
    const std::size_t e = job / static_cast<std::size_t>(seeds);
    const int s = static_cast<int>(job % static_cast<std::size_t>(seeds));
    BenchRow row;
    row.eta = etas[e];
    row.seed_index = s;
    row.seed = derive_seed(derive_seed(config.seed, streams::bench), static_cast<std::uint64_t>(s));
    Rng circuit_rng(row.seed);
    const ComplexMatrix u = haar_unitary(m, circuit_rng);
    const FockDistribution ideal = ideal_distribution(u, input);
    const EstimatorOutput reference = ideal_reference(ideal);
    Rng shot_rng(derive_seed(row.seed, static_cast<std::uint64_t>(e) + 1));
    const LossyCounts counts = lossy_sample(ideal, LossModel(row.eta), config.shots_per_evaluation, shot_rng, 1);
    try {
      const EstimatorOutput post = postselect(counts, n);
      row.tvd_post = tvd(post.table.probs(), reference.table.probs());
      row.shots_post = post.shots_used;
    } catch (const InsufficientDataError&) {
    }
    try {
      const RecycledDecomposition decomp = recycle(counts, n);
      row.shots_recycled = decomp.shots_used;
      row.tvd_raw = tvd(recycled_raw(decomp).table.probs(), reference.table.probs());
      row.tvd_mit = tvd(mitigate(decomp, config.mitigation).table.probs(), reference.table.probs());
    } catch (const InsufficientDataError&) {
    }
    result.rows[job] = row;
  });

  for (std::size_t e = 0; e < etas.size(); ++e) {
    BenchSummary s;
    s.eta = etas[e];
    std::vector<double> post, mit, improvement;
    int wins = 0;
    for (const auto& r : result.rows) {
      if (r.eta != etas[e] || !r.tvd_post || !r.tvd_mit) continue;
      ++s.seeds;
      post.push_back(*r.tvd_post);
      mit.push_back(*r.tvd_mit);
      if (*r.tvd_mit < *r.tvd_post) ++wins;
      improvement.push_back(*r.tvd_post > 0.0 ? 1.0 - *r.tvd_mit / *r.tvd_post : 0.0);
    }
    s.median_tvd_post = median(post);
    s.median_tvd_mit = median(mit);
    s.win_fraction = s.seeds ? static_cast<double>(wins) / s.seeds : 0.0;
    s.median_improvement = median(improvement);
    result.summaries.push_back(s);
  }
  return result;
}

ComplexMatrix read_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("matrix file '" + path + "': " + e.what());
  }
  if (!doc.is_array() || doc.empty()) throw InputError("matrix file '" + path + "': expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(doc.size());
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = doc[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw InputError("matrix file '" + path + "': row " + std::to_string(i) + " must have " + std::to_string(n) +
                       " entries");
    for (Eigen::Index j = 0; j < n; ++j) {
      const Json& v = row[static_cast<std::size_t>(j)];
      if (v.is_number()) {
        a(i, j) = Complex(v.get<double>(), 0.0);
      } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        a(i, j) = Complex(v[0].get<double>(), v[1].get<double>());
      } else {
        throw InputError("matrix file '" + path + "': entry (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") must be a number or [re, im]");
      }
    }
  }
  return a;
}

ComparisonReport permanent_bench(const RunConfig& config) {
  const auto& pb = config.permanent_bench;
  ComplexMatrix a;
  if (!pb.matrix_path.empty()) {
    a = read_matrix_json(pb.matrix_path);
  } else {
    Rng matrix_rng(pb.matrix_seed.value_or(derive_seed(config.seed, streams::matrix)));
    a = random_gaussian_matrix(pb.size, matrix_rng);
  }
  ComparisonConfig cc;
  cc.budgets = pb.budgets;
  cc.repetitions = pb.repetitions;
  cc.delta = pb.delta;
  Rng rng(derive_seed(config.seed, streams::sample));
  return theorem_comparison(a, cc, rng);
}

Json run(const RunConfig& config) {
  if (!config.mode) throw InputError("run: no mode given");
  Json summary;
  switch (*config.mode) {
    case RunMode::simulate: summary = run_simulate(config); break;
    case RunMode::train: summary = run_train(config); break;
    case RunMode::mitigate_bench: summary = run_mitigate_bench(config); break;
    case RunMode::permanent_bench: summary = run_permanent_bench(config); break;
  }
  write_text_file(join_path(config.output_dir, "summary.json"), summary.dump(2) + "\n");
  return summary;
}

}  // namespace qcbm
