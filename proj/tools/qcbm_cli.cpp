// Command-line entry point: qcbm <mode> --config <path> [--seed N] [--out <dir>]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qcbm/run.hpp"

namespace {

enum class Verbosity { quiet, info, debug };

Verbosity verbosity_from_env() {
  const char* v = std::getenv("QCBM_LOG");
  if (!v) return Verbosity::info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return Verbosity::quiet;
  if (s == "debug" || s == "2") return Verbosity::debug;
  return Verbosity::info;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qcbm::InputError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PermanentFlags {
  std::string matrix;
  std::optional<int> size;
  std::optional<std::uint64_t> matrix_seed;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::vector<std::uint64_t> budgets;
  std::optional<int> repetitions;
  std::string csv;
};

void print_brief(const qcbm::Json& summary) {
  const std::string mode = summary.value("mode", "");
  if (mode == "train") {
    for (const auto& [name, entry] : summary["methods"].items())
      std::cerr << "  " << name << ": final loss " << entry.value("final_loss", 0.0)
                << (entry.value("aborted", false) ? " (aborted)" : "") << "\n";
  } else if (mode == "mitigate-bench") {
    for (const auto& r : summary["results"])
      std::cerr << "  eta=" << r["eta"].get<double>() << ": median TVD post " << r["median_tvd_post"].get<double>()
                << ", mitigated " << r["median_tvd_mit"].get<double>() << ", wins "
                << r["win_fraction"].get<double>() << "\n";
  } else if (mode == "permanent-bench") {
    std::cerr << "  slopes: gurvits " << summary["gurvits_slope"].get<double>() << ", sampler "
              << summary["sampler_slope"].get<double>() << "\n";
  } else if (mode == "simulate") {
    for (const auto& [name, entry] : summary["estimators"].items())
      if (entry.contains("tvd")) std::cerr << "  " << name << ": TVD " << entry["tvd"].get<double>() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photonic Born machine simulator with loss mitigation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  PermanentFlags pf;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config,-c", config_path, "JSON run configuration");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out,-o", out_dir, "override the output directory");
  };
  add_common(app.add_subcommand("simulate", "sample a lossy circuit and write estimator tables"), true);
  add_common(app.add_subcommand("train", "train lossless / post-selected / mitigated models"), true);
  add_common(app.add_subcommand("mitigate-bench", "compare post-selection and mitigation on Haar circuits"), true);
  auto* perm = app.add_subcommand("permanent-bench", "additive-error permanent estimators vs. budget");
  add_common(perm, false);
  perm->add_option("--matrix", pf.matrix, "JSON matrix file (rows of numbers or [re, im] pairs)");
  perm->add_option("--size", pf.size, "order of a random Gaussian matrix");
  perm->add_option("--matrix-seed", pf.matrix_seed, "seed for the random matrix");
  perm->add_option("--epsilon", pf.epsilon, "target additive error");
  perm->add_option("--delta", pf.delta, "failure probability");
  perm->add_option("--budgets", pf.budgets, "sample budgets")->delimiter(',');
  perm->add_option("--repetitions", pf.repetitions, "runs per budget");
  perm->add_option("--csv", pf.csv, "output CSV (relative to the output directory)");

  CLI11_PARSE(app, argc, argv);
  const Verbosity verbosity = verbosity_from_env();
  const std::string mode_name = app.get_subcommands().front()->get_name();

  try {
    qcbm::RunConfig config = config_path.empty() ? qcbm::parse_config(std::string("{}"))
                                                 : qcbm::parse_config(read_file(config_path));
    config.mode = qcbm::run_mode_from_string(mode_name);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output_dir = out_dir;
    auto& pb = config.permanent_bench;
    if (!pf.matrix.empty()) pb.matrix_path = pf.matrix;
    if (pf.size) pb.size = *pf.size;
    if (pf.matrix_seed) pb.matrix_seed = pf.matrix_seed;
    if (pf.epsilon) pb.epsilon = *pf.epsilon;
    if (pf.delta) pb.delta = *pf.delta;
    if (!pf.budgets.empty()) pb.budgets = pf.budgets;
    if (pf.repetitions) pb.repetitions = *pf.repetitions;
    if (!pf.csv.empty()) pb.csv = pf.csv;
    qcbm::validate_config(config);

    if (verbosity == Verbosity::debug) std::cerr << qcbm::config_to_json(config).dump(2) << "\n";
    if (verbosity != Verbosity::quiet)
      std::cerr << "qcbm " << mode_name << ": writing to " << config.output_dir << "\n";
    const qcbm::Json summary = qcbm::run(config);
    if (verbosity != Verbosity::quiet) print_brief(summary);
    return 0;
  } catch (const qcbm::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return 2;
  } catch (const qcbm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const qcbm::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const qcbm::InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return 4;
  } catch (const qcbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
