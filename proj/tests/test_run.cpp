#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qcbm/run.hpp"

using namespace qcbm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* base = std::getenv("QCBM_TEST_TMP");
  fs::path dir = fs::path(base ? base : fs::temp_directory_path().string()) / ("run_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate on the identity circuit concentrates on the input") {
  auto c = parse_config(std::string(R"({"circuit": {"m": 5, "n": 2}, "noise": {"eta": 0.0},
                                        "sampling": {"shots_per_evaluation": 1000}})"));
  c.mode = RunMode::simulate;
  c.circuit.phases = std::vector<double>(20, 0.0);
  c.output_dir = scratch("identity").string();
  const Json summary = run(c);
  std::ifstream in(fs::path(c.output_dir) / "counts.csv");
  const auto counts = read_counts_csv(in);
  CHECK(counts.counts.size() == 1);
  CHECK(counts.count(ClickPattern::from_string("10100")) == 1000);
  CHECK(summary["estimators"]["postselect"]["tvd"].get<double>() == 0.0);
  CHECK(summary["estimators"]["recycled_mitigated"].contains("error"));
  CHECK(fs::exists(fs::path(c.output_dir) / "estimators" / "postselect.csv"));
  CHECK(summary["config"]["circuit"]["m"] == 5);
}

TEST_CASE("training writes histories, curves and a summary") {
  auto c = parse_config(std::string(R"({"mode": "train", "circuit": {"m": 5, "n": 2}, "noise": {"eta": 0.5},
                                        "sampling": {"shots_per_evaluation": 3000}, "target": {"bins": 5},
                                        "spsa": {"max_iters": 6, "record_every": 2}, "seed": 8})"));
  c.output_dir = scratch("train").string();
  const Json summary = run(c);
  for (const char* m : {"lossless", "postselect", "recycled_mitigated"}) {
    CHECK(fs::exists(fs::path(c.output_dir) / ("history." + std::string(m) + ".jsonl")));
    CHECK(fs::exists(fs::path(c.output_dir) / ("curve." + std::string(m) + ".csv")));
    CHECK(summary["methods"][m]["iterations"] == 6);
  }
  // Shared initialization.
  std::ifstream a(fs::path(c.output_dir) / "history.lossless.jsonl");
  std::ifstream b(fs::path(c.output_dir) / "history.postselect.jsonl");
  CHECK(read_history_jsonl(a).front().phases == read_history_jsonl(b).front().phases);
  CHECK(summary["metric"] == "kl");
}

TEST_CASE("training output is byte-identical across reruns and thread counts") {
  auto c = parse_config(std::string(R"({"mode": "train", "circuit": {"m": 5, "n": 2}, "noise": {"eta": 0.5},
                                        "sampling": {"shots_per_evaluation": 70000}, "target": {"bins": 5},
                                        "spsa": {"max_iters": 3}, "seed": 2,
                                        "train": {"methods": ["recycled_mitigated"]}})"));
  const fs::path first = scratch("det1");
  c.output_dir = first.string();
  run(c);
  c.output_dir = scratch("det2").string();
  c.threads = 3;
  run(c);
  for (const char* f : {"history.recycled_mitigated.jsonl", "curve.recycled_mitigated.csv"})
    CHECK(slurp(first / f) == slurp(fs::path(c.output_dir) / f));
}

TEST_CASE("mitigate-bench summarizes every eta") {
  auto c = parse_config(std::string(R"({"mode": "mitigate-bench", "circuit": {"m": 6, "n": 2},
                                        "sampling": {"shots_per_evaluation": 20000, "threads": 2},
                                        "mitigate_bench": {"seeds": 3, "etas": [0.5, 0.7]}})"));
  const auto bench = mitigate_bench(c);
  CHECK(bench.rows.size() == 6);
  CHECK(bench.summaries.size() == 2);
  CHECK(bench.summaries[0].seeds == 3);
  c.threads = 1;
  const auto serial = mitigate_bench(c);
  for (std::size_t i = 0; i < bench.rows.size(); ++i) CHECK(bench.rows[i].tvd_mit == serial.rows[i].tvd_mit);
}

TEST_CASE("permanent-bench reads a matrix file") {
  const fs::path dir = scratch("perm");
  fs::create_directories(dir);
  std::ofstream(dir / "a.json") << "[[1, [0, 1]], [0.5, 2]]";
  const ComplexMatrix a = read_matrix_json((dir / "a.json").string());
  CHECK(a(0, 1) == Complex(0, 1));
  CHECK(a(1, 0) == Complex(0.5, 0));
  std::ofstream(dir / "bad.json") << "[[1, 2], [3]]";
  CHECK_THROWS_AS(read_matrix_json((dir / "bad.json").string()), InputError);

  auto c = parse_config(std::string(R"({"permanent_bench": {"budgets": [50, 500], "repetitions": 5}})"));
  c.mode = RunMode::permanent_bench;
  c.permanent_bench.matrix_path = (dir / "a.json").string();
  c.output_dir = (dir / "out").string();
  const Json summary = run(c);
  CHECK(summary["order"] == 2);
  CHECK(fs::exists(dir / "out" / "permanent_bench.csv"));
}
