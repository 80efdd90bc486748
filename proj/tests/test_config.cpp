#include "doctest.h"
#include "qcbm/config.hpp"

using namespace qcbm;

namespace {

std::vector<std::string> problems_of(const std::string& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& path) {
  return std::any_of(problems.begin(), problems.end(), [&](const std::string& p) { return p.rfind(path, 0) == 0; });
}

}  // namespace

TEST_CASE("empty document gives the defaults") {
  const auto c = parse_config(std::string("{}"));
  CHECK(c.circuit.m == 12);
  CHECK(c.circuit.n == 4);
  CHECK(c.circuit.input_occupations == std::vector<int>{1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0});
  CHECK(c.eta == 0.8);
  CHECK(c.shots_per_evaluation == 200000);
  CHECK(c.estimator == EstimatorMethod::recycled_mitigated);
  CHECK(c.train_methods.size() == 3);
  CHECK_FALSE(c.metric.has_value());
}

TEST_CASE("default input state alternates") {
  CHECK(default_input_state(12, 4).to_string() == FockState({1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0}).to_string());
  CHECK(default_input_state(2, 1).occupations == std::vector<int>{1, 0});
  CHECK(default_input_state(5, 3).occupations == std::vector<int>{1, 0, 1, 0, 1});
  CHECK_THROWS_AS(default_input_state(3, 3), InputError);
}

TEST_CASE("photon-sum mismatch names the occupations") {
  const auto p = problems_of(R"({"circuit": {"m": 4, "n": 2, "input_occupations": [1, 1, 1, 0]}})");
  CHECK(mentions(p, "circuit.input_occupations"));
}

TEST_CASE("occupation length must match the mode count") {
  const auto p = problems_of(R"({"circuit": {"m": 4, "n": 2, "input_occupations": [1, 1]}})");
  CHECK(mentions(p, "circuit.input_occupations"));
}

TEST_CASE("all problems are reported at once") {
  const auto p = problems_of(R"({"circuit": {"m": "six", "x": 1}, "noise": {"eta": 1.5}, "extra": true,
                                  "spsa": {"max_iters": 2.5}, "train": {"methods": ["lossless", "bogus"]}})");
  CHECK(mentions(p, "circuit.m"));
  CHECK(mentions(p, "circuit.x"));
  CHECK(mentions(p, "extra"));
  CHECK(mentions(p, "spsa.max_iters"));
  CHECK(mentions(p, "train.methods[1]"));
}

TEST_CASE("invariant violations carry their path") {
  const auto p = problems_of(R"({"noise": {"eta": 1.5}, "sampling": {"shots_per_evaluation": 0}})");
  CHECK(mentions(p, "noise.eta"));
  CHECK(mentions(p, "sampling.shots_per_evaluation"));
}

TEST_CASE("invalid JSON is a config error") {
  CHECK_THROWS_AS(parse_config(std::string("{")), ConfigError);
}

TEST_CASE("large preset is accepted") {
  const auto c = parse_config(std::string(
      R"({"mode": "train", "circuit": {"m": 12, "n": 4}, "noise": {"eta": 0.8},
          "sampling": {"shots_per_evaluation": 200000}})"));
  CHECK(c.mode == RunMode::train);
  CHECK(c.input_state().photon_count() == 4);
}

TEST_CASE("too many bins for training") {
  const auto p = problems_of(R"({"mode": "train", "circuit": {"m": 4, "n": 2}, "target": {"bins": 7}})");
  CHECK(mentions(p, "target.bins"));
}

TEST_CASE("resolved config round-trips") {
  auto c = parse_config(std::string(
      R"({"mode": "simulate", "circuit": {"m": 6, "n": 2, "k": 2}, "metric": "tvd", "seed": 99,
          "spsa": {"a": 0.3}, "target": {"kind": "gaussian_mixture", "bins": 10},
          "permanent_bench": {"budgets": [10, 20], "matrix_seed": 4}})"));
  const Json j = config_to_json(c);
  const auto back = parse_config(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.seed == 99);
  CHECK(back.spsa.a == 0.3);
  CHECK(back.metric == Metric::tvd);
  CHECK(back.permanent_bench.matrix_seed == 4u);
}

TEST_CASE("run modes") {
  for (auto m : {RunMode::simulate, RunMode::train, RunMode::mitigate_bench, RunMode::permanent_bench})
    CHECK(run_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(run_mode_from_string("fly"), InputError);
}
