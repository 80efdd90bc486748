#include <limits>
#include <sstream>

#include "doctest.h"
#include "qcbm/fock.hpp"
#include "qcbm/io.hpp"

using namespace qcbm;

TEST_CASE("doubles round-trip through text") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(parse_double(format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
  CHECK_THROWS_AS(parse_double("1.5x"), InputError);
}

TEST_CASE("counts round-trip") {
  Rng rng(2);
  const auto ideal = ideal_distribution(haar_unitary(5, rng), FockState({1, 0, 1, 0, 1}));
  auto counts = lossy_sample(ideal, LossModel(0.4), 5000, rng);
  counts.seed = 17;
  std::stringstream ss;
  write_counts_csv(ss, counts);
  const auto back = read_counts_csv(ss);
  CHECK(back.modes == counts.modes);
  CHECK(back.photons == counts.photons);
  CHECK(back.total_shots == counts.total_shots);
  CHECK(back.eta == counts.eta);
  CHECK(back.seed == counts.seed);
  CHECK(back.counts == counts.counts);
  CHECK(back.photon_numbers == counts.photon_numbers);
}

TEST_CASE("estimator tables round-trip") {
  Rng rng(3);
  auto est = ideal_reference(ideal_distribution(haar_unitary(5, rng), FockState({1, 0, 1, 0, 0})));
  est.shots_used = 123;
  est.iterations = 2;
  std::stringstream ss;
  write_estimator_csv(ss, est);
  const auto back = read_estimator_csv(ss);
  CHECK(back.method == est.method);
  CHECK(back.shots_used == 123);
  CHECK(back.iterations == 2);
  CHECK(back.table.space() == est.table.space());
  CHECK(back.table.probs() == est.table.probs());
}

TEST_CASE("malformed tables are rejected") {
  std::istringstream no_header("pattern,count\n01,3\n");
  CHECK_THROWS_AS(read_counts_csv(no_header), InputError);
  std::istringstream bad_row("# {\"modes\":2,\"photons\":1,\"shots\":3,\"eta\":0.1,\"seed\":null}\npattern,count\n01\n");
  CHECK_THROWS_AS(read_counts_csv(bad_row), InputError);
}

TEST_CASE("mesh parameters round-trip") {
  Rng rng(4);
  const auto p = MeshParams::random(4, 2, rng, true, false);
  const auto back = mesh_params_from_json(mesh_params_to_json(p));
  CHECK(back.modes() == 4);
  CHECK(back.blocks() == 2);
  CHECK(back.single_phase_mode());
  CHECK(back.phases() == p.phases());
}

TEST_CASE("histories round-trip") {
  TrainingHistory h;
  for (int i = 0; i < 3; ++i) {
    TrainingRecord r;
    r.iteration = i * 5;
    r.loss = 1.0 / (i + 3);
    if (i) r.exact_loss = 0.1 * i;
    r.method = "postselect";
    r.shots_spent = 1000u * i;
    r.phases = RealVector::LinSpaced(4, 0.1 * i, 1.0 + i);
    h.records.push_back(r);
  }
  std::stringstream ss;
  write_history_jsonl(ss, h);
  const auto back = read_history_jsonl(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].iteration == h.records[i].iteration);
    CHECK(back[i].loss == h.records[i].loss);
    CHECK(back[i].exact_loss == h.records[i].exact_loss);
    CHECK(back[i].shots_spent == h.records[i].shots_spent);
    CHECK(back[i].phases == h.records[i].phases);
  }
  std::ostringstream curve;
  write_curve_csv(curve, h);
  CHECK(curve.str().rfind("iteration,loss\n0,", 0) == 0);
}
