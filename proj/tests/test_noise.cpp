#include "doctest.h"
#include "oracles.hpp"
#include "qcbm/fock.hpp"
#include "qcbm/metrics.hpp"
#include "qcbm/noise.hpp"

using namespace qcbm;

namespace {

FockDistribution random_ideal(int m, const std::vector<int>& occ, std::uint64_t seed) {
  Rng rng(seed);
  return ideal_distribution(haar_unitary(m, rng), FockState(occ));
}

}  // namespace

TEST_CASE("loss model validates eta") {
  CHECK_THROWS_AS(LossModel(-0.1), InputError);
  CHECK_THROWS_AS(LossModel(1.5), InputError);
  CHECK(LossModel(0.25).survival() == 0.75);
}

TEST_CASE("threshold map clips occupations to one") {
  const auto p = threshold_map(FockState({2, 0, 1, 3}));
  CHECK(p.to_string() == "1011");
  CHECK(p.click_count() == 3);
}

TEST_CASE("no loss keeps every photon") {
  const auto ideal = random_ideal(4, {1, 0, 1, 0}, 1);
  Rng rng(2);
  const auto counts = lossy_sample(ideal, LossModel(0.0), 50000, rng);
  CHECK(counts.total_shots == 50000);
  CHECK(counts.photon_numbers == std::vector<std::uint64_t>{0, 0, 50000});
  std::uint64_t total = 0;
  for (const auto& [p, n] : counts.counts) total += n;
  CHECK(total == 50000);
  CHECK(counts.stratum_total(0) == 0);
}

TEST_CASE("total loss leaves only the empty pattern") {
  const auto ideal = random_ideal(4, {1, 1, 0, 0}, 3);
  Rng rng(4);
  const auto counts = lossy_sample(ideal, LossModel(1.0), 1000, rng);
  CHECK(counts.counts.size() == 1);
  CHECK(counts.count(ClickPattern(4, 0)) == 1000);
}

TEST_CASE("exact lossy distribution matches the per-photon oracle") {
  const std::vector<int> occ = {1, 0, 2, 0, 0};
  Rng rng(5);
  const ComplexMatrix u = haar_unitary(5, rng);
  const auto ideal = ideal_distribution(u, FockState(occ));
  for (double eta : {0.0, 0.3, 0.8}) {
    const auto exact = exact_lossy_distribution(ideal, LossModel(eta));
    const auto expected = oracle::lossy_clicks(oracle::probabilities(u, occ), eta);
    CHECK(exact.total() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < exact.size(); ++i) {
      auto it = expected.find(exact.pattern(i).bits);
      const double want = it == expected.end() ? 0.0 : it->second;
      CHECK(std::abs(exact.prob(i) - want) < 1e-12);
    }
  }
}

TEST_CASE("pre-threshold mixture has a binomial photon-number marginal") {
  const auto ideal = random_ideal(5, {1, 1, 1, 0, 0}, 6);
  const double eta = 0.4;
  const auto mix = exact_lossy_fock_distribution(ideal, LossModel(eta));
  std::vector<double> marginal(4, 0.0);
  for (std::size_t i = 0; i < mix.size(); ++i) marginal[mix.pattern(i).photon_count()] += mix.prob(i);
  for (int k = 0; k <= 3; ++k)
    CHECK(marginal[k] == doctest::Approx(binomial(3, k) * std::pow(1 - eta, k) * std::pow(eta, 3 - k)));
}

TEST_CASE("exact oracle refuses large instances") {
  const auto ideal = random_ideal(11, {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0}, 7);
  CHECK_THROWS_AS(exact_lossy_distribution(ideal, LossModel(0.5)), ResourceError);
}

TEST_CASE("sampling converges to the exact lossy distribution") {
  const auto ideal = random_ideal(4, {1, 0, 1, 1}, 8);
  const auto exact = exact_lossy_distribution(ideal, LossModel(0.5));
  Rng rng(9);
  const auto counts = lossy_sample(ideal, LossModel(0.5), 400000, rng, 3);
  RealVector emp = RealVector::Zero(static_cast<Eigen::Index>(exact.size()));
  for (const auto& [p, n] : counts.counts) emp[exact.index_of(p)] = n / 400000.0;
  CHECK(tvd(emp, exact.probs()) < 0.01);
}

TEST_CASE("sampling is independent of thread count") {
  const auto ideal = random_ideal(6, {1, 0, 1, 0, 1, 0}, 10);
  Rng a(11), b(11);
  const auto c1 = lossy_sample(ideal, LossModel(0.3), 200000, a, 1);
  const auto c5 = lossy_sample(ideal, LossModel(0.3), 200000, b, 5);
  CHECK(c1.counts == c5.counts);
  CHECK(c1.photon_numbers == c5.photon_numbers);
}

TEST_CASE("stratify restricts to one click count") {
  LossyCounts counts;
  counts.modes = 3;
  counts.photons = 2;
  counts.total_shots = 10;
  counts.counts = {{ClickPattern::from_string("110"), 4}, {ClickPattern::from_string("100"), 5},
                   {ClickPattern::from_string("000"), 1}};
  const auto s1 = stratify(counts, 1);
  CHECK(s1.total == 5);
  CHECK(s1.counts.size() == 1);
  CHECK(stratify(counts, 2).total == 4);
  CHECK(counts.stratum_total(0) == 1);
}

TEST_CASE("one-loss stratum outnumbers the no-loss stratum by n*eta/(1-eta)") {
  const auto ideal = random_ideal(8, {1, 0, 1, 0, 1, 0, 0, 0}, 12);
  const double eta = 0.7;
  const std::uint64_t shots = 400000;
  Rng rng(13);
  const auto counts = lossy_sample(ideal, LossModel(eta), shots, rng);
  const double p3 = std::pow(1 - eta, 3), p2 = 3 * eta * std::pow(1 - eta, 2);
  const double n3 = static_cast<double>(counts.photon_numbers[3]);
  const double n2 = static_cast<double>(counts.photon_numbers[2]);
  CHECK(std::abs(n3 - shots * p3) <= 5 * std::sqrt(shots * p3 * (1 - p3)));
  CHECK(std::abs(n2 - shots * p2) <= 5 * std::sqrt(shots * p2 * (1 - p2)));
  // Ratio via the delta method; multinomial counts are negatively correlated.
  const double ratio = n2 / n3;
  const double sd = (p2 / p3) * std::sqrt((1 - p2) / (shots * p2) + (1 - p3) / (shots * p3) + 2.0 / shots);
  CHECK(std::abs(ratio - 3 * eta / (1 - eta)) <= 5 * sd);
}
