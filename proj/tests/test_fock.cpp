#include "doctest.h"
#include "oracles.hpp"
#include "qcbm/fock.hpp"
#include "qcbm/mesh.hpp"
#include "qcbm/permanent.hpp"

using namespace qcbm;

TEST_CASE("fock space sizes match stars and bars") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(3, 5) == 0);
  CHECK(fock_space_size(4, 3) == 20);
  CHECK(fock_space_size(12, 4) == 1365);
  const auto states = enumerate_fock(4, 3);
  REQUIRE(states.size() == 20);
  CHECK(std::is_sorted(states.begin(), states.end()));
  CHECK(states.front().occupations == std::vector<int>{0, 0, 0, 3});
  CHECK(states.back().occupations == std::vector<int>{3, 0, 0, 0});
  for (const auto& s : states) CHECK(s.photon_count() == 3);
}

TEST_CASE("enumeration respects the resource cap") {
  CHECK_THROWS_AS(enumerate_fock(40, 10, 1000), ResourceError);
}

TEST_CASE("permanent matches the permutation sum") {
  Rng rng(11);
  for (int n = 1; n <= 6; ++n) {
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    const Complex expected = oracle::permanent(a);
    CHECK(std::abs(permanent(a) - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("permanent special cases") {
  CHECK(permanent(ComplexMatrix(0, 0)) == Complex(1.0, 0.0));
  CHECK(std::abs(permanent(ComplexMatrix::Identity(5, 5)) - 1.0) < 1e-12);
  CHECK(std::abs(permanent(ComplexMatrix::Ones(5, 5)) - 120.0) < 1e-9);
  Eigen::MatrixXd real(2, 2);
  real << 1, 2, 3, 4;
  CHECK(permanent(real) == doctest::Approx(10.0));
  CHECK_THROWS_AS(permanent(ComplexMatrix::Ones(2, 3)), InputError);
  CHECK_THROWS_AS(permanent(ComplexMatrix::Ones(31, 31)), ResourceError);
}

TEST_CASE("ideal distribution agrees with the polynomial-expansion oracle") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + trial % 4;
    const int n = 1 + trial % 3;
    const ComplexMatrix u = haar_unitary(m, rng);
    std::vector<int> occ(static_cast<std::size_t>(m), 0);
    for (int k = 0; k < n; ++k) ++occ[static_cast<std::size_t>(k % m)];
    const auto dist = ideal_distribution(u, FockState(occ));
    const auto expected = oracle::probabilities(u, occ);
    REQUIRE(dist.size() == expected.size());
    for (std::size_t i = 0; i < dist.size(); ++i)
      CHECK(std::abs(dist.prob(i) - expected.at(dist.pattern(i).occupations)) < 1e-10);
    CHECK(dist.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Hong-Ou-Mandel dip on a balanced beam splitter") {
  ComplexMatrix bs(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  bs << r, -r, r, r;
  const auto dist = ideal_distribution(bs, FockState({1, 1}));
  CHECK(dist(FockState({1, 1})) == doctest::Approx(0.0));
  CHECK(dist(FockState({2, 0})) == doctest::Approx(0.5));
  CHECK(dist(FockState({0, 2})) == doctest::Approx(0.5));
}

TEST_CASE("identity interferometer leaves the input unchanged") {
  const auto dist = ideal_distribution(ComplexMatrix::Identity(4, 4), FockState({1, 0, 2, 0}));
  CHECK(dist(FockState({1, 0, 2, 0})) == doctest::Approx(1.0));
}

TEST_CASE("non-unitary input is rejected") {
  ComplexMatrix a = ComplexMatrix::Identity(3, 3);
  a(0, 0) = 0.5;
  CHECK_THROWS_AS(ideal_distribution(a, FockState({1, 0, 0})), InputError);
  CHECK(unitarity_residual(a) > 0.1);
}

TEST_CASE("transition submatrix rejects photon-number mismatch") {
  CHECK_THROWS_AS(transition_submatrix(ComplexMatrix::Identity(3, 3), FockState({1, 0, 0}), FockState({1, 1, 0})),
                  InputError);
}

TEST_CASE("haar unitaries are unitary and seed-determined") {
  Rng a(5), b(5);
  const ComplexMatrix u = haar_unitary(6, a);
  CHECK(unitarity_residual(u) < 1e-12);
  CHECK((u - haar_unitary(6, b)).norm() == 0.0);
}

TEST_CASE("categorical sampling is independent of thread count") {
  Rng rng(6);
  const auto dist = ideal_distribution(haar_unitary(4, rng), FockState({1, 1, 0, 0}));
  Rng r1(9), r4(9);
  const auto c1 = sample_categorical(dist, 300000, r1, 1);
  const auto c4 = sample_categorical(dist, 300000, r4, 4);
  CHECK(c1 == c4);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    total += c1[i];
    const double p = dist.prob(i);
    CHECK(std::abs(c1[i] / 3e5 - p) <= 5 * std::sqrt(p * (1 - p) / 3e5) + 1e-12);
  }
  CHECK(total == 300000);
}
