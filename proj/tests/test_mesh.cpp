#include "doctest.h"
#include "qcbm/fock.hpp"
#include "qcbm/mesh.hpp"

using namespace qcbm;

TEST_CASE("phases wrap into [0, 2pi)") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(2 * M_PI) == doctest::Approx(0.0));
  CHECK(wrap_phase(-0.5) == doctest::Approx(2 * M_PI - 0.5));
  CHECK(wrap_phase(7 * M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("T matrix has the documented form") {
  const double t = 0.3, tp = 1.1;
  const ComplexMatrix T = t_matrix(2, MzElement(0, t, tp));
  const Complex e = std::polar(1.0, t);
  CHECK(std::abs(T(0, 0) - e * std::cos(tp / 2)) < 1e-14);
  CHECK(std::abs(T(0, 1) + std::sin(tp / 2)) < 1e-14);
  CHECK(std::abs(T(1, 0) - e * std::sin(tp / 2)) < 1e-14);
  CHECK(std::abs(T(1, 1) - std::cos(tp / 2)) < 1e-14);
}

TEST_CASE("rectangular layout covers every element once") {
  for (int m = 2; m <= 9; ++m) {
    const auto slots = clements_layout(m);
    CHECK(slots.size() == static_cast<std::size_t>(m * (m - 1) / 2));
    for (const auto& s : slots) {
      CHECK(s.top_mode % 2 == s.column % 2);
      CHECK(s.top_mode + 1 < m);
      CHECK(s.column < m);
    }
  }
  const auto four = clements_layout(4);
  CHECK(four[0] == MeshSlot{0, 0});
  CHECK(four[1] == MeshSlot{0, 2});
  CHECK(four[2] == MeshSlot{1, 1});
}

TEST_CASE("compose yields unitaries") {
  Rng rng(1);
  for (int m = 2; m <= 8; ++m) {
    const auto p = MeshParams::random(m, 2, rng);
    CHECK(unitarity_residual(compose(p)) < 1e-12);
  }
}

TEST_CASE("zero phases give the identity") {
  CHECK((compose(MeshParams::zeros(5)) - ComplexMatrix::Identity(5, 5)).norm() < 1e-14);
}

TEST_CASE("two-mode mesh is a single T") {
  RealVector ph(2);
  ph << 0.4, 2.0;
  CHECK((compose(MeshParams(2, 1, ph)) - t_matrix(2, MzElement(0, 0.4, 2.0))).norm() < 1e-14);
}

TEST_CASE("first slot acts first") {
  // Three modes: slots (col 0, top 0), (col 1, top 1), (col 2, top 0).
  Rng rng(3);
  const auto p = MeshParams::random(3, 1, rng);
  const auto slots = clements_layout(3);
  ComplexMatrix u = ComplexMatrix::Identity(3, 3);
  for (std::size_t e = 0; e < slots.size(); ++e)
    u = t_matrix(3, MzElement(slots[e].top_mode, p.phases()[2 * e], p.phases()[2 * e + 1])) * u;
  CHECK((compose(p) - u).norm() < 1e-13);
}

TEST_CASE("blocks multiply in order") {
  Rng rng(4);
  const auto p = MeshParams::random(4, 2, rng);
  const MeshParams b0(4, 1, p.block(0));
  const MeshParams b1(4, 1, p.block(1));
  CHECK((compose(p) - compose(b1) * compose(b0)).norm() < 1e-13);
}

TEST_CASE("single-phase mode pins the external phases") {
  Rng rng(5);
  const auto p = MeshParams::random(4, 1, rng, true);
  for (Eigen::Index e = 0; e < p.phases().size(); e += 2) CHECK(p.phases()[e] == 0.0);
  CHECK(p.free_indices().size() == 6);
  RealVector v = RealVector::Constant(6, 1.0);
  const auto q = p.with_free_values(v);
  CHECK(q.phases()[0] == 0.0);
  CHECK(q.phases()[1] == 1.0);
}

TEST_CASE("tied blocks share one set of phases") {
  Rng rng(6);
  const auto p = MeshParams::random(3, 3, rng, false, true);
  CHECK(p.free_indices().size() == 6);
  CHECK((p.block(0) - p.block(2)).norm() == 0.0);
  const auto q = p.with_free_values(RealVector::Constant(6, 0.25));
  CHECK((q.block(1).array() == 0.25).all());
}

TEST_CASE("parameter vectors of the wrong length are rejected") {
  CHECK_THROWS_AS(MeshParams(3, 1, RealVector::Zero(5)), InputError);
}
