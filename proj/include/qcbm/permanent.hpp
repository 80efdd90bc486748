#pragma once

#include <Eigen/Core>
#include <bit>
#include <cstdint>
#include <string>

#include "qcbm/errors.hpp"

namespace qcbm {

/// Largest matrix order `permanent` accepts. Cost is 2^(n-1)·n.
inline constexpr int kPermanentMaxOrder = 30;

/// Permanent of a square matrix via Glynn's formula, visiting the 2^(n-1)
/// sign vectors in Gray-code order so each step updates the column sums in
/// O(n). The 0×0 permanent is 1.
template <typename Derived>
typename Derived::Scalar permanent(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols())
    throw InputError("permanent: matrix is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", expected square");
  const Eigen::Index n = a.rows();
  if (n > kPermanentMaxOrder)
    throw ResourceError("permanent: order " + std::to_string(n) + " exceeds cap " +
                        std::to_string(kPermanentMaxOrder));
  if (n == 0) return Scalar(1);
  if (n == 1) return a(0, 0);

  // Column sums with every row sign +1.
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> sums = a.colwise().sum();
  Scalar total = sums.prod();
  // Row 0 keeps sign +1; rows 1..n-1 are flipped by the Gray code.
  std::uint64_t signs = 0;
  bool negative = false;
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 1; k < steps; ++k) {
    const int flip = std::countr_zero(k);
    const Eigen::Index row = flip + 1;
    const std::uint64_t bit = std::uint64_t{1} << flip;
    signs ^= bit;
    if (signs & bit)
      sums -= Scalar(2) * a.row(row);
    else
      sums += Scalar(2) * a.row(row);
    negative = !negative;
    const Scalar term = sums.prod();
    total += negative ? -term : term;
  }
  return total / static_cast<typename Eigen::NumTraits<Scalar>::Real>(steps);
}

}  // namespace qcbm
