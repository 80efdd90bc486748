#pragma once

#include <Eigen/Core>
#include <cmath>

#include "qcbm/errors.hpp"

namespace qcbm {

/// Smoothing added to model probabilities inside the KL logarithm.
inline constexpr double kKlSmoothing = 1e-12;

/// KL(p‖q) = Σ_{p(x)>0} p(x) ln(p(x) / (q(x) + smoothing)). Natural log.
template <typename DerivedP, typename DerivedQ>
double kl_divergence(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q,
                     double smoothing = kKlSmoothing) {
  if (p.size() != q.size()) throw InputError("kl_divergence: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = static_cast<double>(p(i));
    if (pi > 0.0) total += pi * std::log(pi / (static_cast<double>(q(i)) + smoothing));
  }
  return total;
}

/// ½ Σ |p(x) − q(x)|.
template <typename DerivedP, typename DerivedQ>
double tvd(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  if (p.size() != q.size()) throw InputError("tvd: length mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace qcbm
