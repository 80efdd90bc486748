#include "qcbm/fock.hpp"

#include <cmath>
#include <limits>

namespace qcbm {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t fock_space_size(int modes, int photons) {
  if (modes < 1 || photons < 0) throw InputError("fock_space_size: need m >= 1 and n >= 0");
  return binomial(static_cast<std::uint64_t>(photons + modes - 1), static_cast<std::uint64_t>(photons));
}

namespace {

void fill_states(int mode, int remaining, std::vector<int>& current, std::vector<FockState>& out) {
  const int m = static_cast<int>(current.size());
  if (mode == m - 1) {
    current[static_cast<std::size_t>(mode)] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[static_cast<std::size_t>(mode)] = k;
    fill_states(mode + 1, remaining - k, current, out);
  }
}

}  // namespace

std::vector<FockState> enumerate_fock(int modes, int photons, std::uint64_t cap) {
  const std::uint64_t size = fock_space_size(modes, photons);
  if (size > cap)
    throw ResourceError("enumerate_fock: " + std::to_string(size) + " states for m=" + std::to_string(modes) +
                        ", n=" + std::to_string(photons) + " exceeds cap " + std::to_string(cap));
  std::vector<FockState> out;
  out.reserve(size);
  std::vector<int> current(static_cast<std::size_t>(modes), 0);
  fill_states(0, photons, current, out);
  return out;
}

double unitarity_residual(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const ComplexMatrix gram = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return gram.cwiseAbs().maxCoeff();
}

void require_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) throw InputError("interferometer matrix must be square");
  const double residual = unitarity_residual(u);
  if (!(residual < tol))
    throw InputError("interferometer matrix is not unitary (residual " + std::to_string(residual) + ")");
}

ComplexMatrix transition_submatrix(const ComplexMatrix& u, const FockState& input, const FockState& output) {
  if (input.modes() != u.cols() || output.modes() != u.rows())
    throw InputError("transition_submatrix: state length does not match matrix size");
  const int n = input.photon_count();
  if (output.photon_count() != n)
    throw InputError("photon-count mismatch: input has " + std::to_string(n) + ", output has " +
                     std::to_string(output.photon_count()));
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  for (int i = 0; i < output.modes(); ++i)
    for (int r = 0; r < output[i]; ++r) rows.push_back(i);
  for (int j = 0; j < input.modes(); ++j)
    for (int r = 0; r < input[j]; ++r) cols.push_back(j);
  return u(rows, cols);
}

double occupation_factorial(const FockState& s) {
  static constexpr double kSmall[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800};
  double log_sum = 0.0;
  double product = 1.0;
  bool use_log = false;
  for (int n : s.occupations) {
    if (n > 10) use_log = true;
    if (!use_log) product *= kSmall[n];
    log_sum += std::lgamma(static_cast<double>(n) + 1.0);
  }
  return use_log ? std::exp(log_sum) : product;
}

double output_probability(const ComplexMatrix& u, const FockState& input, const FockState& output) {
  const ComplexMatrix sub = transition_submatrix(u, input, output);
  const double amplitude_sq = std::norm(permanent(sub));
  return amplitude_sq / (occupation_factorial(input) * occupation_factorial(output));
}

FockDistribution ideal_distribution(const ComplexMatrix& u, const FockState& input) {
  require_unitary(u);
  if (input.modes() != u.rows()) throw InputError("ideal_distribution: input length does not match matrix size");
  auto space = enumerate_fock(input.modes(), input.photon_count());
  RealVector probs(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i)
    probs[static_cast<Eigen::Index>(i)] = output_probability(u, input, space[i]);
  // Remove rounding drift so downstream consumers see an exact simplex.
  probs /= probs.sum();
  return FockDistribution(std::move(space), std::move(probs));
}

ComplexMatrix haar_unitary(int modes, Rng& rng) {
  if (modes < 1) throw InputError("haar_unitary: need at least one mode");
  ComplexMatrix z(modes, modes);
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0);
  }
  return q;
}

}  // namespace qcbm
