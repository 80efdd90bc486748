#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcbm/noise.hpp"
#include "qcbm/types.hpp"

namespace qcbm {

enum class EstimatorMethod { lossless, postselect, recycled_raw, recycled_mitigated };

std::string to_string(EstimatorMethod method);
EstimatorMethod estimator_method_from_string(const std::string& name);

/// Estimate of the ideal no-collision n-photon distribution, over all
/// C(m, n) n-click patterns.
struct EstimatorOutput {
  ClickDistribution table;
  EstimatorMethod method = EstimatorMethod::lossless;
  std::uint64_t shots_used = 0;
  bool converged = true;
  int iterations = 0;
};

/// Recycled distribution and, when built against a known reference, its
/// split p_R = p1·p_id + (1 − p1)·I.
struct RecycledDecomposition {
  int modes = 0;
  int photons = 0;
  ClickDistribution recycled;
  std::uint64_t shots_used = 0;
  std::optional<double> p1;
  std::optional<ClickDistribution> interference;
};

struct MitigationConfig {
  int max_iters = 5;
  double tol = 1e-6;
};

/// Sorted list of the C(m, n) patterns with exactly n clicks.
std::vector<ClickPattern> n_click_space(int modes, int clicks);

/// The ideal distribution conditioned on collision-free outcomes, as a table
/// over n-click patterns. Throws DegenerateInputError when no mass is
/// collision-free.
EstimatorOutput ideal_reference(const FockDistribution& ideal);

/// Frequencies of the n-click stratum, renormalized. Throws
/// InsufficientDataError on an empty stratum.
EstimatorOutput postselect(const LossyCounts& counts, int photons);

/// For each n-click pattern, the indices of its neighbours s − e_i + e_j
/// (i ∈ s, j ∉ s) within `space`.
using NeighbourLists = std::vector<std::vector<std::uint32_t>>;
NeighbourLists neighbour_lists(const std::vector<ClickPattern>& space);

/// (N v)(s) = (1/n) Σ over the neighbours of s of v. `v` may be signed.
RealVector neighbour_apply(const NeighbourLists& lists, int photons, const RealVector& v);

/// Neighbour sum C(s) = (1/n) Σ_{i∈s} Σ_{j∉s} p(s − e_i + e_j) for every
/// pattern of `p` (an n-click table).
RealVector interference_sums(const ClickDistribution& p);

/// p1 = 1/(1 + ΣC) and I = C/ΣC computed from a reference n-click table.
/// When ΣC = 0, p1 = 1 and I is an all-zero unnormalized table.
std::pair<double, ClickDistribution> exact_recycling_split(const ClickDistribution& reference);

/// R(s) = Σ_{i∈s} q(s − e_i) over the (n−1)-click entries of `lower`,
/// normalized. `lower` may hold any click patterns; others are ignored.
/// With `reference`, p1 and I are filled from `exact_recycling_split`.
RecycledDecomposition recycle_from_frequencies(const ClickDistribution& lower, int modes, int photons,
                                               const ClickDistribution* reference = nullptr);

/// Recycled distribution from the (n−1)-click stratum of lossy counts.
/// Throws InsufficientDataError when that stratum is empty.
RecycledDecomposition recycle(const LossyCounts& counts, int photons,
                              const ClickDistribution* reference = nullptr);

/// One interference-subtraction step p ↦ normalize(max(0, Z·p_R − C(p)))
/// with Z = 1 + ΣC(p). The ideal distribution is a fixed point of this map
/// whenever p_R is the exact single-loss recycled table.
ClickDistribution mitigation_step(const ClickDistribution& recycled, const ClickDistribution& current);

/// Interference subtraction: solves for the fixed point of `mitigation_step`
/// (before clipping) with conjugate gradient started at p_R, then clips
/// negatives and renormalizes. Plain repetition of the step diverges once
/// m − n > 2, since the neighbour operator then has eigenvalues above 1 on
/// zero-sum vectors. When m >= 2n the fixed point is not unique and the
/// minimum-norm one is returned; components of p_id in the kernel of I + N
/// cannot be recovered from the (n−1)-click stratum.
EstimatorOutput mitigate(const RecycledDecomposition& decomp, const MitigationConfig& config = {});

/// Recycled table as an estimator (no subtraction).
EstimatorOutput recycled_raw(const RecycledDecomposition& decomp);

struct ErrorReport {
  double tvd = 0.0;
  double kl = 0.0;  ///< KL(reference ‖ estimate), smoothed
  double max_abs = 0.0;
  RealVector abs_errors;
};

/// Error of `est` against `reference`; both must share a pattern space.
ErrorReport estimator_errors(const EstimatorOutput& est, const EstimatorOutput& reference);

}  // namespace qcbm
