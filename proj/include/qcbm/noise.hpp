#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qcbm/random.hpp"
#include "qcbm/types.hpp"

namespace qcbm {

/// Uniform photon loss: every photon is lost independently with probability eta.
struct LossModel {
  double eta = 0.0;

  LossModel() = default;
  explicit LossModel(double e) : eta(e) {
    if (!(e >= 0.0 && e <= 1.0)) throw InputError("LossModel: eta must lie in [0, 1]");
  }
  double survival() const { return 1.0 - eta; }
};

/// Click-pattern tallies of a lossy run. Zero-click shots are kept under the
/// all-zeros pattern, so the counts always sum to `total_shots`.
struct LossyCounts {
  int modes = 0;
  int photons = 0;
  std::uint64_t total_shots = 0;
  double eta = 0.0;
  std::optional<std::uint64_t> seed;
  std::map<ClickPattern, std::uint64_t> counts;
  std::vector<std::uint64_t> photon_numbers;  ///< surviving photons per shot, before thresholding

  std::uint64_t count(const ClickPattern& p) const {
    auto it = counts.find(p);
    return it == counts.end() ? 0 : it->second;
  }
  std::uint64_t stratum_total(int clicks) const;
};

/// Shots with a given click multiplicity.
struct Stratum {
  int clicks = 0;
  std::uint64_t total = 0;
  std::map<ClickPattern, std::uint64_t> counts;
};

/// clicks[i] = min(occupation[i], 1).
ClickPattern threshold_map(const FockState& s);

/// Per shot: draw an ideal output, keep each photon with probability 1-eta,
/// threshold-map the survivors. Chunked and seeded like sample_categorical.
LossyCounts lossy_sample(const FockDistribution& ideal, const LossModel& loss, std::uint64_t shots, Rng& rng,
                         unsigned threads = 1);

/// Largest (m, n) the exact lossy oracle accepts.
inline constexpr int kExactLossMaxModes = 10;
inline constexpr int kExactLossMaxPhotons = 4;

/// Pre-threshold mixture over all Fock states with at most n photons:
/// weight p(u)·∏ C(u_i, v_i)(1-eta)^{v_i} eta^{u_i - v_i} at survivor v.
FockDistribution exact_lossy_fock_distribution(const FockDistribution& ideal, const LossModel& loss);

/// Threshold pushforward of `exact_lossy_fock_distribution`, over every
/// click pattern with at most n clicks.
ClickDistribution exact_lossy_distribution(const FockDistribution& ideal, const LossModel& loss);

/// Counts restricted to click_count == k.
Stratum stratify(const LossyCounts& counts, int k);

}  // namespace qcbm
