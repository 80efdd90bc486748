#include "qcbm/noise.hpp"

#include <cmath>
#include <unordered_map>

#include "qcbm/fock.hpp"
#include "qcbm/parallel.hpp"

namespace qcbm {

std::uint64_t LossyCounts::stratum_total(int clicks) const {
  std::uint64_t total = 0;
  for (const auto& [pattern, n] : counts)
    if (pattern.click_count() == clicks) total += n;
  return total;
}

ClickPattern threshold_map(const FockState& s) {
  if (s.modes() > 64) throw InputError("threshold_map: more than 64 modes");
  ClickPattern p(s.modes(), 0);
  for (int i = 0; i < s.modes(); ++i)
    if (s[i] > 0) p.set(i);
  return p;
}

namespace {

void require_fock_table(const FockDistribution& ideal, const char* who) {
  if (ideal.size() == 0) throw InputError(std::string(who) + ": empty distribution");
  if (!ideal.normalized() || std::abs(ideal.total() - 1.0) > 1e-9)
    throw InputError(std::string(who) + ": ideal distribution is not normalized");
}

}  // namespace

LossyCounts lossy_sample(const FockDistribution& ideal, const LossModel& loss, std::uint64_t shots, Rng& rng,
                         unsigned threads) {
  require_fock_table(ideal, "lossy_sample");
  const int m = ideal.pattern(0).modes();
  if (m > 64) throw InputError("lossy_sample: more than 64 modes");

  // Per ideal outcome, the click mask of each of its photons.
  std::vector<std::vector<std::uint64_t>> photon_masks(ideal.size());
  for (std::size_t u = 0; u < ideal.size(); ++u) {
    const auto& state = ideal.pattern(u);
    for (int i = 0; i < m; ++i)
      for (int r = 0; r < state[i]; ++r) photon_masks[u].push_back(ClickPattern::mask(m, i));
  }
  const AliasTable table(std::span<const double>(ideal.probs().data(), ideal.size()));
  const double eta = loss.eta;
  const std::uint64_t master = rng.next_u64();
  const std::uint64_t chunks = (shots + kShotChunk - 1) / kShotChunk;
  const bool dense = m <= 16;

  const int photons = ideal.pattern(0).photon_count();
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> partial(chunks);
  std::vector<std::vector<std::uint64_t>> survivors(chunks, std::vector<std::uint64_t>(photons + 1, 0));
  for_each_chunk(shots, threads, [&](std::uint64_t c, std::uint64_t, std::uint64_t n) {
    Rng local(derive_seed(master, c));
    std::vector<std::uint32_t> dense_tally;
    std::unordered_map<std::uint64_t, std::uint64_t> sparse_tally;
    if (dense) dense_tally.assign(std::size_t{1} << m, 0);
    for (std::uint64_t s = 0; s < n; ++s) {
      const auto& masks = photon_masks[table.sample(local)];
      std::uint64_t bits = 0;
      int kept = 0;
      for (std::uint64_t mask : masks) {
        if (local.uniform() >= eta) {
          bits |= mask;
          ++kept;
        }
      }
      ++survivors[c][static_cast<std::size_t>(kept)];
      if (dense)
        ++dense_tally[bits];
      else
        ++sparse_tally[bits];
    }
    auto& out = partial[c];
    if (dense) {
      for (std::size_t b = 0; b < dense_tally.size(); ++b)
        if (dense_tally[b]) out.emplace_back(b, dense_tally[b]);
    } else {
      out.assign(sparse_tally.begin(), sparse_tally.end());
    }
  });

  LossyCounts result;
  result.modes = m;
  result.photons = photons;
  result.total_shots = shots;
  result.eta = eta;
  result.photon_numbers.assign(static_cast<std::size_t>(photons) + 1, 0);
  for (const auto& chunk : survivors)
    for (std::size_t k = 0; k < chunk.size(); ++k) result.photon_numbers[k] += chunk[k];
  for (const auto& chunk : partial)
    for (const auto& [bits, n] : chunk) result.counts[ClickPattern(m, bits)] += n;
  return result;
}

FockDistribution exact_lossy_fock_distribution(const FockDistribution& ideal, const LossModel& loss) {
  require_fock_table(ideal, "exact_lossy_fock_distribution");
  const int m = ideal.pattern(0).modes();
  const int n = ideal.pattern(0).photon_count();
  if (m > kExactLossMaxModes || n > kExactLossMaxPhotons)
    throw ResourceError("exact lossy oracle limited to m <= " + std::to_string(kExactLossMaxModes) +
                        ", n <= " + std::to_string(kExactLossMaxPhotons));

  std::vector<FockState> space;
  for (int k = 0; k <= n; ++k) {
    auto layer = enumerate_fock(m, k);
    space.insert(space.end(), layer.begin(), layer.end());
  }
  std::sort(space.begin(), space.end());
  RealVector probs = RealVector::Zero(static_cast<Eigen::Index>(space.size()));
  auto index_of = [&](const FockState& s) {
    return std::lower_bound(space.begin(), space.end(), s) - space.begin();
  };

  const double keep = loss.survival();
  const double lose = loss.eta;
  for (std::size_t u = 0; u < ideal.size(); ++u) {
    const double pu = ideal.prob(u);
    if (pu == 0.0) continue;
    const auto& state = ideal.pattern(u);
    // Odometer over survivor vectors v <= u.
    std::vector<int> v(static_cast<std::size_t>(m), 0);
    while (true) {
      double weight = pu;
      for (int i = 0; i < m; ++i) {
        const int ui = state[i];
        const int vi = v[static_cast<std::size_t>(i)];
        weight *= static_cast<double>(binomial(static_cast<std::uint64_t>(ui), static_cast<std::uint64_t>(vi))) *
                  std::pow(keep, vi) * std::pow(lose, ui - vi);
      }
      probs[index_of(FockState(v))] += weight;
      int i = 0;
      for (; i < m; ++i) {
        auto& vi = v[static_cast<std::size_t>(i)];
        if (vi < state[i]) {
          ++vi;
          break;
        }
        vi = 0;
      }
      if (i == m) break;
    }
  }
  return FockDistribution(std::move(space), std::move(probs));
}

ClickDistribution exact_lossy_distribution(const FockDistribution& ideal, const LossModel& loss) {
  const FockDistribution mixture = exact_lossy_fock_distribution(ideal, loss);
  const int m = ideal.pattern(0).modes();
  const int n = ideal.pattern(0).photon_count();
  std::vector<ClickPattern> space;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits)
    if (std::popcount(bits) <= n) space.emplace_back(m, bits);
  RealVector probs = RealVector::Zero(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    const auto target = threshold_map(mixture.pattern(i));
    const auto it = std::lower_bound(space.begin(), space.end(), target);
    probs[it - space.begin()] += mixture.prob(i);
  }
  return ClickDistribution(std::move(space), std::move(probs));
}

Stratum stratify(const LossyCounts& counts, int k) {
  if (k < 0 || k > counts.modes) throw InputError("stratify: click multiplicity out of range");
  Stratum out;
  out.clicks = k;
  for (const auto& [pattern, n] : counts.counts) {
    if (pattern.click_count() != k) continue;
    out.counts.emplace(pattern, n);
    out.total += n;
  }
  return out;
}

}  // namespace qcbm
