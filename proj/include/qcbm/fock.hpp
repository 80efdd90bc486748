#pragma once

#include <cstdint>
#include <vector>

#include "qcbm/parallel.hpp"
#include "qcbm/permanent.hpp"
#include "qcbm/random.hpp"
#include "qcbm/types.hpp"

namespace qcbm {

/// Largest Fock space `enumerate_fock` will materialize.
inline constexpr std::uint64_t kFockSpaceCap = 5'000'000;

/// Accepted deviation of U†U from the identity (max-abs entry).
inline constexpr double kUnitarityTolerance = 1e-8;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Number of n-photon states over m modes: C(n+m-1, n).
std::uint64_t fock_space_size(int modes, int photons);

/// All n-photon occupation vectors over m modes in ascending lexicographic
/// order. Throws ResourceError when the space exceeds `cap`.
std::vector<FockState> enumerate_fock(int modes, int photons, std::uint64_t cap = kFockSpaceCap);

/// max |(U†U - I)_ij|.
double unitarity_residual(const ComplexMatrix& u);

/// Throws InputError unless `u` is square and unitary within `tol`.
void require_unitary(const ComplexMatrix& u, double tol = kUnitarityTolerance);

/// Square matrix whose rows repeat each output mode by its occupation and
/// whose columns repeat each input mode by its occupation.
ComplexMatrix transition_submatrix(const ComplexMatrix& u, const FockState& input,
                                   const FockState& output);

/// ∏ n_i! over the occupations, exact below 11 photons per mode and via
/// lgamma above.
double occupation_factorial(const FockState& s);

/// |Per(U_sub)|² / (∏ n_out! ∏ n_in!).
double output_probability(const ComplexMatrix& u, const FockState& input, const FockState& output);

/// Output distribution over every n-photon Fock state.
FockDistribution ideal_distribution(const ComplexMatrix& u, const FockState& input);

/// Haar-random m×m unitary (QR of a complex Ginibre matrix with the phase fix).
ComplexMatrix haar_unitary(int modes, Rng& rng);

/// N i.i.d. draws from `dist`; returns counts aligned with `dist.space()`.
/// Draws are chunked with per-chunk seeds derived from one draw of `rng`.
template <typename Pattern>
std::vector<std::uint64_t> sample_categorical(const DistributionTable<Pattern>& dist, std::uint64_t count,
                                              Rng& rng, unsigned threads = 1) {
  if (!dist.normalized() || std::abs(dist.total() - 1.0) > 1e-9)
    throw InputError("sample_categorical: distribution is not normalized");
  const AliasTable table(std::span<const double>(dist.probs().data(), dist.size()));
  const std::uint64_t master = rng.next_u64();
  const std::uint64_t chunks = (count + kShotChunk - 1) / kShotChunk;
  std::vector<std::vector<std::uint64_t>> partial(chunks);
  for_each_chunk(count, threads, [&](std::uint64_t c, std::uint64_t, std::uint64_t n) {
    Rng local(derive_seed(master, c));
    auto& tally = partial[c];
    tally.assign(dist.size(), 0);
    for (std::uint64_t s = 0; s < n; ++s) ++tally[table.sample(local)];
  });
  std::vector<std::uint64_t> counts(dist.size(), 0);
  for (const auto& tally : partial)
    for (std::size_t i = 0; i < tally.size(); ++i) counts[i] += tally[i];
  return counts;
}

}  // namespace qcbm
