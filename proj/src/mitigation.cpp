#include "qcbm/mitigation.hpp"

#include <cmath>

#include "qcbm/fock.hpp"
#include "qcbm/metrics.hpp"

namespace qcbm {

std::string to_string(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::lossless: return "lossless";
    case EstimatorMethod::postselect: return "postselect";
    case EstimatorMethod::recycled_raw: return "recycled_raw";
    case EstimatorMethod::recycled_mitigated: return "recycled_mitigated";
  }
  return "unknown";
}

EstimatorMethod estimator_method_from_string(const std::string& name) {
  if (name == "lossless") return EstimatorMethod::lossless;
  if (name == "postselect") return EstimatorMethod::postselect;
  if (name == "recycled_raw") return EstimatorMethod::recycled_raw;
  if (name == "recycled_mitigated") return EstimatorMethod::recycled_mitigated;
  throw InputError("unknown estimator method '" + name + "'");
}

std::vector<ClickPattern> n_click_space(int modes, int clicks) {
  if (modes < 1 || modes > 64) throw InputError("n_click_space: modes out of range");
  if (clicks < 0 || clicks > modes) throw InputError("n_click_space: click count out of range");
  std::vector<ClickPattern> out;
  out.reserve(binomial(static_cast<std::uint64_t>(modes), static_cast<std::uint64_t>(clicks)));
  // Recursive build in ascending bit order: mode 0 is the most significant bit.
  auto build = [&](auto&& self, int mode, int remaining, std::uint64_t bits) -> void {
    if (remaining == 0) {
      out.emplace_back(modes, bits);
      return;
    }
    if (modes - mode < remaining) return;
    // Mode left empty first: smaller value.
    self(self, mode + 1, remaining, bits);
    self(self, mode + 1, remaining - 1, bits | ClickPattern::mask(modes, mode));
  };
  build(build, 0, clicks, 0);
  return out;
}

namespace {

std::ptrdiff_t find_bits(const std::vector<ClickPattern>& space, std::uint64_t bits) {
  auto it = std::lower_bound(space.begin(), space.end(), bits,
                             [](const ClickPattern& p, std::uint64_t b) { return p.bits < b; });
  if (it == space.end() || it->bits != bits) return -1;
  return it - space.begin();
}

ClickDistribution normalize_or_throw(std::vector<ClickPattern> space, RealVector weights, const char* who) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw InsufficientDataError(std::string(who) + ": no probability mass");
  weights /= total;
  return ClickDistribution(std::move(space), std::move(weights));
}

}  // namespace

EstimatorOutput ideal_reference(const FockDistribution& ideal) {
  if (ideal.size() == 0) throw InputError("ideal_reference: empty distribution");
  const int m = ideal.pattern(0).modes();
  const int n = ideal.pattern(0).photon_count();
  auto space = n_click_space(m, n);
  RealVector probs = RealVector::Zero(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    const auto& state = ideal.pattern(i);
    if (!state.collision_free()) continue;
    const auto bits = ClickPattern::from_clicks(state.occupations).bits;
    probs[find_bits(space, bits)] += ideal.prob(i);
  }
  const double mass = probs.sum();
  if (!(mass > 0.0)) throw DegenerateInputError("ideal_reference: all probability mass lies on collision outcomes");
  probs /= mass;
  EstimatorOutput out;
  out.table = ClickDistribution(std::move(space), std::move(probs));
  out.method = EstimatorMethod::lossless;
  return out;
}

EstimatorOutput postselect(const LossyCounts& counts, int photons) {
  const Stratum stratum = stratify(counts, photons);
  if (stratum.total == 0)
    throw InsufficientDataError("postselect: no shots with " + std::to_string(photons) + " clicks out of " +
                                std::to_string(counts.total_shots));
  auto space = n_click_space(counts.modes, photons);
  RealVector probs = RealVector::Zero(static_cast<Eigen::Index>(space.size()));
  for (const auto& [pattern, n] : stratum.counts) probs[find_bits(space, pattern.bits)] = static_cast<double>(n);
  EstimatorOutput out;
  out.table = normalize_or_throw(std::move(space), std::move(probs), "postselect");
  out.method = EstimatorMethod::postselect;
  out.shots_used = stratum.total;
  return out;
}

NeighbourLists neighbour_lists(const std::vector<ClickPattern>& space) {
  NeighbourLists lists(space.size());
  if (space.empty()) return lists;
  const int m = space.front().modes;
  for (std::size_t k = 0; k < space.size(); ++k) {
    const std::uint64_t s = space[k].bits;
    for (int i = 0; i < m; ++i) {
      const std::uint64_t bi = ClickPattern::mask(m, i);
      if (!(s & bi)) continue;
      for (int j = 0; j < m; ++j) {
        const std::uint64_t bj = ClickPattern::mask(m, j);
        if (s & bj) continue;
        const auto idx = find_bits(space, (s & ~bi) | bj);
        if (idx >= 0) lists[k].push_back(static_cast<std::uint32_t>(idx));
      }
    }
  }
  return lists;
}

RealVector neighbour_apply(const NeighbourLists& lists, int photons, const RealVector& v) {
  RealVector out = RealVector::Zero(v.size());
  if (photons == 0) return out;
  for (std::size_t k = 0; k < lists.size(); ++k) {
    double total = 0.0;
    for (auto idx : lists[k]) total += v[idx];
    out[static_cast<Eigen::Index>(k)] = total / photons;
  }
  return out;
}

RealVector interference_sums(const ClickDistribution& p) {
  if (p.size() == 0) return {};
  return neighbour_apply(neighbour_lists(p.space()), p.pattern(0).click_count(), p.probs());
}

std::pair<double, ClickDistribution> exact_recycling_split(const ClickDistribution& reference) {
  const RealVector c = interference_sums(reference);
  const double total = c.sum();
  const double p1 = 1.0 / (1.0 + total);
  if (total > 0.0) return {p1, ClickDistribution(reference.space(), c / total)};
  return {p1, ClickDistribution(reference.space(), c, false)};
}

RecycledDecomposition recycle_from_frequencies(const ClickDistribution& lower, int modes, int photons,
                                               const ClickDistribution* reference) {
  if (photons < 1) throw InputError("recycle: need at least one photon");
  auto space = n_click_space(modes, photons);
  RealVector r = RealVector::Zero(static_cast<Eigen::Index>(space.size()));
  double lower_mass = 0.0;
  for (std::size_t t = 0; t < lower.size(); ++t) {
    const auto& pattern = lower.pattern(t);
    if (pattern.modes != modes) throw InputError("recycle: pattern length does not match mode count");
    if (pattern.click_count() != photons - 1) continue;
    const double q = lower.prob(t);
    lower_mass += q;
    if (q == 0.0) continue;
    // q(t) feeds every n-click pattern obtained by adding one click to t.
    for (int j = 0; j < modes; ++j) {
      const std::uint64_t bj = ClickPattern::mask(modes, j);
      if (pattern.bits & bj) continue;
      r[find_bits(space, pattern.bits | bj)] += q;
    }
  }
  if (!(lower_mass > 0.0))
    throw InsufficientDataError("recycle: no mass in the " + std::to_string(photons - 1) + "-click stratum");
  RecycledDecomposition out;
  out.modes = modes;
  out.photons = photons;
  out.recycled = normalize_or_throw(std::move(space), std::move(r), "recycle");
  if (reference) {
    if (!reference->same_space(out.recycled)) throw InputError("recycle: reference has a different pattern space");
    auto [p1, interference] = exact_recycling_split(*reference);
    out.p1 = p1;
    out.interference = std::move(interference);
  }
  return out;
}

RecycledDecomposition recycle(const LossyCounts& counts, int photons, const ClickDistribution* reference) {
  if (photons < 1) throw InputError("recycle: need at least one photon");
  const Stratum stratum = stratify(counts, photons - 1);
  if (stratum.total == 0)
    throw InsufficientDataError("recycle: no shots with " + std::to_string(photons - 1) + " clicks out of " +
                                std::to_string(counts.total_shots));
  std::vector<ClickPattern> space;
  RealVector freq(static_cast<Eigen::Index>(stratum.counts.size()));
  for (const auto& [pattern, n] : stratum.counts) {
    freq[static_cast<Eigen::Index>(space.size())] = static_cast<double>(n) / static_cast<double>(stratum.total);
    space.push_back(pattern);
  }
  auto out = recycle_from_frequencies(ClickDistribution(std::move(space), std::move(freq), false), counts.modes,
                                      photons, reference);
  out.shots_used = stratum.total;
  return out;
}

ClickDistribution mitigation_step(const ClickDistribution& recycled, const ClickDistribution& current) {
  if (!recycled.same_space(current)) throw InputError("mitigation_step: pattern spaces differ");
  const RealVector c = interference_sums(current);
  const double z = 1.0 + c.sum();
  RealVector next = (z * recycled.probs() - c).cwiseMax(0.0);
  const double total = next.sum();
  // Everything clipped: fall back to the recycled table.
  if (!(total > 0.0)) return recycled;
  return ClickDistribution(recycled.space(), next / total);
}

EstimatorOutput mitigate(const RecycledDecomposition& decomp, const MitigationConfig& config) {
  if (decomp.recycled.size() == 0) throw InputError("mitigate: recycled table missing");
  if (config.max_iters < 1) throw InputError("mitigate: max_iters must be >= 1");
  const ClickDistribution& recycled = decomp.recycled;
  const int n = recycled.pattern(0).click_count();
  const NeighbourLists lists = neighbour_lists(recycled.space());
  auto system = [&](const RealVector& v) -> RealVector { return v + neighbour_apply(lists, n, v); };

  // Fixed point of p = Z·p_R − C(p), i.e. (I + N) p = Z·p_R, solved by
  // conjugate gradient from p_R. I + N is symmetric PSD with n + 1 distinct
  // eigenvalues, one of them 0 when m >= 2n; the residual never leaves its
  // range, so CG lands on the minimum-norm fixed point in at most n steps.
  const RealVector& r = recycled.probs();
  const double z = 1.0 + neighbour_apply(lists, n, r).sum();
  RealVector x = r;
  RealVector residual = z * r - system(x);
  RealVector direction = residual;
  double rr = residual.squaredNorm();
  const double floor = 1e-30 * std::max(1.0, z * z * r.squaredNorm());

  EstimatorOutput out;
  out.method = EstimatorMethod::recycled_mitigated;
  out.shots_used = decomp.shots_used;
  out.converged = false;
  for (int it = 1; it <= config.max_iters; ++it) {
    out.iterations = it;
    if (rr <= floor) {
      out.converged = true;
      break;
    }
    const RealVector image = system(direction);
    const double alpha = rr / direction.dot(image);
    const double change = std::abs(alpha) * direction.cwiseAbs().maxCoeff();
    x += alpha * direction;
    residual -= alpha * image;
    const double rr_next = residual.squaredNorm();
    direction = residual + (rr_next / rr) * direction;
    rr = rr_next;
    if (change < config.tol || rr <= floor) {
      out.converged = true;
      break;
    }
  }
  RealVector clipped = x.cwiseMax(0.0);
  const double total = clipped.sum();
  out.table = total > 0.0 ? ClickDistribution(recycled.space(), clipped / total) : recycled;
  return out;
}

EstimatorOutput recycled_raw(const RecycledDecomposition& decomp) {
  EstimatorOutput out;
  out.table = decomp.recycled;
  out.method = EstimatorMethod::recycled_raw;
  out.shots_used = decomp.shots_used;
  return out;
}

ErrorReport estimator_errors(const EstimatorOutput& est, const EstimatorOutput& reference) {
  if (!est.table.same_space(reference.table)) throw InputError("estimator_errors: pattern spaces differ");
  ErrorReport report;
  report.abs_errors = (est.table.probs() - reference.table.probs()).cwiseAbs();
  report.tvd = tvd(est.table.probs(), reference.table.probs());
  report.kl = kl_divergence(reference.table.probs(), est.table.probs());
  report.max_abs = report.abs_errors.size() ? report.abs_errors.maxCoeff() : 0.0;
  return report;
}

}  // namespace qcbm
