#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qcbm/errors.hpp"

namespace qcbm {

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealVector = Eigen::VectorXd;

/// Occupation-number vector over m modes.
struct FockState {
  std::vector<int> occupations;

  FockState() = default;
  explicit FockState(std::vector<int> occ) : occupations(std::move(occ)) {
    for (int n : occupations)
      if (n < 0) throw InputError("FockState: negative occupation");
  }

  int modes() const { return static_cast<int>(occupations.size()); }
  int photon_count() const { return std::accumulate(occupations.begin(), occupations.end(), 0); }
  int operator[](int i) const { return occupations[static_cast<std::size_t>(i)]; }
  bool collision_free() const {
    return std::all_of(occupations.begin(), occupations.end(), [](int n) { return n <= 1; });
  }

  std::string to_string() const {
    std::string out;
    for (int n : occupations) {
      if (!out.empty()) out += ' ';
      out += std::to_string(n);
    }
    return out;
  }

  auto operator<=>(const FockState&) const = default;
  bool operator==(const FockState&) const = default;
};

/// Threshold-detector outcome over at most 64 modes.
///
/// Mode 0 is the most significant bit of `bits`, so integer order on `bits`
/// coincides with lexicographic order on the click vector.
struct ClickPattern {
  int modes = 0;
  std::uint64_t bits = 0;

  ClickPattern() = default;
  ClickPattern(int m, std::uint64_t b) : modes(m), bits(b) {}

  static ClickPattern from_clicks(const std::vector<int>& clicks) {
    if (clicks.size() > 64) throw InputError("ClickPattern: more than 64 modes");
    ClickPattern p(static_cast<int>(clicks.size()), 0);
    for (int i = 0; i < p.modes; ++i) {
      const int c = clicks[static_cast<std::size_t>(i)];
      if (c != 0 && c != 1) throw InputError("ClickPattern: entries must be 0 or 1");
      if (c) p.set(i);
    }
    return p;
  }

  /// Parses a bitstring such as "1010".
  static ClickPattern from_string(const std::string& s) {
    std::vector<int> clicks;
    for (char ch : s) {
      if (ch != '0' && ch != '1') throw InputError("ClickPattern: bad bitstring '" + s + "'");
      clicks.push_back(ch - '0');
    }
    return from_clicks(clicks);
  }

  static std::uint64_t mask(int m, int i) { return std::uint64_t{1} << (m - 1 - i); }

  bool clicked(int i) const { return (bits & mask(modes, i)) != 0; }
  void set(int i) { bits |= mask(modes, i); }
  void clear(int i) { bits &= ~mask(modes, i); }
  int click_count() const { return std::popcount(bits); }

  std::vector<int> clicks() const {
    std::vector<int> out(static_cast<std::size_t>(modes));
    for (int i = 0; i < modes; ++i) out[static_cast<std::size_t>(i)] = clicked(i) ? 1 : 0;
    return out;
  }

  std::string to_string() const {
    std::string out(static_cast<std::size_t>(modes), '0');
    for (int i = 0; i < modes; ++i)
      if (clicked(i)) out[static_cast<std::size_t>(i)] = '1';
    return out;
  }

  auto operator<=>(const ClickPattern&) const = default;
  bool operator==(const ClickPattern&) const = default;
};

/// Probabilities over a sorted, duplicate-free pattern space.
template <typename Pattern>
class DistributionTable {
 public:
  DistributionTable() = default;

  /// `space` must already be sorted and duplicate-free.
  DistributionTable(std::vector<Pattern> space, RealVector probs, bool normalized = true)
      : space_(std::move(space)), probs_(std::move(probs)), normalized_(normalized) {
    if (static_cast<Eigen::Index>(space_.size()) != probs_.size())
      throw InputError("DistributionTable: space and probability lengths differ");
    for (std::size_t i = 1; i < space_.size(); ++i)
      if (!(space_[i - 1] < space_[i]))
        throw InputError("DistributionTable: space not sorted or has duplicates");
    for (Eigen::Index i = 0; i < probs_.size(); ++i)
      if (!(probs_[i] >= 0.0)) throw InputError("DistributionTable: negative or NaN probability");
    if (normalized_ && std::abs(probs_.sum() - 1.0) > 1e-9)
      throw InputError("DistributionTable: probabilities do not sum to 1");
  }

  const std::vector<Pattern>& space() const { return space_; }
  const RealVector& probs() const { return probs_; }
  std::size_t size() const { return space_.size(); }
  bool normalized() const { return normalized_; }
  const Pattern& pattern(std::size_t i) const { return space_[i]; }
  double prob(std::size_t i) const { return probs_[static_cast<Eigen::Index>(i)]; }

  /// Index of `p` in the space, or -1.
  std::ptrdiff_t index_of(const Pattern& p) const {
    auto it = std::lower_bound(space_.begin(), space_.end(), p);
    if (it == space_.end() || !(*it == p)) return -1;
    return it - space_.begin();
  }

  /// Probability of `p`; 0 when `p` lies outside the space.
  double operator()(const Pattern& p) const {
    const auto idx = index_of(p);
    return idx < 0 ? 0.0 : probs_[idx];
  }

  double total() const { return probs_.sum(); }

  /// Copy rescaled to unit mass.
  DistributionTable normalized_copy() const {
    const double t = total();
    if (!(t > 0.0)) throw DegenerateInputError("DistributionTable: zero total mass");
    return DistributionTable(space_, probs_ / t, true);
  }

  bool same_space(const DistributionTable& other) const { return space_ == other.space_; }

 private:
  std::vector<Pattern> space_;
  RealVector probs_;
  bool normalized_ = true;
};

using FockDistribution = DistributionTable<FockState>;
using ClickDistribution = DistributionTable<ClickPattern>;

}  // namespace qcbm
