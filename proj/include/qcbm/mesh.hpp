#pragma once

#include <vector>

#include "qcbm/random.hpp"
#include "qcbm/types.hpp"

namespace qcbm {

/// Wraps a phase into [0, 2π).
double wrap_phase(double phase);

/// Mach-Zehnder element acting on modes (top_mode, top_mode + 1).
struct MzElement {
  int top_mode = 0;
  double theta = 0.0;        ///< external phase on the top arm
  double theta_prime = 0.0;  ///< internal (mixing) phase

  MzElement() = default;
  MzElement(int top, double t, double tp) : top_mode(top), theta(wrap_phase(t)), theta_prime(wrap_phase(tp)) {}
};

/// Slot of one element in the rectangular mesh.
struct MeshSlot {
  int column = 0;
  int top_mode = 0;
  bool operator==(const MeshSlot&) const = default;
};

/// Ansatz parameters: k blocks of m(m-1) phases. Within a block, element e
/// of `clements_layout` owns entries 2e (theta) and 2e+1 (theta_prime).
class MeshParams {
 public:
  MeshParams() = default;
  MeshParams(int modes, int blocks, RealVector phases, bool single_phase_mode = false, bool tied_blocks = false);

  /// All phases zero: composes to the identity.
  static MeshParams zeros(int modes, int blocks = 1, bool single_phase_mode = false, bool tied_blocks = false);
  /// Free phases uniform on [0, 2π).
  static MeshParams random(int modes, int blocks, Rng& rng, bool single_phase_mode = false,
                           bool tied_blocks = false);

  static Eigen::Index phases_per_block(int modes) { return static_cast<Eigen::Index>(modes) * (modes - 1); }

  int modes() const { return modes_; }
  int blocks() const { return blocks_; }
  bool single_phase_mode() const { return single_phase_mode_; }
  bool tied_blocks() const { return tied_blocks_; }
  const RealVector& phases() const { return phases_; }

  /// Block b's phase slice, honouring tying.
  Eigen::VectorBlock<const RealVector> block(int b) const;

  /// Indices of the entries an optimizer may move: block 0 only when tied,
  /// theta_prime entries only in single-phase mode.
  const std::vector<Eigen::Index>& free_indices() const { return free_; }
  RealVector free_values() const;
  /// Copy with the free entries replaced (and re-wrapped).
  MeshParams with_free_values(const RealVector& values) const;

 private:
  void normalize();

  int modes_ = 0;
  int blocks_ = 0;
  RealVector phases_;
  bool single_phase_mode_ = false;
  bool tied_blocks_ = false;
  std::vector<Eigen::Index> free_;
};

/// m×m identity with the 2×2 Mach-Zehnder block on (j, j+1).
ComplexMatrix t_matrix(int modes, const MzElement& elem);

/// The m(m-1)/2 element slots, column-major then top-to-bottom. Even columns
/// pair (0,1),(2,3),…; odd columns pair (1,2),(3,4),….
std::vector<MeshSlot> clements_layout(int modes);

/// U(θ) = B_k ⋯ B_1 with each block the ordered product of its T matrices
/// (the first slot acts first).
ComplexMatrix compose(const MeshParams& params);

}  // namespace qcbm
