#include "qcbm/mesh.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qcbm {

double wrap_phase(double phase) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (!std::isfinite(phase)) throw InputError("phase is not finite");
  double wrapped = std::fmod(phase, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

MeshParams::MeshParams(int modes, int blocks, RealVector phases, bool single_phase_mode, bool tied_blocks)
    : modes_(modes),
      blocks_(blocks),
      phases_(std::move(phases)),
      single_phase_mode_(single_phase_mode),
      tied_blocks_(tied_blocks) {
  if (modes < 2) throw InputError("MeshParams: need at least 2 modes");
  if (blocks < 1) throw InputError("MeshParams: need at least 1 block");
  const Eigen::Index expected = phases_per_block(modes) * blocks;
  if (phases_.size() != expected)
    throw InputError("MeshParams: expected " + std::to_string(expected) + " phases, got " +
                     std::to_string(phases_.size()));
  normalize();
}

void MeshParams::normalize() {
  const Eigen::Index per_block = phases_per_block(modes_);
  for (Eigen::Index i = 0; i < phases_.size(); ++i) {
    const bool is_theta = (i % 2) == 0;
    phases_[i] = (single_phase_mode_ && is_theta) ? 0.0 : wrap_phase(phases_[i]);
  }
  if (tied_blocks_)
    for (int b = 1; b < blocks_; ++b) phases_.segment(b * per_block, per_block) = phases_.head(per_block);
  free_.clear();
  const Eigen::Index span = tied_blocks_ ? per_block : phases_.size();
  for (Eigen::Index i = 0; i < span; ++i)
    if (!(single_phase_mode_ && i % 2 == 0)) free_.push_back(i);
}

MeshParams MeshParams::zeros(int modes, int blocks, bool single_phase_mode, bool tied_blocks) {
  return MeshParams(modes, blocks, RealVector::Zero(phases_per_block(modes) * blocks), single_phase_mode,
                    tied_blocks);
}

MeshParams MeshParams::random(int modes, int blocks, Rng& rng, bool single_phase_mode, bool tied_blocks) {
  RealVector phases(phases_per_block(modes) * blocks);
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return MeshParams(modes, blocks, std::move(phases), single_phase_mode, tied_blocks);
}

Eigen::VectorBlock<const RealVector> MeshParams::block(int b) const {
  if (b < 0 || b >= blocks_) throw InputError("MeshParams::block: index out of range");
  const Eigen::Index per_block = phases_per_block(modes_);
  return phases_.segment((tied_blocks_ ? 0 : b) * per_block, per_block);
}

RealVector MeshParams::free_values() const {
  RealVector out(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t i = 0; i < free_.size(); ++i) out[static_cast<Eigen::Index>(i)] = phases_[free_[i]];
  return out;
}

MeshParams MeshParams::with_free_values(const RealVector& values) const {
  if (values.size() != static_cast<Eigen::Index>(free_.size()))
    throw InputError("MeshParams::with_free_values: length mismatch");
  MeshParams out = *this;
  for (std::size_t i = 0; i < free_.size(); ++i) out.phases_[free_[i]] = values[static_cast<Eigen::Index>(i)];
  out.normalize();
  return out;
}

ComplexMatrix t_matrix(int modes, const MzElement& elem) {
  if (elem.top_mode < 0 || elem.top_mode > modes - 2)
    throw InputError("t_matrix: top mode " + std::to_string(elem.top_mode) + " out of range for " +
                     std::to_string(modes) + " modes");
  ComplexMatrix t = ComplexMatrix::Identity(modes, modes);
  const Complex phase = std::polar(1.0, elem.theta);
  const double c = std::cos(elem.theta_prime / 2.0);
  const double s = std::sin(elem.theta_prime / 2.0);
  const int j = elem.top_mode;
  t(j, j) = phase * c;
  t(j, j + 1) = -s;
  t(j + 1, j) = phase * s;
  t(j + 1, j + 1) = c;
  return t;
}

std::vector<MeshSlot> clements_layout(int modes) {
  if (modes < 2) throw InputError("clements_layout: need at least 2 modes");
  std::vector<MeshSlot> slots;
  slots.reserve(static_cast<std::size_t>(modes * (modes - 1) / 2));
  for (int column = 0; column < modes; ++column)
    for (int top = column % 2; top + 1 < modes; top += 2) slots.push_back({column, top});
  return slots;
}

ComplexMatrix compose(const MeshParams& params) {
  const int m = params.modes();
  if (params.phases().size() != MeshParams::phases_per_block(m) * params.blocks())
    throw InputError("compose: phase vector length inconsistent with (m, k)");
  const auto layout = clements_layout(m);
  ComplexMatrix u = ComplexMatrix::Identity(m, m);
  for (int b = 0; b < params.blocks(); ++b) {
    const auto phases = params.block(b);
    for (std::size_t e = 0; e < layout.size(); ++e) {
      const Eigen::Index idx = 2 * static_cast<Eigen::Index>(e);
      const Complex phase = std::polar(1.0, phases[idx]);
      const double c = std::cos(phases[idx + 1] / 2.0);
      const double s = std::sin(phases[idx + 1] / 2.0);
      const int j = layout[e].top_mode;
      // Left-multiply by the T matrix: only rows j and j+1 change.
      const Eigen::Matrix<Complex, 1, Eigen::Dynamic> top = u.row(j);
      const Eigen::Matrix<Complex, 1, Eigen::Dynamic> bottom = u.row(j + 1);
      u.row(j) = phase * c * top - s * bottom;
      u.row(j + 1) = phase * s * top + c * bottom;
    }
  }
  return u;
}

}  // namespace qcbm
