#pragma once

#include <array>
#include <vector>

#include "tensorlight/beam.hpp"
#include "tensorlight/half_int.hpp"
#include "tensorlight/linalg.hpp"

namespace tl {

enum class Multipole { E1, E2_dJ1, E2_dJ2 };

/// Tensor rank Delta J driven by the multipole.
constexpr int tensor_rank(Multipole m) { return m == Multipole::E2_dJ2 ? 2 : 1; }
/// E1 couples to the 3 field components, E2 to the 9 gradients d_i E_j.
constexpr int slot_count(Multipole m) { return m == Multipole::E1 ? 3 : 9; }
/// Derivative order of the field needed for the bare strength.
constexpr int field_order(Multipole m) { return m == Multipole::E1 ? 0 : 1; }

const char* to_string(Multipole m);

/// Electronic sub-transition |J1 m1> -> |J2 m2>.
struct TransitionSpec {
  HalfInt j1, m1, j2, m2;
  Multipole multipole = Multipole::E2_dJ2;

  /// Throws std::domain_error for projections outside |m| <= J or with the
  /// wrong integer/half-integer character. Triangle violations are allowed
  /// and give zero strength.
  TransitionSpec(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, Multipole multipole);

  HalfInt delta_m() const { return m2 - m1; }
  bool triangle_allowed() const;
};

/// Rotation of the atomic quantization axis relative to the beam frame,
/// `theta` radians about the unit vector `axis` (default: y).
struct Geometry {
  double theta = 0.0;
  Vec3 axis{0.0, 1.0, 0.0};

  Geometry() = default;
  /// Throws std::domain_error unless |axis| = 1 within 1e-12.
  Geometry(double theta, const Vec3& axis);

  Mat3 rotation() const { return rotation_matrix(axis, theta); }
};

/// Slot weights per Delta m channel. Slot j is E_j for E1 and 3*i + j
/// (gradient d_i E_j) for E2. Common prefactors are factored out.
class CouplingCoefficients {
public:
  using Slots = std::array<Complex, 9>;

  CouplingCoefficients(int rank, int slots);

  int rank() const { return rank_; }
  int slots() const { return slots_; }
  Slots& channel(int delta_m) { return channels_.at(delta_m + rank_); }
  const Slots& channel(int delta_m) const { return channels_.at(delta_m + rank_); }

private:
  int rank_;
  int slots_;
  std::vector<Slots> channels_;
};

/// Static coefficient table of the multipole in the Condon-Shortley
/// convention; the scalar rank-0 part of the quadrupole is absent.
CouplingCoefficients coefficients_for(Multipole multipole);

/// Channels of the rotated tensors: c~(m) = sum_m' D^{dJ}_{m m'}(R) c(m').
/// Equivalent to evaluating unrotated channels on the field rotated by R.
CouplingCoefficients rotate_coefficients(const CouplingCoefficients& coefficients, const Geometry& geometry);

/// Transition-specific contraction weights, precomputed once and applied to
/// many field samples.
class TransitionKernel {
public:
  TransitionKernel(const TransitionSpec& transition, const Geometry& geometry = {});

  /// Relative strength mu; exactly 0 when forbidden by selection rules.
  Complex strength(const FieldSample& sample) const;
  /// Directional derivative of mu along the unit vector `direction`; needs a
  /// sample one derivative order higher than strength().
  Complex derivative(const FieldSample& sample, const Vec3& direction) const;
  /// |w| |slot values| (Euclidean norms): an upper bound on |mu| that stays
  /// finite when the weights on the dominant slots cancel to rounding level.
  double magnitude_scale(const FieldSample& sample) const;
  /// Same bound for derivative(), summed over the direction components.
  double derivative_magnitude_scale(const FieldSample& sample, const Vec3& direction) const;

  bool forbidden() const { return forbidden_; }
  Multipole multipole() const { return multipole_; }
  const CouplingCoefficients::Slots& weights() const { return weights_; }

private:
  Multipole multipole_;
  bool forbidden_ = true;
  CouplingCoefficients::Slots weights_{};
};

Complex relative_strength(const FieldSample& sample, const TransitionSpec& transition,
                          const Geometry& geometry = {});

/// Strength averaged over the separable Gaussian |Psi|^2 with per-axis RMS
/// `widths`, centred on `center`, using tensor-product Gauss-Hermite
/// quadrature of the given order. Throws std::domain_error for widths <= 0
/// or order < 1.
Complex averaged_strength(const BeamSpec& spec, const Vec3& center, const Vec3& widths,
                          const TransitionSpec& transition, const Geometry& geometry, int quadrature_order,
                          DiffBackend backend = DiffBackend::automatic);

/// Same average of |mu|^2 (incoherent residual excitation).
double averaged_squared_strength(const BeamSpec& spec, const Vec3& center, const Vec3& widths,
                                 const TransitionSpec& transition, const Geometry& geometry,
                                 int quadrature_order, DiffBackend backend = DiffBackend::automatic);

/// Field sample expressed in the frame rotated by R: E' = R E,
/// J'_{ij} = R_ia R_jb J_ab, H'_{pij} = R_pc R_ia R_jb H_cab.
FieldSample rotate_sample(const FieldSample& sample, const Mat3& rotation);

} // namespace tl
