#pragma once

#include <array>

#include "tensorlight/beam.hpp"
#include "tensorlight/coupling.hpp"

namespace tl {

/// CODATA 2018.
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;

enum class TrapMode { X = 0, Y = 1, Z = 2 };
enum class SidebandBranch { carrier, bsb, rsb };

const char* to_string(TrapMode q);
const char* to_string(SidebandBranch b);

/// Harmonic confinement of a single atom. `frequencies` are angular
/// frequencies (rad/s) of the modes along the orthonormal `axes`.
struct TrapSpec {
  double mass = 0.0;
  std::array<double, 3> frequencies{};
  std::array<Vec3, 3> axes{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};
  Vec3 center{};

  /// Throws std::domain_error on non-positive mass or frequencies, or axes
  /// that are not orthonormal within 1e-12.
  void validate() const;
};

struct SidebandRequest {
  TrapMode mode = TrapMode::Z;
  int n = 0;
  SidebandBranch branch = SidebandBranch::carrier;
};

/// sqrt(hbar / (2 m omega)).
double zero_point_length(double mass, double omega);

enum class LambDickeKind { longitudinal, transverse };
/// longitudinal: k x0; transverse: (sqrt2 / w0) x0. `scale` is k or w0.
double lamb_dicke(LambDickeKind kind, double scale, double mass, double omega);

/// Directional derivative of mu at `r0` along the unit vector `direction`.
/// Throws std::domain_error when |direction| differs from 1 by more than 1e-12.
Complex mu_derivative(const BeamSpec& spec, const Vec3& r0, const Vec3& direction, const TransitionSpec& transition,
                      const Geometry& geometry, DiffBackend backend = DiffBackend::automatic);

/// Carrier mu(R0), or first-order sideband d_q mu x0_q sqrt(n+1) (bsb) /
/// sqrt(n) (rsb), using a field sample already evaluated at the trap centre
/// with at least field_order(multipole) + 1 derivative levels for sidebands.
Complex sideband_from_sample(const FieldSample& sample, const TransitionKernel& kernel, const TrapSpec& trap,
                             const SidebandRequest& request);

Complex sideband_strength(const BeamSpec& spec, const TrapSpec& trap, const SidebandRequest& request,
                          const TransitionSpec& transition, const Geometry& geometry,
                          DiffBackend backend = DiffBackend::automatic);

} // namespace tl
