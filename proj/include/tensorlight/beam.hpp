#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tensorlight/linalg.hpp"

namespace tl {

struct LaguerreGauss {
  int l = 0;
  int p = 0;
  bool operator==(const LaguerreGauss&) const = default;
};

struct HermiteGauss {
  int m = 0;
  int n = 0;
  bool operator==(const HermiteGauss&) const = default;
};

/// User-supplied scalar mode function f(r) (SI coordinates). Only the
/// finite-difference backend can differentiate it; this is also the hook for
/// externally computed focal fields.
struct CustomMode {
  std::string name;
  std::shared_ptr<const std::function<Complex(const Vec3&)>> function;
  bool operator==(const CustomMode& o) const { return function == o.function; }
};

struct ModeTerm {
  std::variant<LaguerreGauss, HermiteGauss, CustomMode> family;
  int sigma = 1; ///< transverse polarization e_x + i sigma e_y, sigma in {-1, 0, 1}
  bool operator==(const ModeTerm&) const = default;
};

struct BeamTerm {
  Complex weight{1.0, 0.0};
  ModeTerm mode;
  bool operator==(const BeamTerm&) const = default;
};

/// Immutable description of a (superposition of) vector beam(s) propagating
/// along +z with focus at the origin. Lengths in metres.
class BeamSpec {
public:
  BeamSpec(std::vector<BeamTerm> terms, double wavelength, double waist, double amplitude = 1.0);

  const std::vector<BeamTerm>& terms() const { return terms_; }
  double wavelength() const { return wavelength_; }
  double waist() const { return waist_; }
  double amplitude() const { return amplitude_; }
  double wavenumber() const { return 2.0 * kPi / wavelength_; }
  double rayleigh_length() const { return 0.5 * wavenumber() * waist_ * waist_; }
  /// True when every term has closed-form derivatives (LG or HG).
  bool analytic() const;

  bool operator==(const BeamSpec&) const = default;

private:
  std::vector<BeamTerm> terms_;
  double wavelength_;
  double waist_;
  double amplitude_;
};

/// Field value, Jacobian and second derivatives at one point. `order` says
/// how many derivative levels are populated (0, 1 or 2).
struct FieldSample {
  CVec3 E{};
  CMat3 jacobian{};  ///< jacobian[i][j] = d_i E_j
  CTensor3 hessian{}; ///< hessian[p][i][j] = d_p d_i E_j
  int order = 0;
};

enum class DiffBackend { automatic, analytic, finite_difference };

/// Step of the finite-difference backend in units of the wavelength.
inline constexpr double kFiniteDifferenceStep = 1e-4;

/// Laguerre-Gauss mode function f_{l,p} without the e^{ikz} carrier.
Complex lg_mode(int l, int p, double w0, double k, const Vec3& r);
/// Normalized Hermite-Gauss mode function without the e^{ikz} carrier.
Complex hg_mode(int m, int n, double w0, double k, const Vec3& r);

/// Positive-frequency field E^(+)(r) of the non-paraxial vector beam
/// (time factor omitted).
CVec3 vector_field(const BeamSpec& spec, const Vec3& r);

struct FieldComponents {
  Complex longitudinal;  ///< E . e_z
  Complex sigma_plus;    ///< projection on e_x + i e_y
  Complex sigma_minus;   ///< projection on e_x - i e_y
};
/// Circular projections use the Hermitian product, E_sigma = E_x - i sigma E_y,
/// so a pure sigma = +1 beam has a vanishing sigma_minus component.
FieldComponents field_components(const BeamSpec& spec, const Vec3& r);
FieldComponents field_components(const CVec3& E);

/// Throws ConfigError when `backend` is analytic and the spec contains a
/// custom mode.
CMat3 field_jacobian(const BeamSpec& spec, const Vec3& r, DiffBackend backend = DiffBackend::automatic);
CTensor3 field_hessian(const BeamSpec& spec, const Vec3& r, DiffBackend backend = DiffBackend::automatic);

/// Value plus derivatives up to `order` (0..2) in one evaluation.
FieldSample sample_field(const BeamSpec& spec, const Vec3& r, int order,
                         DiffBackend backend = DiffBackend::automatic);

BeamSpec make_lg(int l, int p, int sigma, double waist, double wavelength);
BeamSpec make_hg(int m, int n, int sigma, double waist, double wavelength);

enum class VectorBeamKind { radial, azimuthal };
/// Cylindrical-vector beams as 1/sqrt2 [LG(1,0,-1) +/- LG(-1,0,+1)].
BeamSpec make_radial_azimuthal(VectorBeamKind kind, double waist, double wavelength);

} // namespace tl
