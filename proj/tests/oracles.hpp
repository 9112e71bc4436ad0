#pragma once

// Reference implementations used only by the tests. They follow different
// formulas from the library so that agreement is evidence, not tautology.

#include <vector>

#include "tensorlight/beam.hpp"
#include "tensorlight/coupling.hpp"
#include "tensorlight/half_int.hpp"

namespace oracle {

using tl::Complex;
using tl::HalfInt;
using tl::Vec3;
using tl::operator+;
using tl::operator-;
using tl::operator*;

/// Explicit-sum Laguerre and Hermite polynomials in 50-digit arithmetic.
double laguerre_sum(int p, int alpha, double x);
double hermite_sum(int n, double x);

/// Clebsch-Gordan coefficient built from coupled states obtained by repeated
/// application of the total lowering operator and Gram-Schmidt, with the
/// Condon-Shortley phase <j1 j1; j2 J-j1 | J J> > 0.
double cg_lowering(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

/// d^j(theta) as the matrix exponential exp(-i theta J_y); rows and columns
/// ordered m = j, j-1, ..., -j.
std::vector<std::vector<double>> wigner_d_matrix(HalfInt j, double theta);

/// Mode functions from the textbook cylindrical / Cartesian forms with beam
/// radius, curvature and Gouy phase written out.
Complex lg_cylindrical(int l, int p, double w0, double k, const Vec3& r);
Complex hg_cartesian(int m, int n, double w0, double k, const Vec3& r);

/// Fourth-order central differences of the library's field value with step
/// h = 1e-4 lambda; mixed second derivatives use the nested stencil.
tl::CMat3 fd_jacobian(const tl::BeamSpec& spec, const Vec3& r);
tl::CTensor3 fd_hessian(const tl::BeamSpec& spec, const Vec3& r);

/// Fourth-order central difference of mu along `direction`.
Complex fd_mu_derivative(const tl::BeamSpec& spec, const Vec3& r, const Vec3& direction,
                         const tl::TransitionSpec& t, const tl::Geometry& g);

/// mu with unrotated coefficients evaluated on the field expressed in the
/// frame rotated by R (explicit index loops).
Complex mu_field_rotation(const tl::FieldSample& sample, const tl::TransitionSpec& t, const tl::Mat3& R);

/// max |a - b| / max |a| over all entries.
double relative_error(const tl::CMat3& a, const tl::CMat3& b);
double relative_error(const tl::CTensor3& a, const tl::CTensor3& b);

/// The five beam families of the figures plus the azimuthal beam:
/// Gaussian, HG10, LG(1,+1), LG(1,-1), radial, azimuthal (w0 = 1 um,
/// lambda = 729 nm, sigma = +1 where applicable).
struct NamedBeam {
  const char* name;
  tl::BeamSpec spec;
};
std::vector<NamedBeam> figure_beams();

/// 17 deterministic probe points within the focal region of a 1 um waist.
std::vector<Vec3> probe_points();

} // namespace oracle
