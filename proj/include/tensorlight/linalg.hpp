#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace tl {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;
using CVec3 = std::array<Complex, 3>;
/// m[i][j]; for field Jacobians m[i][j] = d_i E_j.
using CMat3 = std::array<CVec3, 3>;
/// t[p][i][j] = d_p d_i E_j.
using CTensor3 = std::array<CMat3, 3>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Rotation by `angle` (radians, right-handed) about the unit vector `axis`.
Mat3 rotation_matrix(const Vec3& axis, double angle);

Mat3 transpose(const Mat3& m);
Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& m, const Vec3& v);

/// Z-Y-Z Euler angles (alpha, beta, gamma) with R = Rz(alpha) Ry(beta) Rz(gamma)
/// and beta in [0, pi].
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};
EulerAngles euler_zyz(const Mat3& r);

} // namespace tl
