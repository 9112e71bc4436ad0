#include "tensorlight/linalg.hpp"

namespace tl {

Mat3 rotation_matrix(const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const auto [x, y, z] = axis;
  return {{{c + t * x * x, t * x * y - s * z, t * x * z + s * y},
           {t * x * y + s * z, c + t * y * y, t * y * z - s * x},
           {t * x * z - s * y, t * y * z + s * x, c + t * z * z}}};
}

Mat3 transpose(const Mat3& m) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {dot(m[0], v), dot(m[1], v), dot(m[2], v)};
}

EulerAngles euler_zyz(const Mat3& r) {
  EulerAngles e;
  const double sin_beta = std::hypot(r[0][2], r[1][2]);
  e.beta = std::atan2(sin_beta, r[2][2]);
  if (sin_beta > 1e-14) {
    e.alpha = std::atan2(r[1][2], r[0][2]);
    e.gamma = std::atan2(r[2][1], -r[2][0]);
  } else if (r[2][2] > 0.0) {
    // Only alpha + gamma is defined.
    e.alpha = std::atan2(r[1][0], r[0][0]);
  } else {
    // Only alpha - gamma is defined.
    e.alpha = std::atan2(-r[1][0], -r[0][0]);
  }
  return e;
}

} // namespace tl
