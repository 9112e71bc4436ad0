#pragma once

#include <complex>
#include <vector>

#include "tensorlight/half_int.hpp"

namespace tl {

/// Generalized Laguerre polynomial L_p^alpha(x) by the three-term recurrence.
/// Templated so the same recurrence runs on doubles and on Taylor jets.
template <typename T>
T laguerre(int p, int alpha, const T& x) {
  T previous = T(1.0);
  if (p == 0) return previous;
  T current = (1.0 + alpha) - x;
  for (int k = 1; k < p; ++k) {
    T next = ((2.0 * k + 1.0 + alpha - x) * current - (k + alpha) * previous) * (1.0 / (k + 1.0));
    previous = current;
    current = next;
  }
  return current;
}

/// Physicists' Hermite polynomial H_n(x).
template <typename T>
T hermite(int n, const T& x) {
  T previous = T(1.0);
  if (n == 0) return previous;
  T current = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    T next = 2.0 * x * current - (2.0 * k) * previous;
    previous = current;
    current = next;
  }
  return current;
}

/// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention.
/// Returns exactly 0 for M != m1 + m2 or a violated triangle rule.
/// Throws std::domain_error when some (j, m) pair is not a valid projection.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

/// Wigner small-d element d^j_{m_out, m_in}(theta) by the explicit sum.
double wigner_small_d(HalfInt j, HalfInt m_out, HalfInt m_in, double theta);

/// Wigner D element D^j_{m_out, m_in}(alpha, beta, gamma) for Z-Y-Z Euler angles,
/// e^{-i m_out alpha} d^j_{m_out, m_in}(beta) e^{-i m_in gamma}.
std::complex<double> wigner_big_d(HalfInt j, HalfInt m_out, HalfInt m_in, double alpha, double beta,
                                  double gamma);

/// Gauss-Hermite rule for the weight exp(-x^2): sum_k w_k g(x_k) ~ int g(x) exp(-x^2) dx.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite(int order);

} // namespace tl
