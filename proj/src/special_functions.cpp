#include "tensorlight/special_functions.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace tl {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

const cpp_int& exact_factorial(int n) {
  static const std::vector<cpp_int> table = [] {
    std::vector<cpp_int> t(171);
    t[0] = 1;
    for (int i = 1; i < static_cast<int>(t.size()); ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n >= static_cast<int>(table.size()))
    throw std::domain_error("factorial argument out of range");
  return table[n];
}

// Factorials as doubles; exact up to 22!.
double factorial(int n) {
  static const std::array<double, 171> table = [] {
    std::array<double, 171> t{};
    t[0] = 1.0;
    for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n > 170) throw std::domain_error("factorial argument out of range");
  return table[n];
}

double int_pow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void require_projection(HalfInt j, HalfInt m, const char* what) {
  if (!valid_projection(j, m))
    throw std::domain_error(std::string("invalid angular momentum pair for ") + what + ": j=" +
                            j.to_string() + ", m=" + m.to_string());
}

} // namespace

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  require_projection(j1, m1, "j1");
  require_projection(j2, m2, "j2");
  require_projection(J, M, "J");
  if (m1 + m2 != M || !triangle(j1, j2, J)) return 0.0;

  // All arguments below are integers because of the checks above.
  const int a = (j1 + j2 - J).twice() / 2;
  const int b = (j1 - m1).twice() / 2;
  const int c = (j2 + m2).twice() / 2;
  const int d = (J - j2 + m1).twice() / 2;
  const int e = (J - j1 - m2).twice() / 2;

  // Racah: CG = sqrt(prefactor) * sum_k (-1)^k / (k! (a-k)! (b-k)! (c-k)! (d+k)! (e+k)!)
  cpp_rational sum = 0;
  const int k_min = std::max({0, -d, -e});
  const int k_max = std::min({a, b, c});
  for (int k = k_min; k <= k_max; ++k) {
    cpp_int denom = exact_factorial(k) * exact_factorial(a - k) * exact_factorial(b - k) *
                    exact_factorial(c - k) * exact_factorial(d + k) * exact_factorial(e + k);
    cpp_rational term(cpp_int(1), denom);
    if (k % 2 != 0) term = -term;
    sum += term;
  }
  if (sum == 0) return 0.0;

  auto f = [](HalfInt h) { return exact_factorial(h.twice() / 2); };
  cpp_int num = cpp_int(J.twice() + 1) * f(J + j1 - j2) * f(J - j1 + j2) * f(j1 + j2 - J) *
                f(J + M) * f(J - M) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2);
  cpp_rational squared = cpp_rational(num, f(j1 + j2 + J + HalfInt(1))) * sum * sum;
  const double magnitude = std::sqrt(squared.convert_to<double>());
  return sum > 0 ? magnitude : -magnitude;
}

double wigner_small_d(HalfInt j, HalfInt m_out, HalfInt m_in, double theta) {
  require_projection(j, m_out, "m_out");
  require_projection(j, m_in, "m_in");
  const int jpm_in = (j + m_in).twice() / 2;
  const int jmm_in = (j - m_in).twice() / 2;
  const int jpm_out = (j + m_out).twice() / 2;
  const int jmm_out = (j - m_out).twice() / 2;
  const int dm = (m_out - m_in).twice() / 2;

  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double root = std::sqrt(factorial(jpm_out) * factorial(jmm_out) * factorial(jpm_in) * factorial(jmm_in));

  double sum = 0.0;
  const int k_min = std::max(0, -dm);
  const int k_max = std::min(jpm_in, jmm_out);
  const int two_j = j.twice();
  for (int k = k_min; k <= k_max; ++k) {
    const double denom = factorial(jpm_in - k) * factorial(k) * factorial(dm + k) * factorial(jmm_out - k);
    const double term = int_pow(c, two_j - dm - 2 * k) * int_pow(s, dm + 2 * k) / denom;
    sum += ((dm + k) % 2 == 0) ? term : -term;
  }
  return root * sum;
}

std::complex<double> wigner_big_d(HalfInt j, HalfInt m_out, HalfInt m_in, double alpha, double beta,
                                  double gamma) {
  const double small = wigner_small_d(j, m_out, m_in, beta);
  const double phase = -(m_out.value() * alpha + m_in.value() * gamma);
  if (phase == 0.0) return {small, 0.0};
  return std::polar(small, phase);
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw std::domain_error("quadrature order must be >= 1");
  constexpr double kPiToMinusQuarter = 0.7511255444649425;
  const int n = order;
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  auto& x = rule.nodes;
  auto& w = rule.weights;

  // Newton iteration on the orthonormal Hermite recurrence, largest root first.
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];

    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = kPiToMinusQuarter;
      double p2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (k + 1)) * p2 - std::sqrt(static_cast<double>(k) / (k + 1)) * p3;
      }
      derivative = std::sqrt(2.0 * n) * p2;
      const double step = p1 / derivative;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (n % 2 == 1 && i == n / 2) z = 0.0;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (derivative * derivative);
    w[n - 1 - i] = w[i];
  }
  return rule;
}

} // namespace tl
