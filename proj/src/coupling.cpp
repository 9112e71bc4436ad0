#include "tensorlight/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "tensorlight/special_functions.hpp"

namespace tl {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr int slot(int i, int j) { return 3 * i + j; }
enum Axis { X = 0, Y = 1, Z = 2 };

// Slot values seen by the multipole: field components (E1) or gradients (E2).
CouplingCoefficients::Slots slot_values(const FieldSample& s, Multipole m) {
  CouplingCoefficients::Slots v{};
  if (m == Multipole::E1) {
    for (int j = 0; j < 3; ++j) v[j] = s.E[j];
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v[slot(i, j)] = s.jacobian[i][j];
  }
  return v;
}

// The same slots differentiated along `n`.
CouplingCoefficients::Slots derivative_slot_values(const FieldSample& s, Multipole m, const Vec3& n) {
  CouplingCoefficients::Slots v{};
  for (int p = 0; p < 3; ++p) {
    if (n[p] == 0.0) continue;
    if (m == Multipole::E1) {
      for (int j = 0; j < 3; ++j) v[j] += n[p] * s.jacobian[p][j];
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[slot(i, j)] += n[p] * s.hessian[p][i][j];
    }
  }
  return v;
}

Complex contract(const CouplingCoefficients::Slots& w, const CouplingCoefficients::Slots& v, int n) {
  Complex sum = 0.0;
  for (int k = 0; k < n; ++k) sum += w[k] * v[k];
  return sum;
}

} // namespace

const char* to_string(Multipole m) {
  switch (m) {
  case Multipole::E1: return "E1";
  case Multipole::E2_dJ1: return "E2_dJ1";
  case Multipole::E2_dJ2: return "E2_dJ2";
  }
  return "?";
}

TransitionSpec::TransitionSpec(HalfInt j1_, HalfInt m1_, HalfInt j2_, HalfInt m2_, Multipole multipole_)
    : j1(j1_), m1(m1_), j2(j2_), m2(m2_), multipole(multipole_) {
  if (!valid_projection(j1, m1))
    throw std::domain_error("invalid initial state J1=" + j1.to_string() + ", m1=" + m1.to_string());
  if (!valid_projection(j2, m2))
    throw std::domain_error("invalid final state J2=" + j2.to_string() + ", m2=" + m2.to_string());
}

bool TransitionSpec::triangle_allowed() const { return triangle(j1, HalfInt(tensor_rank(multipole)), j2); }

Geometry::Geometry(double theta_, const Vec3& axis_) : theta(theta_), axis(axis_) {
  if (std::abs(norm(axis) - 1.0) > 1e-12) throw std::domain_error("rotation axis must be a unit vector");
}

CouplingCoefficients::CouplingCoefficients(int rank, int slots)
    : rank_(rank), slots_(slots), channels_(2 * rank + 1) {}

CouplingCoefficients coefficients_for(Multipole multipole) {
  switch (multipole) {
  case Multipole::E1: {
    CouplingCoefficients c(1, 3);
    c.channel(+1)[X] = -1.0;
    c.channel(+1)[Y] = kI;
    c.channel(0)[Z] = std::sqrt(2.0);
    c.channel(-1)[X] = 1.0;
    c.channel(-1)[Y] = kI;
    return c;
  }
  case Multipole::E2_dJ1: {
    CouplingCoefficients c(1, 9);
    auto& p = c.channel(+1);
    p[slot(X, Z)] = -1.0;
    p[slot(Y, Z)] = kI;
    p[slot(Z, X)] = 1.0;
    p[slot(Z, Y)] = -kI;
    auto& o = c.channel(0);
    o[slot(X, Y)] = -std::sqrt(2.0) * kI;
    o[slot(Y, X)] = std::sqrt(2.0) * kI;
    auto& n = c.channel(-1);
    n[slot(X, Z)] = -1.0;
    n[slot(Y, Z)] = -kI;
    n[slot(Z, X)] = 1.0;
    n[slot(Z, Y)] = kI;
    return c;
  }
  case Multipole::E2_dJ2: {
    CouplingCoefficients c(2, 9);
    auto& p2 = c.channel(+2);
    p2[slot(X, X)] = 1.0;
    p2[slot(Y, Y)] = -1.0;
    p2[slot(X, Y)] = -kI;
    p2[slot(Y, X)] = -kI;
    auto& p1 = c.channel(+1);
    p1[slot(X, Z)] = -1.0;
    p1[slot(Z, X)] = -1.0;
    p1[slot(Y, Z)] = kI;
    p1[slot(Z, Y)] = kI;
    const double s = std::sqrt(2.0 / 3.0);
    auto& o = c.channel(0);
    o[slot(X, X)] = -s;
    o[slot(Y, Y)] = -s;
    o[slot(Z, Z)] = 2.0 * s;
    auto& n1 = c.channel(-1);
    n1[slot(X, Z)] = 1.0;
    n1[slot(Z, X)] = 1.0;
    n1[slot(Y, Z)] = kI;
    n1[slot(Z, Y)] = kI;
    auto& n2 = c.channel(-2);
    n2[slot(X, X)] = 1.0;
    n2[slot(Y, Y)] = -1.0;
    n2[slot(X, Y)] = kI;
    n2[slot(Y, X)] = kI;
    return c;
  }
  }
  throw std::invalid_argument("unknown multipole");
}

CouplingCoefficients rotate_coefficients(const CouplingCoefficients& coefficients, const Geometry& geometry) {
  if (geometry.theta == 0.0) return coefficients;
  const int rank = coefficients.rank();
  const HalfInt j(rank);
  const EulerAngles e = euler_zyz(geometry.rotation());
  CouplingCoefficients out(rank, coefficients.slots());
  for (int m = -rank; m <= rank; ++m) {
    auto& target = out.channel(m);
    for (int mp = -rank; mp <= rank; ++mp) {
      const Complex d = wigner_big_d(j, HalfInt(m), HalfInt(mp), e.alpha, e.beta, e.gamma);
      if (d == Complex(0.0)) continue;
      const auto& source = coefficients.channel(mp);
      for (int k = 0; k < coefficients.slots(); ++k) target[k] += d * source[k];
    }
  }
  return out;
}

TransitionKernel::TransitionKernel(const TransitionSpec& t, const Geometry& geometry) : multipole_(t.multipole) {
  if (!t.triangle_allowed()) return;
  const int rank = tensor_rank(t.multipole);
  const CouplingCoefficients c = rotate_coefficients(coefficients_for(t.multipole), geometry);
  for (int dm = -rank; dm <= rank; ++dm) {
    const double cg = clebsch_gordan(t.j1, t.m1, HalfInt(rank), HalfInt(dm), t.j2, t.m2);
    if (cg == 0.0) continue;
    forbidden_ = false;
    const auto& ch = c.channel(dm);
    for (int k = 0; k < c.slots(); ++k) weights_[k] += cg * ch[k];
  }
}

Complex TransitionKernel::strength(const FieldSample& sample) const {
  if (forbidden_) return 0.0;
  return contract(weights_, slot_values(sample, multipole_), slot_count(multipole_));
}

Complex TransitionKernel::derivative(const FieldSample& sample, const Vec3& direction) const {
  if (forbidden_) return 0.0;
  return contract(weights_, derivative_slot_values(sample, multipole_, direction), slot_count(multipole_));
}

namespace {

double weight_norm(const CouplingCoefficients::Slots& w, int slots) {
  double sum = 0.0;
  for (int k = 0; k < slots; ++k) sum += std::norm(w[k]);
  return std::sqrt(sum);
}

} // namespace

double TransitionKernel::magnitude_scale(const FieldSample& sample) const {
  if (forbidden_) return 0.0;
  const int slots = slot_count(multipole_);
  const auto v = slot_values(sample, multipole_);
  double sum = 0.0;
  for (int k = 0; k < slots; ++k) sum += std::norm(v[k]);
  return weight_norm(weights_, slots) * std::sqrt(sum);
}

double TransitionKernel::derivative_magnitude_scale(const FieldSample& sample, const Vec3& direction) const {
  if (forbidden_) return 0.0;
  const int slots = slot_count(multipole_);
  double total = 0.0;
  for (int p = 0; p < 3; ++p) {
    if (direction[p] == 0.0) continue;
    double sum = 0.0;
    for (int k = 0; k < slots; ++k)
      sum += std::norm(multipole_ == Multipole::E1 ? sample.jacobian[p][k] : sample.hessian[p][k / 3][k % 3]);
    total += std::abs(direction[p]) * std::sqrt(sum);
  }
  return weight_norm(weights_, slots) * total;
}

Complex relative_strength(const FieldSample& sample, const TransitionSpec& transition, const Geometry& geometry) {
  return TransitionKernel(transition, geometry).strength(sample);
}

namespace {

template <typename Accumulate>
void gaussian_average(const Vec3& center, const Vec3& widths, int order, Accumulate&& accumulate) {
  for (double w : widths)
    if (!(w > 0.0)) throw std::domain_error("wavefunction widths must be positive");
  const QuadratureRule rule = gauss_hermite(order);
  // int g(R) N(R; 0, s^2) dR = pi^{-1/2} sum_k w_k g(sqrt2 s x_k)
  const double norm = std::pow(kPi, -1.5);
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c) {
        const Vec3 offset{std::sqrt(2.0) * widths[0] * rule.nodes[a], std::sqrt(2.0) * widths[1] * rule.nodes[b],
                          std::sqrt(2.0) * widths[2] * rule.nodes[c]};
        accumulate(center + offset, norm * rule.weights[a] * rule.weights[b] * rule.weights[c]);
      }
}

} // namespace

Complex averaged_strength(const BeamSpec& spec, const Vec3& center, const Vec3& widths,
                          const TransitionSpec& transition, const Geometry& geometry, int quadrature_order,
                          DiffBackend backend) {
  const TransitionKernel kernel(transition, geometry);
  Complex sum = 0.0;
  gaussian_average(center, widths, quadrature_order, [&](const Vec3& r, double w) {
    if (!kernel.forbidden())
      sum += w * kernel.strength(sample_field(spec, r, field_order(transition.multipole), backend));
  });
  return sum;
}

double averaged_squared_strength(const BeamSpec& spec, const Vec3& center, const Vec3& widths,
                                 const TransitionSpec& transition, const Geometry& geometry,
                                 int quadrature_order, DiffBackend backend) {
  const TransitionKernel kernel(transition, geometry);
  double sum = 0.0;
  gaussian_average(center, widths, quadrature_order, [&](const Vec3& r, double w) {
    if (!kernel.forbidden())
      sum += w * std::norm(kernel.strength(sample_field(spec, r, field_order(transition.multipole), backend)));
  });
  return sum;
}

FieldSample rotate_sample(const FieldSample& s, const Mat3& R) {
  FieldSample out;
  out.order = s.order;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (R[a][b] == 0.0) continue;
      out.E[a] += R[a][b] * s.E[b];
    }
  if (s.order >= 1)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) out.jacobian[i][j] += R[i][a] * R[j][b] * s.jacobian[a][b];
  if (s.order >= 2)
    for (int p = 0; p < 3; ++p)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b)
                out.hessian[p][i][j] += R[p][c] * R[i][a] * R[j][b] * s.hessian[c][a][b];
  return out;
}

} // namespace tl
