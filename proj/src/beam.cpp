#include "tensorlight/beam.hpp"

#include <cmath>
#include <stdexcept>

#include "tensorlight/error.hpp"
#include "tensorlight/jet.hpp"
#include "tensorlight/special_functions.hpp"

namespace tl {

namespace {

constexpr Complex kI{0.0, 1.0};

double lg_normalization(int l, int p) {
  // sqrt(2 p! / (pi (p + |l|)!))
  double ratio = 1.0;
  for (int k = p + 1; k <= p + std::abs(l); ++k) ratio /= k;
  return std::sqrt(2.0 * ratio / kPi);
}

double hg_normalization(int m, int n) {
  double denom = std::ldexp(1.0, m + n);
  for (int k = 2; k <= m; ++k) denom *= k;
  for (int k = 2; k <= n; ++k) denom *= k;
  return std::sqrt(2.0 / (kPi * denom));
}

template <int M>
struct Coordinates {
  Jet<M> x, y, z;
  explicit Coordinates(const Vec3& r)
      : x(Jet<M>::variable(0, r[0])), y(Jet<M>::variable(1, r[1])), z(Jet<M>::variable(2, r[2])) {}
};

// u = 1 / (1 + i z / z_R) carries the waist ratio w0/w(z), the Gouy phase and
// the wavefront curvature: exp(-rho^2 u / w0^2) = exp(-rho^2/w^2 + i k rho^2 / 2R).
template <int M>
Jet<M> inverse_beam_parameter(const Jet<M>& z, double zr) {
  return reciprocal(1.0 + (kI / zr) * z);
}

template <int M>
Jet<M> lg_jet(int l, int p, double w0, double k, const Vec3& r) {
  const Coordinates<M> c(r);
  const double zr = 0.5 * k * w0 * w0;
  const double inv_w0_sq = 1.0 / (w0 * w0);
  const int abs_l = std::abs(l);
  const Jet<M> u = inverse_beam_parameter(c.z, zr);
  const Jet<M> rho_sq = c.x * c.x + c.y * c.y;

  Jet<M> f = exp(-inv_w0_sq * (rho_sq * u)) * pow(u, abs_l + 1);
  if (abs_l > 0) {
    // (rho sqrt2 / w0)^|l| e^{i l phi} = (sqrt2/w0)^|l| (x + i sgn(l) y)^|l|
    const Jet<M> vortex = c.x + Complex(0.0, l > 0 ? 1.0 : -1.0) * c.y;
    f = f * pow(vortex, abs_l) * std::pow(std::sqrt(2.0) / w0, abs_l);
  }
  if (p > 0) {
    const Jet<M> gouy_extra = u * reciprocal(conj(u));
    const Jet<M> argument = (2.0 * inv_w0_sq) * (rho_sq * real_part(u));
    f = f * pow(gouy_extra, p) * laguerre(p, abs_l, argument);
  }
  return f * lg_normalization(l, p);
}

template <int M>
Jet<M> hg_jet(int m, int n, double w0, double k, const Vec3& r) {
  const Coordinates<M> c(r);
  const double zr = 0.5 * k * w0 * w0;
  const double inv_w0_sq = 1.0 / (w0 * w0);
  const Jet<M> u = inverse_beam_parameter(c.z, zr);
  const Jet<M> rho_sq = c.x * c.x + c.y * c.y;

  Jet<M> f = exp(-inv_w0_sq * (rho_sq * u)) * u;
  if (m + n > 0) {
    // |u| = w0 / w(z); the Gouy phase beyond the fundamental is (u/|u|)^(m+n).
    const Jet<M> ratio = sqrt(real_part(u));
    const double scale = std::sqrt(2.0) / w0;
    f = f * pow(u * reciprocal(ratio), m + n);
    if (m > 0) f = f * hermite(m, scale * (c.x * ratio));
    if (n > 0) f = f * hermite(n, scale * (c.y * ratio));
  }
  return f * hg_normalization(m, n);
}

template <int M>
Jet<M> mode_jet(const ModeTerm& mode, double w0, double k, const Vec3& r) {
  if (const auto* lg = std::get_if<LaguerreGauss>(&mode.family)) return lg_jet<M>(lg->l, lg->p, w0, k, r);
  if (const auto* hg = std::get_if<HermiteGauss>(&mode.family)) return hg_jet<M>(hg->m, hg->n, w0, k, r);
  throw ConfigError("analytic differentiation requested for a custom mode function");
}

// Field jets of derivative order D for an analytic spec; the mode function is
// expanded one order higher because E_z contains its transverse gradient.
template <int D>
std::array<Jet<D>, 3> field_jets(const BeamSpec& spec, const Vec3& r) {
  const double k = spec.wavenumber();
  std::array<Jet<D>, 3> E;
  for (const auto& term : spec.terms()) {
    const Jet<D + 1> f = mode_jet<D + 1>(term.mode, spec.waist(), k, r);
    const double sigma = term.mode.sigma;
    const Jet<D> f0 = truncate<D>(f);
    const Jet<D> transverse_gradient = differentiate(f, 0) + Complex(0.0, sigma) * differentiate(f, 1);
    E[0] += term.weight * f0;
    E[1] += (term.weight * Complex(0.0, sigma)) * f0;
    E[2] += (term.weight * kI / k) * transverse_gradient;
  }
  const Jet<D> carrier = exp(Complex(0.0, k) * Jet<D>::variable(2, r[2]));
  const double prefactor = spec.amplitude() / std::sqrt(2.0);
  for (auto& component : E) component = (component * carrier) * prefactor;
  return E;
}

template <int D>
FieldSample sample_from_jets(const std::array<Jet<D>, 3>& E) {
  FieldSample s;
  s.order = D;
  for (int j = 0; j < 3; ++j) {
    s.E[j] = E[j].value();
    if constexpr (D >= 1) {
      for (int i = 0; i < 3; ++i) {
        const int e[3] = {i == 0, i == 1, i == 2};
        s.jacobian[i][j] = E[j].partial(e[0], e[1], e[2]);
      }
    }
    if constexpr (D >= 2) {
      for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i) {
          const int e[3] = {(p == 0) + (i == 0), (p == 1) + (i == 1), (p == 2) + (i == 2)};
          s.hessian[p][i][j] = E[j].partial(e[0], e[1], e[2]);
        }
    }
  }
  return s;
}

// Field value of a spec that contains custom modes: the transverse gradient
// in E_z is taken by central differences of the scalar mode.
CVec3 field_value_generic(const BeamSpec& spec, const Vec3& r) {
  const double k = spec.wavenumber();
  const double h = kFiniteDifferenceStep * spec.wavelength();
  CVec3 E{};
  for (const auto& term : spec.terms()) {
    Complex f, dfx, dfy;
    if (const auto* custom = std::get_if<CustomMode>(&term.mode.family)) {
      const auto& fn = *custom->function;
      auto d = [&](int axis) {
        Vec3 step{};
        step[axis] = h;
        return (-fn(r + 2.0 * step) + 8.0 * fn(r + step) - 8.0 * fn(r - step) + fn(r - 2.0 * step)) / (12.0 * h);
      };
      f = fn(r);
      dfx = d(0);
      dfy = d(1);
    } else {
      const Jet<1> jet = mode_jet<1>(term.mode, spec.waist(), k, r);
      f = jet.value();
      dfx = jet.partial(1, 0, 0);
      dfy = jet.partial(0, 1, 0);
    }
    const double sigma = term.mode.sigma;
    E[0] += term.weight * f;
    E[1] += term.weight * Complex(0.0, sigma) * f;
    E[2] += term.weight * (kI / k) * (dfx + Complex(0.0, sigma) * dfy);
  }
  const Complex carrier = std::polar(spec.amplitude() / std::sqrt(2.0), k * r[2]);
  for (auto& c : E) c *= carrier;
  return E;
}

CVec3 field_value(const BeamSpec& spec, const Vec3& r) {
  if (spec.analytic()) return sample_from_jets<0>(field_jets<0>(spec, r)).E;
  return field_value_generic(spec, r);
}

CVec3 axpy(const CVec3& acc, double a, const CVec3& x) {
  return {acc[0] + a * x[0], acc[1] + a * x[1], acc[2] + a * x[2]};
}

// Fourth-order central stencil for a first derivative: offsets +2,+1,-1,-2.
constexpr std::array<double, 4> kOffsets{2.0, 1.0, -1.0, -2.0};
constexpr std::array<double, 4> kWeights{-1.0, 8.0, -8.0, 1.0};

CMat3 fd_jacobian(const BeamSpec& spec, const Vec3& r) {
  const double h = kFiniteDifferenceStep * spec.wavelength();
  CMat3 J{};
  for (int i = 0; i < 3; ++i) {
    CVec3 acc{};
    for (int a = 0; a < 4; ++a) {
      Vec3 q = r;
      q[i] += kOffsets[a] * h;
      acc = axpy(acc, kWeights[a], field_value(spec, q));
    }
    for (int j = 0; j < 3; ++j) J[i][j] = acc[j] / (12.0 * h);
  }
  return J;
}

CTensor3 fd_hessian(const BeamSpec& spec, const Vec3& r) {
  const double h = kFiniteDifferenceStep * spec.wavelength();
  CTensor3 H{};
  const CVec3 center = field_value(spec, r);
  for (int p = 0; p < 3; ++p) {
    // (-f(+2) + 16 f(+1) - 30 f(0) + 16 f(-1) - f(-2)) / 12h^2
    CVec3 acc = axpy(CVec3{}, -30.0, center);
    constexpr std::array<double, 4> second{-1.0, 16.0, 16.0, -1.0};
    for (int a = 0; a < 4; ++a) {
      Vec3 q = r;
      q[p] += kOffsets[a] * h;
      acc = axpy(acc, second[a], field_value(spec, q));
    }
    for (int j = 0; j < 3; ++j) H[p][p][j] = acc[j] / (12.0 * h * h);

    for (int i = p + 1; i < 3; ++i) {
      CVec3 mixed{};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          Vec3 q = r;
          q[p] += kOffsets[a] * h;
          q[i] += kOffsets[b] * h;
          mixed = axpy(mixed, kWeights[a] * kWeights[b], field_value(spec, q));
        }
      for (int j = 0; j < 3; ++j) {
        H[p][i][j] = mixed[j] / (144.0 * h * h);
        H[i][p][j] = H[p][i][j];
      }
    }
  }
  return H;
}

bool use_analytic(const BeamSpec& spec, DiffBackend backend) {
  switch (backend) {
  case DiffBackend::analytic:
    if (!spec.analytic())
      throw ConfigError("analytic backend requested but the beam contains a custom mode function");
    return true;
  case DiffBackend::finite_difference:
    return false;
  case DiffBackend::automatic:
    break;
  }
  return spec.analytic();
}

} // namespace

BeamSpec::BeamSpec(std::vector<BeamTerm> terms, double wavelength, double waist, double amplitude)
    : terms_(std::move(terms)), wavelength_(wavelength), waist_(waist), amplitude_(amplitude) {
  if (!(wavelength_ > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!(waist_ > 0.0)) throw std::invalid_argument("beam waist must be positive");
  if (terms_.empty()) throw std::invalid_argument("beam needs at least one mode term");
  bool any_weight = false;
  for (const auto& t : terms_) {
    if (t.weight != Complex(0.0)) any_weight = true;
    if (t.mode.sigma < -1 || t.mode.sigma > 1) throw std::invalid_argument("sigma must be -1, 0 or +1");
    if (const auto* lg = std::get_if<LaguerreGauss>(&t.mode.family); lg && lg->p < 0)
      throw std::invalid_argument("LG radial index p must be >= 0");
    if (const auto* hg = std::get_if<HermiteGauss>(&t.mode.family); hg && (hg->m < 0 || hg->n < 0))
      throw std::invalid_argument("HG orders must be >= 0");
    if (const auto* c = std::get_if<CustomMode>(&t.mode.family); c && !c->function)
      throw std::invalid_argument("custom mode without a function");
  }
  if (!any_weight) throw std::invalid_argument("beam weights are all zero");
}

bool BeamSpec::analytic() const {
  for (const auto& t : terms_)
    if (std::holds_alternative<CustomMode>(t.mode.family)) return false;
  return true;
}

Complex lg_mode(int l, int p, double w0, double k, const Vec3& r) {
  return lg_jet<0>(l, p, w0, k, r).value();
}

Complex hg_mode(int m, int n, double w0, double k, const Vec3& r) {
  return hg_jet<0>(m, n, w0, k, r).value();
}

CVec3 vector_field(const BeamSpec& spec, const Vec3& r) { return field_value(spec, r); }

FieldComponents field_components(const CVec3& E) {
  return {E[2], E[0] - kI * E[1], E[0] + kI * E[1]};
}

FieldComponents field_components(const BeamSpec& spec, const Vec3& r) {
  return field_components(vector_field(spec, r));
}

CMat3 field_jacobian(const BeamSpec& spec, const Vec3& r, DiffBackend backend) {
  return sample_field(spec, r, 1, backend).jacobian;
}

CTensor3 field_hessian(const BeamSpec& spec, const Vec3& r, DiffBackend backend) {
  if (use_analytic(spec, backend)) return sample_from_jets<2>(field_jets<2>(spec, r)).hessian;
  return fd_hessian(spec, r);
}

FieldSample sample_field(const BeamSpec& spec, const Vec3& r, int order, DiffBackend backend) {
  if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  if (use_analytic(spec, backend)) {
    switch (order) {
    case 0: return sample_from_jets<0>(field_jets<0>(spec, r));
    case 1: return sample_from_jets<1>(field_jets<1>(spec, r));
    default: return sample_from_jets<2>(field_jets<2>(spec, r));
    }
  }
  FieldSample s;
  s.order = order;
  s.E = field_value(spec, r);
  if (order >= 1) s.jacobian = fd_jacobian(spec, r);
  if (order >= 2) s.hessian = fd_hessian(spec, r);
  return s;
}

BeamSpec make_lg(int l, int p, int sigma, double waist, double wavelength) {
  return BeamSpec({BeamTerm{1.0, ModeTerm{LaguerreGauss{l, p}, sigma}}}, wavelength, waist);
}

BeamSpec make_hg(int m, int n, int sigma, double waist, double wavelength) {
  return BeamSpec({BeamTerm{1.0, ModeTerm{HermiteGauss{m, n}, sigma}}}, wavelength, waist);
}

BeamSpec make_radial_azimuthal(VectorBeamKind kind, double waist, double wavelength) {
  const double w = 1.0 / std::sqrt(2.0);
  const double second = kind == VectorBeamKind::radial ? w : -w;
  return BeamSpec({BeamTerm{w, ModeTerm{LaguerreGauss{1, 0}, -1}},
                   BeamTerm{second, ModeTerm{LaguerreGauss{-1, 0}, +1}}},
                  wavelength, waist);
}

} // namespace tl
