#include "tensorlight/motion.hpp"

#include <cmath>
#include <stdexcept>

namespace tl {

const char* to_string(TrapMode q) {
  switch (q) {
  case TrapMode::X: return "X";
  case TrapMode::Y: return "Y";
  case TrapMode::Z: return "Z";
  }
  return "?";
}

const char* to_string(SidebandBranch b) {
  switch (b) {
  case SidebandBranch::carrier: return "carrier";
  case SidebandBranch::bsb: return "bsb";
  case SidebandBranch::rsb: return "rsb";
  }
  return "?";
}

void TrapSpec::validate() const {
  if (!(mass > 0.0)) throw std::domain_error("trap mass must be positive");
  for (double w : frequencies)
    if (!(w > 0.0)) throw std::domain_error("trap frequencies must be positive");
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double expected = a == b ? 1.0 : 0.0;
      if (std::abs(dot(axes[a], axes[b]) - expected) > 1e-12)
        throw std::domain_error("trap mode axes must be orthonormal");
    }
}

double zero_point_length(double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw std::domain_error("mass and frequency must be positive");
  return std::sqrt(kHbar / (2.0 * mass * omega));
}

double lamb_dicke(LambDickeKind kind, double scale, double mass, double omega) {
  if (!(scale > 0.0)) throw std::domain_error("Lamb-Dicke length scale must be positive");
  const double x0 = zero_point_length(mass, omega);
  return kind == LambDickeKind::longitudinal ? scale * x0 : std::sqrt(2.0) / scale * x0;
}

Complex mu_derivative(const BeamSpec& spec, const Vec3& r0, const Vec3& direction, const TransitionSpec& transition,
                      const Geometry& geometry, DiffBackend backend) {
  if (std::abs(norm(direction) - 1.0) > 1e-12) throw std::domain_error("derivative direction must be a unit vector");
  const TransitionKernel kernel(transition, geometry);
  if (kernel.forbidden()) return 0.0;
  const FieldSample s = sample_field(spec, r0, field_order(transition.multipole) + 1, backend);
  return kernel.derivative(s, direction);
}

Complex sideband_from_sample(const FieldSample& sample, const TransitionKernel& kernel, const TrapSpec& trap,
                             const SidebandRequest& request) {
  if (request.n < 0) throw std::domain_error("motional quantum number must be non-negative");
  if (kernel.forbidden()) return 0.0;
  if (request.branch == SidebandBranch::carrier) return kernel.strength(sample);
  const int q = static_cast<int>(request.mode);
  const double occupation = request.branch == SidebandBranch::bsb ? request.n + 1.0 : request.n;
  if (occupation == 0.0) return 0.0;
  if (sample.order < field_order(kernel.multipole()) + 1)
    throw std::logic_error("sideband needs one more derivative level than the carrier");
  const double x0 = zero_point_length(trap.mass, trap.frequencies[q]);
  return kernel.derivative(sample, trap.axes[q]) * x0 * std::sqrt(occupation);
}

Complex sideband_strength(const BeamSpec& spec, const TrapSpec& trap, const SidebandRequest& request,
                          const TransitionSpec& transition, const Geometry& geometry, DiffBackend backend) {
  trap.validate();
  const TransitionKernel kernel(transition, geometry);
  const int order = field_order(transition.multipole) + (request.branch == SidebandBranch::carrier ? 0 : 1);
  return sideband_from_sample(sample_field(spec, trap.center, order, backend), kernel, trap, request);
}

} // namespace tl
