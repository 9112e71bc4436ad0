#include "tensorlight/scan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tensorlight/error.hpp"
#include "tensorlight/version.hpp"

namespace tl {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw ConfigError("grid resolution must be at least 2 x 2");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("grid extent must satisfy x_max > x_min and y_max > y_min");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) || !std::isfinite(y_max) ||
      !std::isfinite(z))
    throw ConfigError("grid extent must be finite");
}

GridSpec square_grid(double half_width, int resolution, double z) {
  GridSpec g;
  g.x_min = g.y_min = -half_width;
  g.x_max = g.y_max = half_width;
  g.nx = g.ny = resolution;
  g.z = z;
  return g;
}

const char* to_string(FieldComponent c) {
  switch (c) {
  case FieldComponent::Ez: return "Ez";
  case FieldComponent::Esigma_plus: return "Esigma+";
  case FieldComponent::Esigma_minus: return "Esigma-";
  case FieldComponent::Ex: return "Ex";
  case FieldComponent::Ey: return "Ey";
  }
  return "?";
}

int Observable::field_order() const {
  switch (kind) {
  case ObservableKind::field_component: return 0;
  case ObservableKind::strength: return tl::field_order(transition->multipole);
  case ObservableKind::sideband:
    return tl::field_order(transition->multipole) + (sideband.branch == SidebandBranch::carrier ? 0 : 1);
  }
  return 0;
}

void Observable::validate() const {
  if (kind == ObservableKind::field_component) return;
  if (!transition) throw ConfigError("observable '" + label() + "' needs a transition");
  if (kind == ObservableKind::sideband) {
    if (!trap) throw ConfigError("sideband observable needs a trap");
    if (sideband.n < 0) throw ConfigError("sideband quantum number n must be non-negative");
    try {
      TrapSpec t = *trap;
      t.center = {};
      t.validate();
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("trap: ") + e.what());
    }
  }
}

std::string Observable::label() const {
  std::ostringstream os;
  switch (kind) {
  case ObservableKind::field_component: os << to_string(component); break;
  case ObservableKind::strength:
  case ObservableKind::sideband:
    if (kind == ObservableKind::strength) {
      os << "mu";
    } else if (sideband.branch == SidebandBranch::carrier) {
      os << "carrier";
    } else {
      os << to_string(sideband.branch) << "_" << to_string(sideband.mode) << "_n" << sideband.n;
    }
    if (transition) os << "_" << to_string(transition->multipole) << "_dm" << transition->delta_m().to_string();
    break;
  }
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '/', '|');
  return s;
}

Observable field_observable(FieldComponent component) {
  Observable o;
  o.kind = ObservableKind::field_component;
  o.component = component;
  return o;
}

Observable strength_observable(const TransitionSpec& transition, const Geometry& geometry) {
  Observable o;
  o.kind = ObservableKind::strength;
  o.transition = transition;
  o.geometry = geometry;
  return o;
}

Observable sideband_observable(const TransitionSpec& transition, const Geometry& geometry, const TrapSpec& trap,
                               const SidebandRequest& request, bool lamb_dicke_rescale) {
  Observable o;
  o.kind = ObservableKind::sideband;
  o.transition = transition;
  o.geometry = geometry;
  o.trap = trap;
  o.sideband = request;
  o.lamb_dicke_rescale = lamb_dicke_rescale;
  return o;
}

namespace {

unsigned worker_count(unsigned requested, std::size_t rows) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, rows));
}

bool finite(const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

bool finite(const FieldSample& s) {
  for (int i = 0; i < 3; ++i) {
    if (!finite(s.E[i])) return false;
    for (int j = 0; j < 3; ++j) {
      if (!finite(s.jacobian[i][j])) return false;
      for (int k = 0; k < 3; ++k)
        if (!finite(s.hessian[i][j][k])) return false;
    }
  }
  return true;
}

std::string node_name(const GridSpec& g, int i, int j) {
  std::ostringstream os;
  os << "(x=" << g.x(i) << ", y=" << g.y(j) << ", z=" << g.z << ")";
  return os.str();
}

// Rows are dealt round-robin to the workers; every node is computed
// independently, so the result does not depend on the partition.
template <typename RowTask>
void for_each_row(int rows, unsigned threads, RowTask&& task) {
  const unsigned workers = worker_count(threads, static_cast<std::size_t>(rows));
  if (workers <= 1) {
    for (int j = 0; j < rows; ++j) task(j);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int j = static_cast<int>(w); j < rows; j += static_cast<int>(workers)) task(j);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Complex component_of(const CVec3& E, FieldComponent c) {
  switch (c) {
  case FieldComponent::Ez: return E[2];
  case FieldComponent::Esigma_plus: return field_components(E).sigma_plus;
  case FieldComponent::Esigma_minus: return field_components(E).sigma_minus;
  case FieldComponent::Ex: return E[0];
  case FieldComponent::Ey: return E[1];
  }
  return 0.0;
}

double field_modulus(const CVec3& E) { return std::sqrt(std::norm(E[0]) + std::norm(E[1]) + std::norm(E[2])); }

} // namespace

FieldGrid sample_grid(const BeamSpec& beam, const GridSpec& grid, int order, DiffBackend backend, unsigned threads) {
  grid.validate();
  if (order < 0 || order > 2) throw std::invalid_argument("field derivative order must be 0, 1 or 2");
  FieldGrid out{grid, order, std::vector<FieldSample>(grid.size())};
  for_each_row(grid.ny, threads, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      FieldSample s = sample_field(beam, {grid.x(i), grid.y(j), grid.z}, order, backend);
      if (!finite(s)) throw NumericalError("non-finite field value at " + node_name(grid, i, j));
      out.samples[grid.index(i, j)] = s;
    }
  });
  return out;
}

MapDataset evaluate(const FieldGrid& fields, const BeamSpec& beam, const Observable& observable, bool keep_complex) {
  observable.validate();
  if (fields.order < observable.field_order())
    throw ConfigError("field samples of order " + std::to_string(fields.order) + " cannot serve observable '" +
                      observable.label() + "'");
  const GridSpec& grid = fields.grid;
  std::vector<Complex> raw(grid.size());
  double reference = 0.0;

  switch (observable.kind) {
  case ObservableKind::field_component:
    for (std::size_t n = 0; n < raw.size(); ++n) {
      raw[n] = component_of(fields.samples[n].E, observable.component);
      reference = std::max(reference, field_modulus(fields.samples[n].E));
    }
    break;
  case ObservableKind::strength: {
    const TransitionKernel kernel(*observable.transition, observable.geometry);
    for (std::size_t n = 0; n < raw.size(); ++n) {
      raw[n] = kernel.strength(fields.samples[n]);
      reference = std::max(reference, kernel.magnitude_scale(fields.samples[n]));
    }
    break;
  }
  case ObservableKind::sideband: {
    const TransitionKernel kernel(*observable.transition, observable.geometry);
    const TrapSpec& trap = *observable.trap;
    const SidebandRequest& req = observable.sideband;
    const int q = static_cast<int>(req.mode);
    double rescale = 1.0;
    if (observable.lamb_dicke_rescale && req.branch != SidebandBranch::carrier) {
      rescale = req.mode == TrapMode::Z
                    ? lamb_dicke(LambDickeKind::longitudinal, beam.wavenumber(), trap.mass, trap.frequencies[q])
                    : lamb_dicke(LambDickeKind::transverse, beam.waist(), trap.mass, trap.frequencies[q]);
    }
    const double occupation = req.branch == SidebandBranch::bsb ? req.n + 1.0 : req.n;
    const double sideband_factor = zero_point_length(trap.mass, trap.frequencies[q]) * std::sqrt(occupation) / rescale;
    for (std::size_t n = 0; n < raw.size(); ++n) {
      const FieldSample& s = fields.samples[n];
      raw[n] = sideband_from_sample(s, kernel, trap, req) / rescale;
      if (req.branch == SidebandBranch::carrier)
        reference = std::max(reference, kernel.magnitude_scale(s));
      else
        reference = std::max(reference, kernel.derivative_magnitude_scale(s, trap.axes[q]) * sideband_factor);
    }
    break;
  }
  }

  MapDataset out;
  out.grid = grid;
  out.label = observable.label();
  out.values.assign(raw.size(), 0.0);
  double peak = 0.0;
  for (std::size_t n = 0; n < raw.size(); ++n) {
    if (!finite(raw[n]))
      throw NumericalError("non-finite value of '" + out.label + "' at node " + std::to_string(n));
    out.values[n] = std::abs(raw[n]);
    peak = std::max(peak, out.values[n]);
  }
  if (peak > kNullMapThreshold * reference) {
    out.scale_factor = peak;
    for (double& v : out.values) v /= peak;
  } else {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    if (keep_complex) std::fill(raw.begin(), raw.end(), Complex(0.0));
  }
  if (keep_complex) out.complex_values = std::move(raw);
  out.tool_version = kToolVersion;
  out.timestamp = utc_timestamp();
  return out;
}

MapDataset run_scan(const ScanConfig& config) {
  config.grid.validate();
  config.observable.validate();
  const FieldGrid fields =
      sample_grid(config.beam, config.grid, config.observable.field_order(), config.backend, config.threads);
  return evaluate(fields, config.beam, config.observable, config.keep_complex);
}

std::vector<MapDataset> run_scans(const BeamSpec& beam, const GridSpec& grid, const std::vector<Observable>& observables,
                                  DiffBackend backend, bool keep_complex, unsigned threads) {
  grid.validate();
  int order = 0;
  for (const auto& o : observables) {
    o.validate();
    order = std::max(order, o.field_order());
  }
  const FieldGrid fields = sample_grid(beam, grid, order, backend, threads);
  std::vector<MapDataset> out;
  out.reserve(observables.size());
  for (const auto& o : observables) out.push_back(evaluate(fields, beam, o, keep_complex));
  return out;
}

MapDifference compare_maps(const MapDataset& a, const MapDataset& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size())
    throw std::invalid_argument("cannot compare maps on different grids");
  MapDifference d;
  double sum = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    const double diff = std::abs(a.values[n] - b.values[n]);
    d.max_abs_diff = std::max(d.max_abs_diff, diff);
    sum += diff * diff;
  }
  d.rms_diff = a.values.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(a.values.size()));
  return d;
}

std::pair<int, int> argmax(const MapDataset& map) {
  const auto it = std::max_element(map.values.begin(), map.values.end());
  const auto n = static_cast<int>(it - map.values.begin());
  return {n % map.grid.nx, n / map.grid.nx};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace tl
