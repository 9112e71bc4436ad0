#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tensorlight/beam.hpp"
#include "tensorlight/coupling.hpp"
#include "tensorlight/motion.hpp"

namespace tl {

/// Rectangular grid in the plane z = `z`. Nodes sit at cell centres:
/// x_i = x_min + (i + 1/2)(x_max - x_min)/nx.
struct GridSpec {
  double x_min = -2e-6;
  double x_max = 2e-6;
  double y_min = -2e-6;
  double y_max = 2e-6;
  int nx = 256;
  int ny = 256;
  double z = 0.0;

  /// Throws ConfigError unless nx, ny >= 2 and the extents are increasing.
  void validate() const;
  // Offsets from the grid centre keep mirror nodes exactly symmetric.
  double x(int i) const { return 0.5 * (x_min + x_max) + (i + 0.5 - 0.5 * nx) * cell_x(); }
  double y(int j) const { return 0.5 * (y_min + y_max) + (j + 0.5 - 0.5 * ny) * cell_y(); }
  double cell_x() const { return (x_max - x_min) / nx; }
  double cell_y() const { return (y_max - y_min) / ny; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  /// Row-major index, rows along y.
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  bool operator==(const GridSpec&) const = default;
};

/// Square grid over [-half_width, half_width]^2.
GridSpec square_grid(double half_width, int resolution, double z = 0.0);

enum class FieldComponent { Ez, Esigma_plus, Esigma_minus, Ex, Ey };
const char* to_string(FieldComponent c);

enum class ObservableKind { field_component, strength, sideband };

/// Scalar quantity evaluated at every grid node. For sidebands the trap
/// centre follows the grid node; trap.center is ignored.
struct Observable {
  ObservableKind kind = ObservableKind::field_component;
  FieldComponent component = FieldComponent::Ez;
  std::optional<TransitionSpec> transition;
  Geometry geometry;
  std::optional<TrapSpec> trap;
  SidebandRequest sideband;
  /// Divide sidebands by the Lamb-Dicke parameter of their mode: the
  /// longitudinal one for mode Z, the transverse one for X and Y.
  bool lamb_dicke_rescale = false;

  /// Derivative order of the field needed at each node.
  int field_order() const;
  /// Throws ConfigError on missing or inconsistent parameters.
  void validate() const;
  std::string label() const;
};

Observable field_observable(FieldComponent component);
Observable strength_observable(const TransitionSpec& transition, const Geometry& geometry = {});
Observable sideband_observable(const TransitionSpec& transition, const Geometry& geometry, const TrapSpec& trap,
                               const SidebandRequest& request, bool lamb_dicke_rescale);

struct ScanConfig {
  GridSpec grid;
  BeamSpec beam;
  Observable observable;
  DiffBackend backend = DiffBackend::automatic;
  bool keep_complex = false;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Field samples at every node of a grid.
struct FieldGrid {
  GridSpec grid;
  int order = 0;
  std::vector<FieldSample> samples;
};

struct MapDataset {
  GridSpec grid;
  std::string label;
  /// Normalized moduli |raw| / scale_factor, row-major; all 0 for a null map.
  std::vector<double> values;
  /// Raw complex values, present only when requested.
  std::vector<Complex> complex_values;
  /// Global maximum of the raw moduli, or 0 for a null map.
  double scale_factor = 0.0;
  std::string tool_version;
  std::string timestamp;
};

struct MapDifference {
  double max_abs_diff = 0.0;
  double rms_diff = 0.0;
};

/// Maps with a maximum modulus at or below this fraction of the reference
/// scale of the summed terms are reported as identically zero.
inline constexpr double kNullMapThreshold = 1e-12;

/// Samples the field on the grid. Evaluation order and thread count do not
/// change the result. Throws NumericalError on a non-finite value.
FieldGrid sample_grid(const BeamSpec& beam, const GridSpec& grid, int order, DiffBackend backend = DiffBackend::automatic,
                      unsigned threads = 0);

/// Evaluates an observable on already sampled fields. Throws ConfigError when
/// the samples lack the derivative order the observable needs.
MapDataset evaluate(const FieldGrid& fields, const BeamSpec& beam, const Observable& observable,
                    bool keep_complex = false);

MapDataset run_scan(const ScanConfig& config);

/// Several observables of one beam on one grid, sharing the field samples.
std::vector<MapDataset> run_scans(const BeamSpec& beam, const GridSpec& grid, const std::vector<Observable>& observables,
                                  DiffBackend backend = DiffBackend::automatic, bool keep_complex = false,
                                  unsigned threads = 0);

/// Elementwise statistics on normalized values. Throws std::invalid_argument
/// when the grids differ.
MapDifference compare_maps(const MapDataset& a, const MapDataset& b);

/// Node of the largest normalized value (first in row-major order on ties).
std::pair<int, int> argmax(const MapDataset& map);

std::string utc_timestamp();

} // namespace tl
