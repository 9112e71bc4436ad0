#include <doctest.h>

#include <cmath>

#include "tensorlight/error.hpp"
#include "tensorlight/scan.hpp"

using tl::HalfInt;
using tl::Multipole;

namespace {

constexpr double kW0 = 1e-6;
constexpr double kLambda = 0.729e-6;

tl::TransitionSpec quadrupole(int twice_m2) {
  return {HalfInt::from_twice(1), HalfInt::from_twice(1), HalfInt::from_twice(5), HalfInt::from_twice(twice_m2),
          Multipole::E2_dJ2};
}

tl::TrapSpec default_trap() {
  tl::TrapSpec t;
  t.mass = 40.0 * tl::kAtomicMassUnit;
  t.frequencies = {2.0 * M_PI * 1e6, 2.0 * M_PI * 1e6, 2.0 * M_PI * 1e6};
  return t;
}

tl::MapDataset scan(const tl::BeamSpec& beam, const tl::GridSpec& grid, const tl::Observable& obs,
                    tl::DiffBackend backend = tl::DiffBackend::automatic, unsigned threads = 0) {
  tl::ScanConfig c{grid, beam, obs, backend, false, threads};
  return tl::run_scan(c);
}

double max_value(const tl::MapDataset& m) { return *std::max_element(m.values.begin(), m.values.end()); }

} // namespace

TEST_CASE("grid nodes sit at cell centres") {
  const tl::GridSpec g = tl::square_grid(2e-6, 4);
  CHECK(g.x(0) == doctest::Approx(-1.5e-6).epsilon(1e-14));
  CHECK(g.x(3) == doctest::Approx(1.5e-6).epsilon(1e-14));
  CHECK(g.cell_x() == doctest::Approx(1e-6).epsilon(1e-14));
  const tl::GridSpec odd = tl::square_grid(2e-6, 5);
  CHECK(odd.x(2) == 0.0);
  CHECK(odd.index(1, 2) == 11u);
}

TEST_CASE("grid validation") {
  tl::GridSpec g;
  CHECK_NOTHROW(g.validate());
  g.nx = 1;
  CHECK_THROWS_AS(g.validate(), tl::ConfigError);
  g = {};
  g.x_max = g.x_min;
  CHECK_THROWS_AS(g.validate(), tl::ConfigError);
  g = {};
  g.y_max = std::nan("");
  CHECK_THROWS_AS(g.validate(), tl::ConfigError);
}

TEST_CASE("azimuthal beam has an identically zero Ez map") {
  const auto beam = tl::make_radial_azimuthal(tl::VectorBeamKind::azimuthal, kW0, kLambda);
  for (int res : {33, 64}) {
    const auto m = scan(beam, tl::square_grid(2e-6, res), tl::field_observable(tl::FieldComponent::Ez));
    CHECK(m.scale_factor == 0.0);
    CHECK(max_value(m) == 0.0);
  }
  const auto radial = tl::make_radial_azimuthal(tl::VectorBeamKind::radial, kW0, kLambda);
  const auto m = scan(radial, tl::square_grid(2e-6, 33), tl::field_observable(tl::FieldComponent::Ez));
  CHECK(m.scale_factor > 0.0);
}

TEST_CASE("vortex doughnut in the co-rotating component") {
  const auto beam = tl::make_lg(1, 0, 1, kW0, kLambda);
  const tl::GridSpec g = tl::square_grid(2e-6, 201);
  const auto m = scan(beam, g, tl::field_observable(tl::FieldComponent::Esigma_plus));
  CHECK(m.values[g.index(100, 100)] < 1e-12);
  // Peak radius of rho exp(-rho^2 / w0^2) is w0 / sqrt(2); the map peak lies
  // on a ring of that radius.
  const auto [i, j] = tl::argmax(m);
  const double rho = std::hypot(g.x(i), g.y(j));
  CHECK(std::abs(rho - kW0 / std::sqrt(2.0)) < g.cell_x());
  CHECK(max_value(m) == 1.0);
}

TEST_CASE("ring radius is stable under grid refinement") {
  const auto beam = tl::make_lg(1, 0, 1, kW0, kLambda);
  const auto obs = tl::field_observable(tl::FieldComponent::Esigma_plus);
  const tl::GridSpec coarse = tl::square_grid(2e-6, 51);
  const tl::GridSpec fine = tl::square_grid(2e-6, 101);
  const auto a = scan(beam, coarse, obs);
  const auto b = scan(beam, fine, obs);
  const auto [ia, ja] = tl::argmax(a);
  const auto [ib, jb] = tl::argmax(b);
  const double ra = std::hypot(coarse.x(ia), coarse.y(ja));
  const double rb = std::hypot(fine.x(ib), fine.y(jb));
  CHECK(std::abs(ra - rb) < coarse.cell_x());
}

TEST_CASE("scans are deterministic and independent of the thread count") {
  const auto beam = tl::make_hg(1, 0, 1, kW0, kLambda);
  const tl::GridSpec g = tl::square_grid(2e-6, 37);
  const auto obs = tl::strength_observable(quadrupole(3), tl::Geometry(0.4, {0, 1, 0}));
  const auto a = scan(beam, g, obs, tl::DiffBackend::automatic, 1);
  const auto b = scan(beam, g, obs, tl::DiffBackend::automatic, 1);
  const auto c = scan(beam, g, obs, tl::DiffBackend::automatic, 7);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
  CHECK(a.scale_factor == c.scale_factor);
}

TEST_CASE("normalized maps peak at exactly one") {
  const auto beam = tl::make_lg(1, 0, -1, kW0, kLambda);
  const tl::GridSpec g = tl::square_grid(2e-6, 24);
  for (const auto& obs : {tl::field_observable(tl::FieldComponent::Ez), tl::strength_observable(quadrupole(1)),
                          tl::sideband_observable(quadrupole(3), {}, default_trap(),
                                                  {tl::TrapMode::X, 0, tl::SidebandBranch::bsb}, true)}) {
    const auto m = scan(beam, g, obs);
    CHECK(max_value(m) == 1.0);
    CHECK(m.scale_factor > 0.0);
    for (double v : m.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("complex values are retained on request") {
  const auto beam = tl::make_lg(1, 0, 1, kW0, kLambda);
  const tl::GridSpec g = tl::square_grid(2e-6, 9);
  tl::ScanConfig c{g, beam, tl::field_observable(tl::FieldComponent::Esigma_plus), tl::DiffBackend::automatic, true, 0};
  const auto m = tl::run_scan(c);
  REQUIRE(m.complex_values.size() == g.size());
  for (std::size_t n = 0; n < g.size(); ++n)
    CHECK(std::abs(m.complex_values[n]) / m.scale_factor == doctest::Approx(m.values[n]).epsilon(1e-15));
  const auto x = tl::vector_field(beam, {g.x(3), g.y(5), 0.0});
  CHECK(m.complex_values[g.index(3, 5)] == tl::field_components(x).sigma_plus);
}

TEST_CASE("compare_maps") {
  const auto beam = tl::make_lg(1, 0, -1, kW0, kLambda);
  const tl::GridSpec g = tl::square_grid(2e-6, 17);
  const auto a = scan(beam, g, tl::strength_observable(quadrupole(1)));
  const auto d = tl::compare_maps(a, a);
  CHECK(d.max_abs_diff == 0.0);
  CHECK(d.rms_diff == 0.0);
  auto b = a;
  b.values[0] += 0.5;
  const auto e = tl::compare_maps(a, b);
  CHECK(e.max_abs_diff == doctest::Approx(0.5));
  CHECK(e.rms_diff == doctest::Approx(0.5 / std::sqrt(static_cast<double>(g.size()))));
  const auto other = scan(beam, tl::square_grid(2e-6, 18), tl::strength_observable(quadrupole(1)));
  CHECK_THROWS_AS(tl::compare_maps(a, other), std::invalid_argument);
}

TEST_CASE("untilted geometry reproduces the plain strength map bit for bit") {
  const tl::GridSpec g = tl::square_grid(2e-6, 32);
  for (const auto& beam : {tl::make_lg(1, 0, 1, kW0, kLambda), tl::make_radial_azimuthal(tl::VectorBeamKind::radial, kW0, kLambda)}) {
    const auto maps = tl::run_scans(beam, g,
                                    {tl::strength_observable(quadrupole(1)),
                                     tl::strength_observable(quadrupole(1), tl::Geometry(0.0, {0, 1, 0}))});
    CHECK(tl::compare_maps(maps[0], maps[1]).max_abs_diff == 0.0);
  }
}

TEST_CASE("analytic and finite-difference maps agree") {
  const tl::GridSpec g = tl::square_grid(2e-6, 24);
  const auto trap = default_trap();
  for (const auto& beam : {tl::make_hg(1, 0, 1, kW0, kLambda), tl::make_radial_azimuthal(tl::VectorBeamKind::radial, kW0, kLambda)})
    for (const auto& obs :
         {tl::strength_observable(quadrupole(3), tl::Geometry(0.7, {0, 1, 0})),
          tl::sideband_observable(quadrupole(3), {}, trap, {tl::TrapMode::Y, 0, tl::SidebandBranch::bsb}, true)}) {
      const auto a = scan(beam, g, obs, tl::DiffBackend::analytic);
      const auto b = scan(beam, g, obs, tl::DiffBackend::finite_difference);
      CHECK(tl::compare_maps(a, b).max_abs_diff < 1e-6);
    }
}

TEST_CASE("observable inconsistencies are reported before evaluation") {
  const auto beam = tl::make_lg(0, 0, 1, kW0, kLambda);
  const tl::GridSpec g = tl::square_grid(2e-6, 8);
  auto obs = tl::sideband_observable(quadrupole(3), {}, default_trap(), {tl::TrapMode::X, 0, tl::SidebandBranch::rsb}, false);
  obs.trap.reset();
  CHECK_THROWS_AS(scan(beam, g, obs), tl::ConfigError);
  tl::Observable no_transition;
  no_transition.kind = tl::ObservableKind::strength;
  CHECK_THROWS_AS(scan(beam, g, no_transition), tl::ConfigError);
  auto bad_trap = default_trap();
  bad_trap.frequencies[1] = -1.0;
  CHECK_THROWS_AS(scan(beam, g, tl::sideband_observable(quadrupole(3), {}, bad_trap, {}, false)), tl::ConfigError);
  const auto fields = tl::sample_grid(beam, g, 0);
  CHECK_THROWS_AS(tl::evaluate(fields, beam, tl::strength_observable(quadrupole(3))), tl::ConfigError);
}

TEST_CASE("non-finite field values abort the scan") {
  auto fn = std::make_shared<const std::function<tl::Complex(const tl::Vec3&)>>(
      [](const tl::Vec3& r) { return r[0] > 0.0 ? tl::Complex(std::nan("")) : tl::Complex(1.0); });
  const tl::BeamSpec beam({{1.0, {tl::CustomMode{"bad", fn}, 1}}}, kLambda, kW0);
  CHECK_THROWS_AS(scan(beam, tl::square_grid(2e-6, 8), tl::field_observable(tl::FieldComponent::Ez)),
                  tl::NumericalError);
}

TEST_CASE("ground-state red sideband map is zero") {
  const auto beam = tl::make_lg(1, 0, 1, kW0, kLambda);
  const auto m = scan(beam, tl::square_grid(2e-6, 16),
                      tl::sideband_observable(quadrupole(3), {}, default_trap(),
                                              {tl::TrapMode::X, 0, tl::SidebandBranch::rsb}, true));
  CHECK(m.scale_factor == 0.0);
  CHECK(max_value(m) == 0.0);
}

TEST_CASE("labels") {
  CHECK(tl::field_observable(tl::FieldComponent::Esigma_minus).label() == "Esigma-");
  CHECK(tl::strength_observable(quadrupole(-3)).label() == "mu_E2_dJ2_dm-2");
  CHECK(tl::sideband_observable(quadrupole(3), {}, default_trap(), {tl::TrapMode::Y, 2, tl::SidebandBranch::bsb}, true)
            .label() == "bsb_Y_n2_E2_dJ2_dm1");
  CHECK(tl::sideband_observable(quadrupole(3), {}, default_trap(), {}, true).label() == "carrier_E2_dJ2_dm1");
}
