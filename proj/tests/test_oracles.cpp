#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qad/fem.hpp"
#include "qad/oracles.hpp"

using namespace qad;
using std::numbers::pi;

TEST_CASE("wedge formula structure") {
  const WedgeSpec s{-1.0, pi / 4, 1050e9};
  // hand evaluation: 1 / (1050e9 * 1e-6 * (pi/4 - 1/2))
  CHECK(wedge_strain(s, 1e-6, 0.0).rr == doctest::Approx(3.3372e-6).epsilon(1e-4));
  CHECK(wedge_strain(s, 2e-6, 0.3).rr / wedge_strain(s, 1e-6, 0.3).rr == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(wedge_strain(s, 1e-6, 0.4).rr == wedge_strain(s, 1e-6, -0.4).rr);
  CHECK(wedge_strain(s, 1e-6, 0.4).phi_r == 0.0);
  CHECK(wedge_strain(s, 1e-6, 0.4).phi_phi == 0.0);

  const WedgeSpec wide{-1.0, 0.49 * pi, 1050e9};
  const double ratio = wedge_strain(wide, 1e-6, 0.49 * pi).rr / wedge_strain(wide, 1e-6, 0.0).rr;
  CHECK(ratio == doctest::Approx(std::cos(0.49 * pi)).epsilon(1e-12));

  // the two denominators differ only in the sign of sin(2 theta) / 2
  const double t = 0.15 * pi;
  CHECK(wedge_strain({-1.0, t, 1e9}, 1.0, 0.0).rr / wedge_strain_balanced({-1.0, t, 1e9}, 1.0, 0.0).rr ==
        doctest::Approx((t + 0.5 * std::sin(2 * t)) / (t - 0.5 * std::sin(2 * t))));

  CHECK_THROWS_WITH_AS(wedge_strain(s, 0.0, 0.0), "singular point", Error);
  CHECK_THROWS_WITH_AS(wedge_strain(s, -1e-6, 0.0), "singular point", Error);
  CHECK_THROWS_AS(wedge_strain(s, 1e-6, 1.0), Error);
  CHECK_THROWS_AS(wedge_strain({-1.0, 2.0, 1e9}, 1e-6, 0.0), Error);
}

TEST_CASE("uniform layer is free propagation") {
  const LayerStack one{{{1e-6, 3500.0, 1050e9}}};
  const double v = std::sqrt(1050e9 / 3500.0);
  for (double f : {1e8, 2.3e9, 7.7e9, 1.9e10}) {
    CHECK(layered_dispersion(one, Frequency::from_hz(f)) == doctest::Approx(std::cos(2 * pi * f * 1e-6 / v)).epsilon(1e-12));
  }
  // split into two identical halves: same answer
  const LayerStack two{{{0.4e-6, 3500.0, 1050e9}, {0.6e-6, 3500.0, 1050e9}}};
  CHECK(layered_dispersion(two, Frequency::from_hz(3.3e9)) ==
        doctest::Approx(layered_dispersion(one, Frequency::from_hz(3.3e9))).epsilon(1e-12));
  // edges of the empty lattice are where f a / v is a multiple of 1/2
  const auto edges = band_edges(one, 2.6 * v / 1e-6);
  REQUIRE(edges.size() == 5);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    // grazing roots: D is flat there, so the position is good to ~sqrt(eps)
    CHECK(edges[i].frequency_hz == doctest::Approx(0.5 * (i + 1) * v / 1e-6).epsilon(1e-7));
    CHECK(edges[i].kind == (i % 2 == 0 ? BandEdgeKind::zone_edge : BandEdgeKind::zone_centre));
  }
  CHECK(passbands(one, 2.6 * v / 1e-6).size() == 1);
}

TEST_CASE("trace is invariant under cyclic rotation") {
  const Layer a{0.3e-6, 3500.0, 1050e9}, b{0.5e-6, 1200.0, 90e9}, c{0.2e-6, 7000.0, 400e9};
  for (double f : {5e8, 2.1e9, 6.4e9}) {
    const double x = layered_dispersion({{a, b, c}}, Frequency::from_hz(f));
    CHECK(layered_dispersion({{b, c, a}}, Frequency::from_hz(f)) == doctest::Approx(x).epsilon(1e-10));
    CHECK(layered_dispersion({{c, a, b}}, Frequency::from_hz(f)) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("impedance contrast opens a stop band at the Bragg frequency") {
  // equal wave speeds, impedance ratio 4; quarter-wave layers put the first
  // gap at the Bragg frequency v / 2a
  const double v = 5000.0, a = 1e-6;
  const LayerStack s{{{a / 2, 4000.0, 4000.0 * v * v}, {a / 2, 1000.0, 1000.0 * v * v}}};
  const double fB = v / (2 * a);
  CHECK(std::abs(layered_dispersion(s, Frequency::from_hz(fB))) > 1.0);
  const auto bands = passbands(s, 1.5 * fB);
  REQUIRE(bands.size() >= 2);
  CHECK(bands[0].second < fB);
  CHECK(bands[1].first > fB);
  // exact edges: cos(pi f / fB) = -(1 - r)^2/(1 + r)^2 ... evaluated through D = -1 roots
  CHECK(layered_dispersion(s, Frequency::from_hz(bands[0].second)) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_THROWS_AS(layered_dispersion({{}}, Frequency::from_hz(1e9)), Error);
  CHECK_THROWS_AS(layered_dispersion({{{-1.0, 1.0, 1.0}}}, Frequency::from_hz(1e9)), Error);
}

TEST_CASE("Bloch bands of a layered strip match the transfer matrix") {
  // Y-invariant strip: the lowest shear-horizontal bands are exactly 1D
  // waves with the shear modulus as stiffness
  const IsotropicMaterial hard = IsotropicMaterial::diamond();
  IsotropicMaterial soft = hard;
  soft.E /= 16;
  const double A = 1e-6;
  RectangleGeometry g{A, 0.1e-6};
  g.periodic = true;
  g.layer_cuts = {0.5 * A};
  const auto mesh = generate({g, 0.05e-6});
  const auto sys = assemble(mesh, MaterialMap::layered({0.5 * A}, {hard, soft}), Model::out_of_plane, 0.5e-6);
  const LayerStack stack{{{0.5 * A, hard.rho, hard.shear_modulus()}, {0.5 * A, soft.rho, soft.shear_modulus()}}};

  const auto edges = band_edges(stack, 2e10);
  std::vector<double> centre{0.0}, zone;
  for (const auto& e : edges) (e.kind == BandEdgeKind::zone_centre ? centre : zone).push_back(e.frequency_hz);
  REQUIRE(centre.size() >= 3);
  REQUIRE(zone.size() >= 3);
  const auto f0 = solve_bloch(sys, 0.0, 3), fpi = solve_bloch(sys, pi / A, 3);
  CHECK(f0[0] < 1e-3 * centre[1]);
  for (int i = 1; i < 3; ++i) CHECK(std::abs(f0[i] - centre[i]) < 0.01 * centre[i]);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(fpi[i] - zone[i]) < 0.01 * zone[i]);
  // inside the zone the dispersion relation itself holds
  const double ka = 0.4 * pi;
  for (double f : solve_bloch(sys, ka / A, 3))
    CHECK(layered_dispersion(stack, Frequency::from_hz(f)) == doctest::Approx(std::cos(ka)).epsilon(0.02));
}
