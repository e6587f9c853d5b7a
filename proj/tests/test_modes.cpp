#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "qad/modes.hpp"

using namespace qad;
using std::numbers::pi;

namespace {

const IsotropicMaterial diamond = IsotropicMaterial::diamond();

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Mode built directly from a nodal function u(X, Y) -> (uX, uY).
template <class F>
ElasticMode field_mode(const Mesh& mesh, const MaterialMap& mat, double omega, F f) {
  ElasticMode m;
  m.disc = std::make_shared<const Discretization>(mesh, Model::in_plane, 0.5e-6, mat);
  m.omega = Frequency::from_angular(omega);
  m.u = Field<double>::Zero(m.disc->num_dofs());
  for (int n = 0; n < m.disc->num_nodes(); ++n) {
    const Eigen::Vector2d v = f(m.disc->nodes()[n]);
    m.u(m.disc->dof(n, 0)) = v.x();
    m.u(m.disc->dof(n, 1)) = v.y();
  }
  for (int e = 0; e < m.disc->num_elements(); ++e)
    m.strain.push_back(strain_at(*m.disc, m.u, {e, Eigen::Vector3d::Constant(1.0 / 3.0)}));
  return m;
}

std::vector<ElasticMode> rod_modes() {
  RectangleGeometry g{20e-6, 1e-6};
  g.left = BoundaryTag::clamped;
  const auto sys = assemble(generate({g, 0.25e-6}), diamond, Model::in_plane, 0.5e-6);
  return solve_modes(sys, Frequency::from_hz(0.0), 6);
}

}  // namespace

TEST_CASE("uniform energy density gives the geometric volume") {
  const auto mesh = generate({RectangleGeometry{3e-6, 1e-6}, 0.3e-6});
  const auto m = field_mode(mesh, diamond, 0.0, [](const Eigen::Vector2d& p) { return Eigen::Vector2d(1e-3 * p.x(), 0.0); });
  const auto v = effective_volume(m);
  CHECK(rel(v.veff, 3e-12 * 0.5e-6) < 1e-9);
  CHECK(rel(v.area, 3e-12) < 1e-9);
}

TEST_CASE("standing wave in a nu = 0 rod has uniform energy density") {
  IsotropicMaterial mat = diamond;
  mat.nu = 0.0;
  const double L = 4e-6, k = 3 * pi / L;
  const double omega = k * std::sqrt(mat.E / mat.rho);  // E k^2 = rho omega^2
  const auto mesh = generate({RectangleGeometry{L, 0.5e-6}, 0.025e-6});
  const auto m = field_mode(mesh, mat, omega, [&](const Eigen::Vector2d& p) { return Eigen::Vector2d(std::cos(k * p.x()), 0.0); });
  const auto h = energy_density(m);
  double lo = INFINITY;
  for (const auto& el : h.values)
    for (double x : el) lo = std::min(lo, x);
  CHECK(lo / h.max > 0.999);
  CHECK(rel(effective_volume(m).veff, L * 0.5e-6 * 0.5e-6) < 1e-3);
  CHECK(rel(h.kinetic_energy, h.strain_energy) < 1e-4);
}

TEST_CASE("eigenmodes satisfy equipartition and both normalizations") {
  for (const auto& m : rod_modes()) {
    const auto h = energy_density(m);
    CHECK_FALSE(h.material_mismatch);
    CHECK(equipartition_ratio(m) == doctest::Approx(1.0).epsilon(1e-6));
    const auto n = normalization_integrals(m);
    CHECK(n.kinetic == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(n.strain == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rel(h.total(), std::pow(m.omega.angular(), 2)) < 1e-6);
    for (const auto& el : h.values)
      for (double x : el) CHECK(x >= 0.0);
  }
}

TEST_CASE("material mismatch is flagged") {
  const auto m = rod_modes().front();
  IsotropicMaterial stiff = diamond;
  stiff.E *= 2;
  CHECK(energy_density(m, stiff).material_mismatch);
  CHECK_FALSE(energy_density(m, diamond).material_mismatch);
}

TEST_CASE("normalize is projective and idempotent") {
  auto m = rod_modes()[1];
  m.u *= 3.0;
  m.norm = NormConvention::raw;
  const auto a = normalize(m);
  CHECK(a.norm == NormConvention::kinetic_unit);
  CHECK(normalization_integrals(a).kinetic == doctest::Approx(1.0).epsilon(1e-12));
  const auto b = normalize(a);
  CHECK(b.u == a.u);
  auto scaled = m;
  scaled.u *= 7.0;
  const auto c = normalize(scaled);
  CHECK((c.u - a.u).cwiseAbs().maxCoeff() <= 1e-14 * a.u.cwiseAbs().maxCoeff());

  auto null = m;
  null.u.setZero();
  CHECK_THROWS_WITH_AS(normalize(null), "null mode", Error);
  CHECK_THROWS_WITH_AS(effective_volume(null), "null mode", Error);
}

TEST_CASE("V_eff is invariant under amplitude scaling") {
  auto m = rod_modes()[2];
  const double v = effective_volume(m).veff;
  m.u *= -1e5;
  CHECK(rel(effective_volume(m).veff, v) < 1e-12);
}

TEST_CASE("zero-point strain") {
  const auto modes = rod_modes();
  const auto& m = modes[0];
  const Eigen::Vector2d p(10e-6, 0.2e-6);
  const Eigen::Matrix3d zp = zero_point_strain(m, p);
  CHECK((zp - zp.transpose()).norm() == 0.0);

  SUBCASE("errors") {
    auto raw = m;
    raw.norm = NormConvention::raw;
    CHECK_THROWS_WITH_AS(zero_point_strain(raw, p), "mode not normalized", Error);
    CHECK_THROWS_WITH_AS(zero_point_strain(m, {30e-6, 0.0}), "position outside mesh", Error);
  }
  SUBCASE("rigid translation gives zero") {
    const auto mesh = generate({RectangleGeometry{1e-6, 1e-6}, 0.3e-6});
    auto t = normalize(field_mode(mesh, diamond, 0.0, [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 0.0); }));
    CHECK(zero_point_strain(t, {0.5e-6, 0.5e-6}).norm() == 0.0);
  }
  SUBCASE("doubling hbar scales by sqrt 2") {
    const double h0 = hbar();
    set_hbar_for_testing(2 * h0);
    const Eigen::Matrix3d twice = zero_point_strain(m, p);
    set_hbar_for_testing(h0);
    CHECK((twice - std::sqrt(2.0) * zp).norm() <= 1e-14 * zp.norm());
  }
  SUBCASE("peak magnitude follows sqrt(hbar Omega / 2 E V)") {
    for (const auto& mode : modes) {
      double peak = 0.0;
      for (const auto& e : mode.strain) peak = std::max(peak, e.norm());
      peak *= std::sqrt(hbar() / (2 * mode.omega.angular()));
      const double estimate = std::sqrt(hbar() * mode.omega.angular() / (2 * diamond.E * effective_volume(mode).veff));
      CHECK(peak / estimate > 1.0 / 3);
      CHECK(peak / estimate < 3.0);
    }
  }
}

TEST_CASE("bridge V_eff shrinks with the waist") {
  // static lightning-rod field: strain energy of a loaded bridge
  double prev = INFINITY;
  for (double d : {200e-9, 100e-9, 50e-9}) {
    const auto mesh = generate({BridgeGeometry{d, 0.15 * pi, 375e-9, 3e-6, 1e-6}, 0.1e-6, 8.0});
    const auto sys = assemble(mesh, diamond, Model::in_plane, 0.5e-6);
    StaticProblem prob;
    prob.edge_loads.push_back({BoundaryTag::load, {1e6, 0.0}});
    ElasticMode m;
    m.disc = sys.disc;
    m.u = solve_static(sys, prob).u;
    const double v = effective_volume(m).veff;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("profile fractions and mode file round trip") {
  const auto m = rod_modes()[1];
  const auto prof = energy_profile(m, {0.0, 5e-6, 10e-6, 20e-6 + 1e-12});
  CHECK(prof[0] + prof[1] + prof[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(energy_profile(m, {1.0, 0.0}), Error);

  const auto path = std::filesystem::temp_directory_path() / "qad_mode_roundtrip.txt";
  save_mode(m, path, "test header");
  const auto back = load_mode(path);
  std::filesystem::remove(path);
  CHECK(back.u == m.u);
  CHECK(back.omega == m.omega);
  CHECK(back.norm == m.norm);
  CHECK(back.disc->num_elements() == m.disc->num_elements());
  CHECK(back.disc->materials().layers[0].E == diamond.E);
  const auto r1 = mode_report(m), r2 = mode_report(back);
  CHECK(r1.veff_m3 == r2.veff_m3);
  CHECK(r1.max_h_j_per_m3 == r2.max_h_j_per_m3);
}
