#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qad/core.hpp"
#include "qad/fem.hpp"
#include "qad/mesh.hpp"

using namespace qad;
using std::numbers::pi;

namespace {
const IsotropicMaterial diamond = IsotropicMaterial::diamond();

Mesh rect(double w, double h, double size, RectangleGeometry g = {}) {
  g.width = w;
  g.height = h;
  return generate({g, size});
}

int nearest_node(const Discretization& d, Eigen::Vector2d p) {
  int best = 0;
  for (int i = 1; i < d.num_nodes(); ++i)
    if ((d.nodes()[i] - p).norm() < (d.nodes()[best] - p).norm()) best = i;
  return best;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("matrices are symmetric and the mass sums to rho A t") {
  const auto mesh = rect(2e-6, 1e-6, 0.2e-6);
  for (Model model : {Model::in_plane, Model::out_of_plane}) {
    const auto sys = assemble(mesh, diamond, model, 0.5e-6);
    const Eigen::SparseMatrix<double> dk = sys.K - Eigen::SparseMatrix<double>(sys.K.transpose());
    CHECK(dk.norm() <= 1e-12 * sys.K.norm());
    Field<double> ones = Field<double>::Zero(sys.disc->num_dofs());
    for (int n = 0; n < sys.disc->num_nodes(); ++n) ones(sys.disc->dof(n, 0)) = 1.0;
    const double mass = ones.dot(sys.M * ones);
    CHECK(rel(mass, diamond.rho * 2e-12 * 0.5e-6) < 1e-10);
  }
}

TEST_CASE("patch test reproduces a constant strain") {
  const auto mesh = rect(1e-6, 1e-6, 0.15e-6);
  const auto sys = assemble(mesh, diamond, Model::in_plane, 1.0);
  const auto& d = *sys.disc;
  const double a = 1e-3, b = -4e-4, c = 2.5e-4, e = 7e-4;
  StaticProblem prob;
  for (const auto& edge : d.boundary())
    for (int node : edge.nodes) {
      const auto& p = d.nodes()[node];
      prob.node_supports.push_back({node, 0, a * p.x() + b * p.y()});
      prob.node_supports.push_back({node, 1, c * p.x() + e * p.y()});
    }
  const auto sol = solve_static(sys, prob);
  for (int el = 0; el < d.num_elements(); el += 7) {
    for (const auto& [L, w] : triangle_quadrature()) {
      const auto s = strain_at(d, sol.u, {el, L});
      CHECK(std::abs(s(0, 0) - a) <= 1e-10 * std::abs(a));
      CHECK(std::abs(s(1, 1) - e) <= 1e-10 * std::abs(e));
      CHECK(std::abs(s(0, 1) - 0.5 * (b + c)) <= 1e-10 * std::abs(a));
    }
  }
}

TEST_CASE("uniaxial tension") {
  RectangleGeometry g;
  g.right = BoundaryTag::load;
  const auto mesh = rect(3e-6, 1e-6, 0.2e-6, g);
  const auto sys = assemble(mesh, diamond, Model::in_plane, 0.5e-6);
  const double sigma = 1e8;
  StaticProblem prob;
  prob.edge_loads.push_back({BoundaryTag::load, {sigma, 0.0}});
  // left edge X = 0 fixed in X; one node fixed in Y
  std::vector<int> left;
  for (int n = 0; n < sys.disc->num_nodes(); ++n)
    if (sys.disc->nodes()[n].x() == 0.0) prob.node_supports.push_back({n, 0, 0.0});
  prob.node_supports.push_back({nearest_node(*sys.disc, {0.0, 0.0}), 1, 0.0});
  const auto sol = solve_static(sys, prob);
  CHECK(sol.residual <= 1e-10);
  for (const auto& s : sol.strain) {
    CHECK(std::abs(s(0, 0) - sigma / diamond.E) <= 1e-8 * sigma / diamond.E);
    CHECK(std::abs(s(1, 1) + diamond.nu * sigma / diamond.E) <= 1e-8 * sigma / diamond.E);
  }
}

TEST_CASE("zero load gives zero displacement; unsupported body is rejected") {
  RectangleGeometry g;
  g.left = BoundaryTag::clamped;
  const auto sys = assemble(rect(2e-6, 1e-6, 0.25e-6, g), diamond, Model::in_plane, 1.0);
  const auto sol = solve_static(sys, {});
  CHECK(sol.u.norm() == 0.0);

  const auto free = assemble(rect(2e-6, 1e-6, 0.25e-6), diamond, Model::in_plane, 1.0);
  StaticProblem prob;
  prob.point_loads.push_back({0, {1.0, 0.0}});
  CHECK_THROWS_WITH_AS(solve_static(free, prob), "rigid modes present", Error);
}

TEST_CASE("static reciprocity") {
  RectangleGeometry g;
  g.left = BoundaryTag::clamped;
  const auto sys = assemble(rect(4e-6, 1e-6, 0.2e-6, g), diamond, Model::in_plane, 0.5e-6);
  const int a = nearest_node(*sys.disc, {4e-6, 0.5e-6});
  const int b = nearest_node(*sys.disc, {2.5e-6, -0.5e-6});
  StaticProblem pa, pb;
  pa.point_loads.push_back({a, {0.0, 1e-3}});
  pb.point_loads.push_back({b, {1e-3, 0.0}});
  const auto ua = solve_static(sys, pa).u, ub = solve_static(sys, pb).u;
  const double ab = ua(sys.disc->dof(b, 0)), ba = ub(sys.disc->dof(a, 1));
  CHECK(rel(ab, ba) <= 1e-8);
}

TEST_CASE("free square has three rigid modes") {
  const auto sys = assemble(rect(1e-6, 1e-6, 0.2e-6), diamond, Model::in_plane, 0.5e-6);
  const auto modes = solve_modes(sys, Frequency::from_hz(0.0), 4);
  REQUIRE(modes.size() == 4);
  const double l4 = std::pow(modes[3].omega.angular(), 2);
  CHECK(l4 > 0.0);
  for (int i = 0; i < 3; ++i) CHECK(std::pow(modes[i].omega.angular(), 2) < 1e-6 * l4);
}

TEST_CASE("fixed-free rod converges to the 1D longitudinal frequencies") {
  RectangleGeometry g;
  g.left = BoundaryTag::clamped;
  const double L = 20e-6;
  const auto sys = assemble(rect(L, 1e-6, 0.25e-6, g), diamond, Model::in_plane, 0.5e-6);
  const auto modes = solve_modes(sys, Frequency::from_hz(0.0), 16);
  const double v = std::sqrt(diamond.E / diamond.rho);
  std::vector<double> longitudinal;
  for (const auto& m : modes) {
    double ux = 0, uy = 0;
    for (int n = 0; n < sys.disc->num_nodes(); ++n) {
      ux += std::pow(m.u(sys.disc->dof(n, 0)), 2);
      uy += std::pow(m.u(sys.disc->dof(n, 1)), 2);
    }
    if (ux > 10 * uy) longitudinal.push_back(m.omega.hz());
  }
  std::sort(longitudinal.begin(), longitudinal.end());
  REQUIRE(longitudinal.size() >= 2);
  for (int n = 1; n <= 2; ++n) CHECK(rel(longitudinal[n - 1], (2 * n - 1) * v / (4 * L)) < 0.02);
}

TEST_CASE("modes are M-orthonormal eigenpairs") {
  const auto mesh = generate({default_unit_cell(), 0.12e-6});
  const auto sys = assemble(mesh, diamond, Model::in_plane, 0.5e-6);
  const auto modes = solve_modes(sys, Frequency::from_hz(4.5e9), 6);
  REQUIRE(modes.size() == 6);
  double prev = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& u = modes[i].u;
    const double l = std::pow(modes[i].omega.angular(), 2);
    const Field<double> Ku = sys.K * u;
    CHECK((Ku - l * (sys.M * u)).norm() <= 1e-8 * Ku.norm());
    CHECK(rel(u.dot(Ku) / u.dot(sys.M * u), l) < 1e-8);
    CHECK(std::abs(u.dot(sys.M * u) - 1.0) < 1e-10);
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(u.dot(sys.M * modes[j].u)) <= 1e-8);
    const double dist = std::abs(l - std::pow(2 * pi * 4.5e9, 2));
    CHECK(dist >= prev);
    prev = dist;
  }
}

TEST_CASE("empty lattice shear band") {
  RectangleGeometry g;
  g.periodic = true;
  const double A = 1e-6;
  const auto mesh = rect(A, 0.5e-6, 0.1e-6, g);
  const auto sys = assemble(mesh, diamond, Model::out_of_plane, 0.5e-6);
  const double vs = wave_speeds(diamond).shear;
  for (double frac : {0.1, 0.25, 0.5}) {
    const double k = frac * pi / A;
    const auto f = solve_bloch(sys, k, 3);
    CHECK(rel(f[0], vs * k / (2 * pi)) < 0.01);
    const auto fm = solve_bloch(sys, -k, 3);
    for (int i = 0; i < 3; ++i) CHECK(rel(fm[i], f[i]) < 1e-8);
  }
  CHECK_THROWS_WITH_AS(solve_bloch(assemble(rect(A, A, 0.2e-6), diamond, Model::out_of_plane, 1.0), 0.0, 2),
                       "not a unit cell", Error);
}

TEST_CASE("homogeneous cell has no gaps") {
  RectangleGeometry g;
  g.periodic = true;
  const auto mesh = rect(1e-6, 0.4e-6, 0.1e-6, g);
  const auto bs = band_structure(mesh, diamond, 8, 6);
  CHECK(bs.gaps.empty());
  CHECK(bs.bands.size() == 8);
  for (const auto& b : bs.bands) {
    CHECK(b.size() == 12);
    CHECK(std::is_sorted(b.begin(), b.end()));
  }
  const auto two = band_structure(mesh, diamond, 2, 4);
  for (const auto& [lo, hi] : two.gaps) CHECK(lo < hi);
}
