#include <cmath>

#include <Eigen/SparseCholesky>

#include "fem/internal.hpp"
#include "qad/fem.hpp"

namespace qad {

SystemMatrices assemble(const Mesh& mesh, const MaterialMap& materials, Model model, double thickness) {
  auto disc = std::make_shared<const Discretization>(mesh, model, thickness, materials);
  const int dpn = disc->dofs_per_node();
  const int nloc = 6 * dpn;
  const int n = disc->num_dofs();

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(static_cast<std::size_t>(disc->num_elements()) * nloc * nloc);
  mt.reserve(kt.capacity());
  Eigen::MatrixXd ke(nloc, nloc), me(nloc, nloc);

  for (int e = 0; e < disc->num_elements(); ++e) {
    const double area = disc->mesh().signed_area(static_cast<std::size_t>(e));
    if (!(area > 0.0)) throw Error("inverted element Jacobian in element " + std::to_string(e));
    const auto& mat = disc->material(e);
    const auto dL = disc->bary_gradients(e);
    ke.setZero();
    me.setZero();
    for (const auto& [L, w] : triangle_quadrature()) {
      const auto N = shape_values(L);
      const auto G = shape_gradients(dL, L);
      const double f = w * area * thickness;
      if (model == Model::in_plane) {
        Eigen::Matrix<double, 3, 12> B = Eigen::Matrix<double, 3, 12>::Zero();
        for (int i = 0; i < 6; ++i) {
          B(0, 2 * i) = G(0, i);
          B(1, 2 * i + 1) = G(1, i);
          B(2, 2 * i) = G(1, i);
          B(2, 2 * i + 1) = G(0, i);
        }
        const double c = mat.E / (1 - mat.nu * mat.nu);
        Eigen::Matrix3d D;
        D << c, c * mat.nu, 0, c * mat.nu, c, 0, 0, 0, c * (1 - mat.nu) / 2;
        ke.noalias() += f * B.transpose() * D * B;
        const Eigen::Matrix<double, 6, 6> nn = f * mat.rho * N * N.transpose();
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) {
            me(2 * i, 2 * j) += nn(i, j);
            me(2 * i + 1, 2 * j + 1) += nn(i, j);
          }
      } else {
        ke.noalias() += f * mat.shear_modulus() * G.transpose() * G;
        me.noalias() += f * mat.rho * N * N.transpose();
      }
    }
    const auto& t = disc->element(e);
    for (int i = 0; i < nloc; ++i) {
      const int gi = disc->dof(t[i / dpn], i % dpn);
      for (int j = 0; j < nloc; ++j) {
        const int gj = disc->dof(t[j / dpn], j % dpn);
        kt.emplace_back(gi, gj, ke(i, j));
        mt.emplace_back(gi, gj, me(i, j));
      }
    }
  }
  SystemMatrices sys;
  sys.disc = disc;
  Eigen::SparseMatrix<double> K(n, n), M(n, n);
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());
  sys.K = 0.5 * (K + Eigen::SparseMatrix<double>(K.transpose()));
  sys.M = 0.5 * (M + Eigen::SparseMatrix<double>(M.transpose()));
  return sys;
}

namespace detail {

DofPartition partition(const Discretization& disc, const std::vector<Support>& supports,
                       const std::vector<NodeSupport>& node_supports) {
  DofPartition p;
  const int dpn = disc.dofs_per_node();
  for (int node : disc.nodes_with_tag(BoundaryTag::clamped))
    for (int c = 0; c < dpn; ++c) p.fixed[disc.dof(node, c)] = 0.0;
  for (const auto& s : supports) {
    for (int node : disc.nodes_with_tag(s.tag))
      for (int c = 0; c < dpn; ++c)
        if (s.value[c]) p.fixed[disc.dof(node, c)] = *s.value[c];
  }
  for (const auto& s : node_supports) {
    if (s.node < 0 || s.node >= disc.num_nodes() || s.component < 0 || s.component >= dpn)
      throw Error("node support out of range");
    p.fixed[disc.dof(s.node, s.component)] = s.value;
  }
  p.reduced.assign(static_cast<std::size_t>(disc.num_dofs()), -1);
  for (int d = 0; d < disc.num_dofs(); ++d) {
    if (p.fixed.count(d)) continue;
    p.reduced[d] = static_cast<int>(p.full.size());
    p.full.push_back(d);
  }
  return p;
}

std::vector<Eigen::Matrix3d> centroid_strains(const Discretization& disc, const Field<double>& u) {
  std::vector<Eigen::Matrix3d> out;
  out.reserve(static_cast<std::size_t>(disc.num_elements()));
  for (int e = 0; e < disc.num_elements(); ++e)
    out.push_back(strain_at(disc, u, {e, Eigen::Vector3d::Constant(1.0 / 3.0)}));
  return out;
}
}  // namespace detail

StaticSolution solve_static(const SystemMatrices& sys, const StaticProblem& problem) {
  const auto& disc = *sys.disc;
  const int dpn = disc.dofs_per_node();
  Field<double> f = Field<double>::Zero(disc.num_dofs());
  for (const auto& load : problem.edge_loads) {
    for (const auto& edge : disc.boundary()) {
      if (edge.tag != load.tag) continue;
      const double len = (disc.nodes()[edge.nodes[2]] - disc.nodes()[edge.nodes[0]]).norm();
      const double share[3] = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < dpn; ++c) f(disc.dof(edge.nodes[i], c)) += share[i] * len * disc.thickness() * load.traction(c);
    }
  }
  for (const auto& load : problem.point_loads) {
    if (load.node < 0 || load.node >= disc.num_nodes()) throw Error("point load on missing node");
    for (int c = 0; c < dpn; ++c) f(disc.dof(load.node, c)) += load.force(c);
  }

  const auto part = detail::partition(disc, problem.supports, problem.node_supports);
  Field<double> u = Field<double>::Zero(disc.num_dofs());
  for (const auto& [d, v] : part.fixed) u(d) = v;

  Field<double> rhs(part.size());
  const Field<double> ku_fixed = sys.K * u;
  for (int i = 0; i < part.size(); ++i) rhs(i) = f(part.full[i]) - ku_fixed(part.full[i]);

  const Eigen::SparseMatrix<double> Kff = detail::restrict_to(sys.K, part);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kff);
  if (ldlt.info() != Eigen::Success || detail::pivot_ratio(ldlt) < 1e-13) throw Error("rigid modes present");

  const double rhs_norm = rhs.norm();
  Field<double> x = Field<double>::Zero(part.size());
  double residual = 0.0;
  if (rhs_norm > 0.0) {
    x = ldlt.solve(rhs);
    for (int it = 0; it < 3; ++it) {
      const Field<double> r = rhs - Kff * x;
      residual = r.norm() / rhs_norm;
      if (residual <= 1e-13) break;
      x += ldlt.solve(r);
    }
    residual = (rhs - Kff * x).norm() / rhs_norm;
  }
  for (int i = 0; i < part.size(); ++i) u(part.full[i]) = x(i);
  return {u, detail::centroid_strains(disc, u), residual};
}

}  // namespace qad
