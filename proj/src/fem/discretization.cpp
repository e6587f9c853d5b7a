#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "qad/fem.hpp"

namespace qad {

std::string to_string(Model model) { return model == Model::in_plane ? "in_plane" : "out_of_plane"; }

Model model_from_string(const std::string& name) {
  if (name == "in_plane") return Model::in_plane;
  if (name == "out_of_plane") return Model::out_of_plane;
  throw Error("unknown model '" + name + "'");
}

MaterialMap MaterialMap::layered(std::vector<double> cuts, std::vector<IsotropicMaterial> layers) {
  MaterialMap m;
  m.cuts = std::move(cuts);
  m.layers = std::move(layers);
  m.validate();
  return m;
}

const IsotropicMaterial& MaterialMap::at(const Eigen::Vector2d& p) const {
  const auto it = std::upper_bound(cuts.begin(), cuts.end(), p.x());
  return layers[static_cast<std::size_t>(it - cuts.begin())];
}

void MaterialMap::validate() const {
  if (layers.empty()) throw Error("material map has no layers");
  if (cuts.size() + 1 != layers.size()) throw Error("material map needs one more layer than cuts");
  if (!std::is_sorted(cuts.begin(), cuts.end())) throw Error("material cuts must ascend");
  for (const auto& m : layers) m.validate();
}

namespace {
std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}
}  // namespace

Discretization::Discretization(Mesh mesh, Model model, double thickness, MaterialMap materials)
    : mesh_(std::move(mesh)), model_(model), thickness_(thickness), materials_(std::move(materials)) {
  if (!(thickness_ > 0.0)) throw Error("thickness must be positive");
  materials_.validate();
  mesh_.validate();

  nodes_ = mesh_.nodes;
  std::unordered_map<std::uint64_t, int> mid;
  auto midpoint = [&](int a, int b) {
    auto [it, inserted] = mid.try_emplace(edge_key(a, b), static_cast<int>(nodes_.size()));
    if (inserted) nodes_.push_back(0.5 * (mesh_.nodes[a] + mesh_.nodes[b]));
    return it->second;
  };
  elements_.reserve(mesh_.elements.size());
  element_material_.reserve(mesh_.elements.size());
  for (std::size_t e = 0; e < mesh_.elements.size(); ++e) {
    const auto& t = mesh_.elements[e];
    if (!(mesh_.signed_area(e) > 0.0)) throw Error("inverted element " + std::to_string(e));
    elements_.push_back({t[0], t[1], t[2], midpoint(t[0], t[1]), midpoint(t[1], t[2]), midpoint(t[2], t[0])});
    element_material_.push_back(materials_.at(mesh_.centroid(e)));
  }
  for (const auto& b : mesh_.boundary) boundary_.push_back({{b.a, mid.at(edge_key(b.a, b.b)), b.b}, b.tag});

  periodic_pairs_ = mesh_.periodic_pairs;
  if (!periodic_pairs_.empty()) {
    std::map<int, int> partner(mesh_.periodic_pairs.begin(), mesh_.periodic_pairs.end());
    for (const auto& b : mesh_.boundary) {
      if (b.tag != BoundaryTag::periodic_left) continue;
      const auto right = mid.find(edge_key(partner.at(b.a), partner.at(b.b)));
      if (right == mid.end()) throw Error("periodic edge has no partner edge");
      periodic_pairs_.emplace_back(mid.at(edge_key(b.a, b.b)), right->second);
    }
  }

  // bucket grid sized to roughly one element per cell
  const auto box = mesh_.bounding_box();
  const double w = box[2] - box[0], h = box[3] - box[1];
  grid_cell_ = std::sqrt(std::max(w * h, 1e-300) / static_cast<double>(elements_.size()));
  grid_origin_ = Eigen::Vector2d(box[0], box[1]);
  grid_nx_ = std::max(1, static_cast<int>(std::ceil(w / grid_cell_)));
  grid_ny_ = std::max(1, static_cast<int>(std::ceil(h / grid_cell_)));
  grid_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  for (int e = 0; e < num_elements(); ++e) {
    Eigen::Vector2d lo = mesh_.nodes[elements_[e][0]], hi = lo;
    for (int i = 1; i < 3; ++i) {
      lo = lo.cwiseMin(mesh_.nodes[elements_[e][i]]);
      hi = hi.cwiseMax(mesh_.nodes[elements_[e][i]]);
    }
    const int i0 = std::clamp(static_cast<int>((lo.x() - grid_origin_.x()) / grid_cell_), 0, grid_nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((hi.x() - grid_origin_.x()) / grid_cell_), 0, grid_nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((lo.y() - grid_origin_.y()) / grid_cell_), 0, grid_ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((hi.y() - grid_origin_.y()) / grid_cell_), 0, grid_ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) grid_[static_cast<std::size_t>(j) * grid_nx_ + i].push_back(e);
  }
}

std::vector<int> Discretization::nodes_with_tag(BoundaryTag tag) const {
  std::vector<int> out;
  for (const auto& b : boundary_)
    if (b.tag == tag) out.insert(out.end(), b.nodes.begin(), b.nodes.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Eigen::Matrix<double, 2, 3> Discretization::bary_gradients(int e) const {
  const auto& t = elements_[e];
  const Eigen::Vector2d& p0 = nodes_[t[0]];
  const Eigen::Vector2d& p1 = nodes_[t[1]];
  const Eigen::Vector2d& p2 = nodes_[t[2]];
  const double a2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  Eigen::Matrix<double, 2, 3> g;
  g << p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y(),  //
      p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x();
  return g / a2;
}

std::optional<MeshPoint> Discretization::locate(const Eigen::Vector2d& p) const {
  const double fx = (p.x() - grid_origin_.x()) / grid_cell_;
  const double fy = (p.y() - grid_origin_.y()) / grid_cell_;
  if (fx < -1e-9 || fy < -1e-9 || fx > grid_nx_ + 1e-9 || fy > grid_ny_ + 1e-9) return std::nullopt;
  const int i = std::clamp(static_cast<int>(fx), 0, grid_nx_ - 1);
  const int j = std::clamp(static_cast<int>(fy), 0, grid_ny_ - 1);
  std::optional<MeshPoint> best;
  double best_min = -1e-10;
  for (int e : grid_[static_cast<std::size_t>(j) * grid_nx_ + i]) {
    const auto g = bary_gradients(e);
    const Eigen::Vector2d d = p - nodes_[elements_[e][0]];
    Eigen::Vector3d b;
    b(1) = g.col(1).dot(d);
    b(2) = g.col(2).dot(d);
    b(0) = 1.0 - b(1) - b(2);
    if (b.minCoeff() > best_min) {
      best_min = b.minCoeff();
      best = MeshPoint{e, b};
    }
  }
  return best;
}

Eigen::Vector2d Discretization::position(const MeshPoint& q) const {
  const auto& t = elements_[q.element];
  return q.bary(0) * nodes_[t[0]] + q.bary(1) * nodes_[t[1]] + q.bary(2) * nodes_[t[2]];
}

Eigen::Matrix<double, 6, 1> shape_values(const Eigen::Vector3d& L) {
  Eigen::Matrix<double, 6, 1> n;
  n << L(0) * (2 * L(0) - 1), L(1) * (2 * L(1) - 1), L(2) * (2 * L(2) - 1), 4 * L(0) * L(1), 4 * L(1) * L(2),
      4 * L(2) * L(0);
  return n;
}

Eigen::Matrix<double, 2, 6> shape_gradients(const Eigen::Matrix<double, 2, 3>& dL, const Eigen::Vector3d& L) {
  Eigen::Matrix<double, 2, 6> g;
  for (int i = 0; i < 3; ++i) g.col(i) = (4 * L(i) - 1) * dL.col(i);
  g.col(3) = 4 * (L(1) * dL.col(0) + L(0) * dL.col(1));
  g.col(4) = 4 * (L(2) * dL.col(1) + L(1) * dL.col(2));
  g.col(5) = 4 * (L(0) * dL.col(2) + L(2) * dL.col(0));
  return g;
}

const std::array<std::pair<Eigen::Vector3d, double>, 6>& triangle_quadrature() {
  static const std::array<std::pair<Eigen::Vector3d, double>, 6> rule = [] {
    const double a1 = 0.445948490915965, b1 = 1 - 2 * a1, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, b2 = 1 - 2 * a2, w2 = 0.109951743655322;
    return std::array<std::pair<Eigen::Vector3d, double>, 6>{{
        {{b1, a1, a1}, w1},
        {{a1, b1, a1}, w1},
        {{a1, a1, b1}, w1},
        {{b2, a2, a2}, w2},
        {{a2, b2, a2}, w2},
        {{a2, a2, b2}, w2},
    }};
  }();
  return rule;
}

// ---------------------------------------------------------------- fields

Eigen::Vector3d displacement_at(const Discretization& disc, const Field<double>& u, const MeshPoint& q) {
  const auto n = shape_values(q.bary);
  const auto& t = disc.element(q.element);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int i = 0; i < 6; ++i) {
    if (disc.model() == Model::in_plane) {
      out(0) += n(i) * u(disc.dof(t[i], 0));
      out(1) += n(i) * u(disc.dof(t[i], 1));
    } else {
      out(2) += n(i) * u(disc.dof(t[i], 0));
    }
  }
  return out;
}

Eigen::Matrix3d strain_at(const Discretization& disc, const Field<double>& u, const MeshPoint& q) {
  const auto g = shape_gradients(disc.bary_gradients(q.element), q.bary);
  const auto& t = disc.element(q.element);
  Eigen::Matrix3d eps = Eigen::Matrix3d::Zero();
  if (disc.model() == Model::in_plane) {
    Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(r, c) = d u_r / d x_c
    for (int i = 0; i < 6; ++i) {
      grad.row(0) += u(disc.dof(t[i], 0)) * g.col(i).transpose();
      grad.row(1) += u(disc.dof(t[i], 1)) * g.col(i).transpose();
    }
    eps.topLeftCorner<2, 2>() = 0.5 * (grad + grad.transpose());
  } else {
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (int i = 0; i < 6; ++i) grad += u(disc.dof(t[i], 0)) * g.col(i);
    eps(0, 2) = eps(2, 0) = 0.5 * grad.x();
    eps(1, 2) = eps(2, 1) = 0.5 * grad.y();
  }
  return eps;
}

std::pair<double, double> energy_parts_at(const Discretization& disc, const Field<double>& u, double omega,
                                          const MeshPoint& q) {
  return energy_parts_at(disc, u, omega, q, disc.material(q.element));
}

std::pair<double, double> energy_parts_at(const Discretization& disc, const Field<double>& u, double omega,
                                          const MeshPoint& q, const IsotropicMaterial& mat) {
  const Eigen::Matrix3d eps = strain_at(disc, u, q);
  double strain_energy;
  if (disc.model() == Model::in_plane) {
    // plane stress: sigma = E/(1-nu^2) [[1,nu,0],[nu,1,0],[0,0,(1-nu)/2]] (exx, eyy, 2exy)
    const double c = mat.E / (1 - mat.nu * mat.nu);
    const double exx = eps(0, 0), eyy = eps(1, 1), gxy = 2 * eps(0, 1);
    strain_energy = 0.5 * c * (exx * exx + eyy * eyy + 2 * mat.nu * exx * eyy + 0.5 * (1 - mat.nu) * gxy * gxy);
  } else {
    strain_energy = 2.0 * mat.shear_modulus() * (eps(0, 2) * eps(0, 2) + eps(1, 2) * eps(1, 2));
  }
  const double kinetic = 0.5 * omega * omega * mat.rho * displacement_at(disc, u, q).squaredNorm();
  return {strain_energy, kinetic};
}

double energy_density_at(const Discretization& disc, const Field<double>& u, double omega, const MeshPoint& q) {
  const auto [s, k] = energy_parts_at(disc, u, omega, q);
  return s + k;
}

}  // namespace qad
