// Linear elastodynamics on 6-node triangles: assembly, static solves,
// shift-invert eigenmodes and Bloch-Floquet bands.
//
// Two 2D models: in_plane (plane stress, DOFs uX,uY) and out_of_plane
// (antiplane shear, DOF uZ). Thickness t multiplies every integral.

#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "qad/core.hpp"
#include "qad/mesh.hpp"

namespace qad {

enum class Model { in_plane, out_of_plane };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

/// Piecewise-constant material in X: layers[i] applies on cuts[i-1] <= X < cuts[i].
/// Evaluated at element centroids.
struct MaterialMap {
  std::vector<IsotropicMaterial> layers{IsotropicMaterial::diamond()};
  std::vector<double> cuts{};

  MaterialMap() = default;
  MaterialMap(const IsotropicMaterial& uniform) : layers{uniform} {}  // NOLINT implicit
  static MaterialMap layered(std::vector<double> cuts, std::vector<IsotropicMaterial> layers);

  const IsotropicMaterial& at(const Eigen::Vector2d& p) const;
  bool uniform() const { return layers.size() == 1; }
  void validate() const;
};

/// Barycentric position inside one element.
struct MeshPoint {
  int element;
  Eigen::Vector3d bary;
};

/// Quadratic discretization of a linear mesh. Vertex nodes keep their mesh
/// index; edge midpoints follow.
class Discretization {
 public:
  Discretization(Mesh mesh, Model model, double thickness, MaterialMap materials);

  const Mesh& mesh() const { return mesh_; }
  Model model() const { return model_; }
  double thickness() const { return thickness_; }
  const MaterialMap& materials() const { return materials_; }
  const IsotropicMaterial& material(int element) const { return element_material_[element]; }

  int dofs_per_node() const { return model_ == Model::in_plane ? 2 : 1; }
  int dof(int node, int component) const { return node * dofs_per_node() + component; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_dofs() const { return num_nodes() * dofs_per_node(); }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }
  const std::array<int, 6>& element(int e) const { return elements_[e]; }

  /// Quadratic boundary edges: (end, mid, end) node triples with tags.
  struct Edge {
    std::array<int, 3> nodes;
    BoundaryTag tag;
  };
  const std::vector<Edge>& boundary() const { return boundary_; }
  /// Periodic pairs including the midside nodes of periodic edges.
  const std::vector<std::pair<int, int>>& periodic_pairs() const { return periodic_pairs_; }
  /// Nodes (vertex and midside) lying on edges with this tag.
  std::vector<int> nodes_with_tag(BoundaryTag tag) const;

  /// Element containing p, or nullopt outside the mesh.
  std::optional<MeshPoint> locate(const Eigen::Vector2d& p) const;

  Eigen::Vector2d position(const MeshPoint& q) const;
  /// Gradients of the three barycentric coordinates of an element.
  Eigen::Matrix<double, 2, 3> bary_gradients(int element) const;

 private:
  Mesh mesh_;
  Model model_;
  double thickness_;
  MaterialMap materials_;
  std::vector<IsotropicMaterial> element_material_;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<std::array<int, 6>> elements_;
  std::vector<Edge> boundary_;
  std::vector<std::pair<int, int>> periodic_pairs_;
  // uniform bucket grid for locate()
  Eigen::Vector2d grid_origin_;
  double grid_cell_ = 1.0;
  int grid_nx_ = 1, grid_ny_ = 1;
  std::vector<std::vector<int>> grid_;
};

/// P2 shape function values and gradients at a barycentric point.
Eigen::Matrix<double, 6, 1> shape_values(const Eigen::Vector3d& bary);
Eigen::Matrix<double, 2, 6> shape_gradients(const Eigen::Matrix<double, 2, 3>& dL, const Eigen::Vector3d& bary);

/// Degree-4 triangle quadrature (6 points): barycentric points and weights summing to 1.
const std::array<std::pair<Eigen::Vector3d, double>, 6>& triangle_quadrature();

struct SystemMatrices {
  std::shared_ptr<const Discretization> disc;
  Eigen::SparseMatrix<double> K;  // N/m
  Eigen::SparseMatrix<double> M;  // kg

  Model model() const { return disc->model(); }
  double thickness() const { return disc->thickness(); }
};

/// Throws Error naming the element when an element Jacobian is not positive.
SystemMatrices assemble(const Mesh& mesh, const MaterialMap& materials, Model model, double thickness);

// ---------------------------------------------------------------------------
// Field evaluation. Strain tensors are 3x3 lab-frame: in_plane fills XX, YY,
// XY; out_of_plane fills XZ, YZ. ZZ is left zero here.

template <class Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

Eigen::Vector3d displacement_at(const Discretization& disc, const Field<double>& u, const MeshPoint& q);
Eigen::Matrix3d strain_at(const Discretization& disc, const Field<double>& u, const MeshPoint& q);

/// Period-averaged energy density 1/2 eps:c:eps + 1/2 omega^2 rho |u|^2 [J/m^3].
double energy_density_at(const Discretization& disc, const Field<double>& u, double omega, const MeshPoint& q);
/// Separate strain and kinetic parts of the same density.
std::pair<double, double> energy_parts_at(const Discretization& disc, const Field<double>& u, double omega,
                                          const MeshPoint& q);
/// Same, with the material given explicitly instead of the element's own.
std::pair<double, double> energy_parts_at(const Discretization& disc, const Field<double>& u, double omega,
                                          const MeshPoint& q, const IsotropicMaterial& mat);

// ---------------------------------------------------------------------------
// Static solves. Edges tagged `clamped` are always fixed at zero.

struct EdgeLoad {
  BoundaryTag tag;
  Eigen::Vector2d traction;  // N/m^2; out_of_plane uses x() as the Z traction
};

struct PointLoad {
  int node;
  Eigen::Vector2d force;  // N
};

struct Support {
  BoundaryTag tag;
  std::array<std::optional<double>, 2> value;  // fixed displacement per component [m]
};

struct NodeSupport {
  int node;
  int component;
  double value = 0.0;
};

struct StaticProblem {
  std::vector<EdgeLoad> edge_loads;
  std::vector<PointLoad> point_loads;
  std::vector<Support> supports;
  std::vector<NodeSupport> node_supports;
};

struct StaticSolution {
  Field<double> u;
  std::vector<Eigen::Matrix3d> strain;  // per element, at the centroid
  double residual;                      // |K u - f| / |f|
};

/// Throws Error("rigid modes present") when the supports leave K singular.
StaticSolution solve_static(const SystemMatrices& sys, const StaticProblem& problem);

// ---------------------------------------------------------------------------
// Eigenmodes

enum class NormConvention { kinetic_unit, raw };

struct ElasticMode {
  Frequency omega;
  Field<double> u;
  std::vector<Eigen::Matrix3d> strain;  // per element, at the centroid
  NormConvention norm = NormConvention::raw;
  std::shared_ptr<const Discretization> disc;
  bool degenerate = false;

  double thickness() const { return disc->thickness(); }
};

struct ModeOptions {
  std::vector<Support> supports;  // in addition to clamped edges
};

/// The `count` eigenpairs nearest `shift`, ordered by |Omega^2 - shift^2|,
/// each normalized to unit kinetic norm (u^T M u = 1).
std::vector<ElasticMode> solve_modes(const SystemMatrices& sys, Frequency shift, int count,
                                     const ModeOptions& options = {});

/// Lowest `count` Bloch frequencies [Hz] at wavevector k [rad/m], ascending.
/// Throws Error("not a unit cell") without periodic pairs.
std::vector<double> solve_bloch(const SystemMatrices& sys, double k, int count);

struct BandStructure {
  std::vector<double> k;                             // rad/m
  std::vector<std::vector<double>> bands;            // bands[ik], ascending, Hz
  std::vector<std::vector<Model>> family;            // family[ik][j]
  std::vector<std::pair<double, double>> gaps;       // Hz
  double lattice = 0.0;                              // m
  int bands_per_family = 0;

  /// Frequencies of one family at sample ik, ascending.
  std::vector<double> family_bands(std::size_t ik, Model model) const;
};

struct BandOptions {
  double thickness = 0.5e-6;
  int threads = 1;
};

/// Bloch bands of both families on a uniform k-grid over [0, pi/A].
BandStructure band_structure(const Mesh& mesh, const MaterialMap& materials, int n_k, int n_bands,
                             const BandOptions& options = {});

/// Maximal intervals free of every band of every family, below the lowest
/// top-band minimum (above that the spectrum is not known). Intervals
/// narrower than 1e-3 of that ceiling are treated as numerical splitting.
std::vector<std::pair<double, double>> find_gaps(const BandStructure& bands);

// ---------------------------------------------------------------------------
// CSV export

/// One row per element centroid: `X,Y,uX,uY,eXX,eYY,eXY,h` (in_plane) or
/// `X,Y,uZ,eXZ,eYZ,h` (out_of_plane).
void write_field_csv(std::ostream& out, const Discretization& disc, const Field<double>& u, double omega);
/// `k,band_index,family,frequency_hz`.
void write_bands_csv(std::ostream& out, const BandStructure& bands);

}  // namespace qad
