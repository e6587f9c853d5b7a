// 2D triangulations of the cavity geometries and a line-oriented text format.
//
// Every structure is meshed as its X-Y mid-plane cross-section; slab thickness
// enters later as a multiplicative factor. Coordinates are in meters.

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace qad {

enum class BoundaryTag { free, clamped, periodic_left, periodic_right, load };

std::string to_string(BoundaryTag tag);
/// Throws Error on an unknown tag name.
BoundaryTag boundary_tag_from_string(const std::string& name);

struct BoundaryEdge {
  int a;
  int b;
  BoundaryTag tag;
};

struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> elements;  // counter-clockwise
  std::vector<BoundaryEdge> boundary;
  std::vector<std::pair<int, int>> periodic_pairs;  // (left node, right node)

  /// Throws Error("invalid mesh: ...") naming the first violated invariant.
  void validate() const;

  double area() const;
  double signed_area(std::size_t element) const;
  double diameter() const;
  Eigen::Vector2d centroid(std::size_t element) const;
  std::array<double, 4> bounding_box() const;  // xmin, ymin, xmax, ymax

  /// X offset between the periodic edges; nullopt when there are no pairs.
  std::optional<double> lattice_constant() const;

  std::vector<int> nodes_with_tag(BoundaryTag tag) const;
};

// ---------------------------------------------------------------------------
// Parametric geometries. All lengths in meters, angles in radians.

struct RectangleGeometry {
  double width;
  double height;
  /// Interior vertical interfaces at these X positions (layered strips).
  std::vector<double> layer_cuts{};
  BoundaryTag left = BoundaryTag::free;
  BoundaryTag right = BoundaryTag::free;
  BoundaryTag bottom = BoundaryTag::free;
  BoundaryTag top = BoundaryTag::free;
  /// Tags left/right as periodic_left/periodic_right and pairs their nodes.
  bool periodic = false;
};

/// Truncated wedge: tip edge of width tip_width on X = 0 (tag load), flanks at
/// +-half_angle, clamped far end at X = length.
struct WedgeGeometry {
  double half_angle;
  double tip_width;
  double length;
};

/// Symmetric tapered bridge (mid-plane cut of the 3D bridge). Waist of width
/// `waist` at X = 0, rounded by arcs of radius `curvature`, flanks at
/// +-half_angle opening to |Y| = height/2, flat out to |X| = length/2.
/// Left end clamped, right end loaded.
struct BridgeGeometry {
  double waist;
  double half_angle;
  double curvature;
  double length;
  double height;
};

/// Quasi-1D phononic crystal cell on [0, A] x [-A/2, A/2]. Slots of width 2R
/// run in from both free edges on the cell boundaries and end in discs of
/// radius R, leaving a neck of width B between the disc bottoms.
struct UnitCellGeometry {
  double lattice;  // A
  double neck;     // B
  double radius;   // R
};

/// Defect cavity between two finite crystals. The defect is a block of height
/// `block_height` whose centre is notched down to a bridge of width `waist`
/// (waist arcs of radius `curvature`, flanks at +-half_angle). `block_flat` is
/// the length of the flat top between the taper and the junction slot.
struct CavityGeometry {
  double waist;         // d
  double block_flat;    // c
  double block_height;  // e
  double curvature;     // r'
  double half_angle;    // theta
  UnitCellGeometry cell;
  int cells_per_side = 4;
  BoundaryTag termination = BoundaryTag::clamped;
};

/// X positions along the cavity axis (right half; the left half mirrors).
struct CavityLayout {
  double taper_end;  // flank meets the block top
  double junction;   // first crystal neck; cell k spans [junction + kA, junction + (k+1)A]
  double end;        // outer termination
};
/// Throws like generate() for infeasible parameters.
CavityLayout cavity_layout(const CavityGeometry& g);

using GeometryShape =
    std::variant<RectangleGeometry, WedgeGeometry, BridgeGeometry, UnitCellGeometry, CavityGeometry>;

struct GeometrySpec {
  GeometryShape shape;
  double h;                  // target element size
  double refinement = 1.0;   // size reduction factor at the strain hot-spot
  double grading = 0.25;     // element size growth per unit distance from the hot-spot
};

/// Default design geometries (SI units).
UnitCellGeometry default_unit_cell();
CavityGeometry default_cavity();

/// Meshes a geometry. Throws Error("geometry self-intersection") for
/// infeasible parameters and Error("feature unresolved") when h cannot
/// resolve the smallest feature.
Mesh generate(const GeometrySpec& spec);

/// Area of the exact (curved) outline, independent of h.
double analytic_area(const GeometryShape& shape);

/// Polygonal outline used by the generator: one closed counter-clockwise loop.
struct Outline {
  std::vector<Eigen::Vector2d> points;
  std::vector<BoundaryTag> tags;  // tags[i] labels segment (i, i+1)
  double area() const;
};
Outline outline(const GeometrySpec& spec);

// ---------------------------------------------------------------------------
// Text format. `v X Y`, `t i j k`, `b i j tag`, `p i j`; `#` comments.

void save(const Mesh& mesh, const std::filesystem::path& path);
Mesh load(const std::filesystem::path& path);
std::string to_text(const Mesh& mesh, const std::string& header_comment = {});
Mesh from_text(const std::string& text);

}  // namespace qad
