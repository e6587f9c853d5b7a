// Constrained Delaunay refinement over a planar straight-line graph.
//
// Boundary-conforming Ruppert refinement: segments are recovered by midpoint
// splitting, then skinny or oversized triangles are split at their
// circumcentres unless the circumcentre encroaches a subsegment, in which case
// the subsegment is split instead. Insertion order is fixed, so the output is
// a pure function of the input.

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qad/mesh.hpp"

namespace qad::detail {

struct InputSegment {
  int a;
  int b;
  BoundaryTag tag;
  bool boundary = true;  // false for interior interfaces
  int partner = -1;      // index of the periodic partner segment
};

struct PlanarGraph {
  std::vector<Eigen::Vector2d> points;
  std::vector<InputSegment> segments;
};

using SizeField = std::function<double(const Eigen::Vector2d&)>;

struct RefineOptions {
  double max_radius_edge_ratio = 1.414;  // ~20.7 degree minimum angle
  std::size_t max_vertices = 2'000'000;
};

/// Triangulates the interior of the closed boundary loops in `graph`.
/// Boundary edges of the result carry the tag of the segment they came from.
/// Periodic partners are split in lockstep so their nodes keep identical Y.
Mesh refine_delaunay(const PlanarGraph& graph, const SizeField& size, const RefineOptions& options = {});

}  // namespace qad::detail
