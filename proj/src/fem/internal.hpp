#pragma once

#include <map>
#include <vector>

#include <Eigen/SparseCore>

#include "qad/fem.hpp"

namespace qad::detail {

/// Fixed DOFs with prescribed values; the rest are numbered consecutively.
struct DofPartition {
  std::vector<int> reduced;  // full DOF -> reduced index, -1 when fixed
  std::vector<int> full;     // reduced index -> full DOF
  std::map<int, double> fixed;

  int size() const { return static_cast<int>(full.size()); }
};

DofPartition partition(const Discretization& disc, const std::vector<Support>& supports,
                       const std::vector<NodeSupport>& node_supports);

std::vector<Eigen::Matrix3d> centroid_strains(const Discretization& disc, const Field<double>& u);

/// Rows and columns of A restricted to the free DOFs.
template <class Scalar>
Eigen::SparseMatrix<Scalar> restrict_to(const Eigen::SparseMatrix<Scalar>& A, const DofPartition& p) {
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int c = 0; c < A.outerSize(); ++c) {
    const int rc = p.reduced[c];
    if (rc < 0) continue;
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(A, c); it; ++it) {
      const int rr = p.reduced[it.row()];
      if (rr >= 0) trip.emplace_back(rr, rc, it.value());
    }
  }
  Eigen::SparseMatrix<Scalar> out(p.size(), p.size());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Smallest/largest |pivot| ratio of an LDLT factor; tiny means singular.
template <class Solver>
double pivot_ratio(const Solver& ldlt) {
  const auto d = ldlt.vectorD().real().eval();
  if (d.size() == 0) return 1.0;
  const double big = d.cwiseAbs().maxCoeff();
  if (!(big > 0.0)) return 0.0;
  return d.minCoeff() / big;
}

/// Smallest/largest pivot magnitude; used for indefinite shifted factors.
template <class Solver>
double pivot_ratio_abs(const Solver& ldlt) {
  const auto d = ldlt.vectorD().real().cwiseAbs().eval();
  if (d.size() == 0) return 1.0;
  const double big = d.maxCoeff();
  return big > 0.0 ? d.minCoeff() / big : 0.0;
}

}  // namespace qad::detail
