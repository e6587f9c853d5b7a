// Shift-invert Lanczos for K x = lambda M x with K Hermitian, M Hermitian
// positive definite. Full reorthogonalization in the M inner product.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "fem/internal.hpp"
#include "qad/core.hpp"

namespace qad::detail {

template <class Scalar>
struct EigenPairs {
  std::vector<double> values;                                  // lambda
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // M-orthonormal columns
  double shift_used = 0.0;
};

/// Deterministic start vector: ones plus a fixed-seed perturbation that
/// breaks any mirror symmetry of the mesh.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> start_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v(i) = Scalar(1.0 + (r - 0.5));
  }
  return v;
}

template <class Scalar>
double real_dot(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& a, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
  return std::real(a.dot(b));
}

/// The `count` eigenpairs of (K, M) nearest sigma2, ascending by |lambda - sigma2|.
/// A singular shifted factorization is retried with a perturbed shift up to three times.
template <class Scalar>
EigenPairs<Scalar> shift_invert_lanczos(const Eigen::SparseMatrix<Scalar>& K, const Eigen::SparseMatrix<Scalar>& M,
                                        double sigma2, int count) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = K.rows();
  if (count < 1) throw Error("eigenpair count must be at least 1");
  if (count > n) throw Error("more eigenpairs requested than degrees of freedom");

  const double scale = std::abs(std::real(K.diagonal().sum()) / std::real(M.diagonal().sum()));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>> ldlt;
  double shift = sigma2;
  bool factored = false;
  for (int attempt = 0; attempt <= 3 && !factored; ++attempt) {
    if (attempt > 0) shift = sigma2 - 1e-8 * std::pow(100.0, attempt - 1) * std::max(std::abs(sigma2), 1e-2 * scale);
    const Eigen::SparseMatrix<Scalar> A = K - Scalar(shift) * M;
    ldlt.compute(A);
    factored = ldlt.info() == Eigen::Success && pivot_ratio_abs(ldlt) > 1e-13;
  }
  if (!factored) throw Error("factorization breakdown at shift after 3 retries");

  Mat V(n, std::min<Eigen::Index>(n, std::max(2 * count + 10, count + 30)) + 1);
  std::vector<double> alpha, beta;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  Vec v = start_vector<Scalar>(n, seed);
  v /= std::sqrt(real_dot<Scalar>(v, M * v));
  V.col(0) = v;

  EigenPairs<Scalar> out;
  out.shift_used = shift;
  Eigen::Index m = 0;
  while (true) {
    // extend the Krylov basis to the current capacity
    const Eigen::Index cap = std::min<Eigen::Index>(n, V.cols() - 1);
    for (; m < cap; ++m) {
      Vec w = ldlt.solve(Vec(M * V.col(m)));
      const double a = real_dot<Scalar>(V.col(m), M * w);
      for (int pass = 0; pass < 2; ++pass) {
        const Vec mw = M * w;
        const Vec h = V.leftCols(m + 1).adjoint() * mw;
        w -= V.leftCols(m + 1) * h;
      }
      double b = std::sqrt(std::max(0.0, real_dot<Scalar>(w, M * w)));
      alpha.push_back(a);
      if (b <= 1e-12 * std::max(std::abs(a), 1e-300) && m + 1 < n) {
        // invariant subspace: restart with a fresh vector orthogonal to the basis
        w = start_vector<Scalar>(n, ++seed);
        for (int pass = 0; pass < 2; ++pass) {
          const Vec mw = M * w;
          w -= V.leftCols(m + 1) * Vec(V.leftCols(m + 1).adjoint() * mw);
        }
        w /= std::sqrt(real_dot<Scalar>(w, M * w));
        b = 0.0;
        V.col(m + 1) = w;
      } else if (m + 1 < V.cols()) {
        V.col(m + 1) = w / (b > 0.0 ? b : 1.0);
      }
      beta.push_back(b);
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
      return std::abs(tri.eigenvalues()(i)) > std::abs(tri.eigenvalues()(j));
    });
    const Eigen::Index want = std::min<Eigen::Index>(count, m);

    bool converged = want == count;
    std::vector<double> values;
    Mat vectors(n, want);
    for (Eigen::Index c = 0; c < want && converged; ++c) {
      const Eigen::Index i = order[c];
      Vec u = V.leftCols(m) * tri.eigenvectors().col(i).template cast<Scalar>();
      u /= std::sqrt(real_dot<Scalar>(u, M * u));
      const double theta = tri.eigenvalues()(i);
      if (std::abs(beta[m - 1] * tri.eigenvectors()(m - 1, i)) > 1e-10 * std::abs(theta) && m < n) converged = false;
      const double lambda = real_dot<Scalar>(u, K * u);
      values.push_back(lambda);
      vectors.col(c) = u;
    }
    if (converged || m >= n) {
      std::vector<Eigen::Index> idx(values.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](auto a, auto b) { return std::abs(values[a] - sigma2) < std::abs(values[b] - sigma2); });
      out.vectors.resize(n, static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) {
        out.values.push_back(values[idx[c]]);
        out.vectors.col(static_cast<Eigen::Index>(c)) = vectors.col(idx[c]);
      }
      return out;
    }
    // grow the basis
    const Eigen::Index grown = std::min<Eigen::Index>(n, V.cols() - 1 + std::max<Eigen::Index>(count, 20)) + 1;
    V.conservativeResize(Eigen::NoChange, grown);
  }
}

}  // namespace qad::detail
