#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <thread>

#include "fem/internal.hpp"
#include "fem/lanczos.hpp"
#include "qad/fem.hpp"

namespace qad {

namespace {

// Flip so the largest-magnitude entry is positive; makes signs reproducible.
void fix_sign(Field<double>& u) {
  Eigen::Index i = 0;
  u.cwiseAbs().maxCoeff(&i);
  if (u(i) < 0) u = -u;
}

}  // namespace

std::vector<ElasticMode> solve_modes(const SystemMatrices& sys, Frequency shift, int count, const ModeOptions& options) {
  if (count < 1) throw Error("mode count must be at least 1");
  const auto& disc = *sys.disc;
  const auto part = detail::partition(disc, options.supports, {});
  for (const auto& [d, v] : part.fixed)
    if (v != 0.0) throw Error("eigenmode supports must be homogeneous");
  const auto K = detail::restrict_to(sys.K, part);
  const auto M = detail::restrict_to(sys.M, part);
  const double s2 = shift.angular() * shift.angular();
  const auto pairs = detail::shift_invert_lanczos<double>(K, M, s2, count);

  std::vector<ElasticMode> modes;
  for (std::size_t c = 0; c < pairs.values.size(); ++c) {
    ElasticMode mode;
    mode.omega = Frequency::from_angular(std::sqrt(std::max(pairs.values[c], 0.0)));
    mode.u = Field<double>::Zero(disc.num_dofs());
    for (int i = 0; i < part.size(); ++i) mode.u(part.full[i]) = pairs.vectors(i, static_cast<Eigen::Index>(c));
    fix_sign(mode.u);
    mode.strain = detail::centroid_strains(disc, mode.u);
    mode.norm = NormConvention::kinetic_unit;
    mode.disc = sys.disc;
    modes.push_back(std::move(mode));
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < modes.size(); ++j) {
      if (i == j) continue;
      const double a = modes[i].omega.angular(), b = modes[j].omega.angular();
      if (std::abs(a - b) < 1e-6 * std::max(a, b)) modes[i].degenerate = true;
    }
  }
  return modes;
}

namespace {

template <class Scalar>
std::vector<double> bloch_frequencies(const SystemMatrices& sys, Scalar phase, int count) {
  const auto& disc = *sys.disc;
  const int dpn = disc.dofs_per_node();
  std::map<int, int> left_of;  // right node -> left node
  for (const auto& [l, r] : disc.periodic_pairs()) left_of[r] = l;
  std::vector<bool> fixed(static_cast<std::size_t>(disc.num_dofs()), false);
  for (int node : disc.nodes_with_tag(BoundaryTag::clamped))
    for (int c = 0; c < dpn; ++c) fixed[disc.dof(node, c)] = true;

  std::vector<int> reduced(static_cast<std::size_t>(disc.num_dofs()), -1);
  int n = 0;
  for (int node = 0; node < disc.num_nodes(); ++node) {
    if (left_of.count(node)) continue;
    for (int c = 0; c < dpn; ++c)
      if (!fixed[disc.dof(node, c)]) reduced[disc.dof(node, c)] = n++;
  }
  // T maps reduced DOFs to full DOFs; right-edge DOFs carry the Bloch phase
  std::vector<Eigen::Triplet<Scalar>> trip;
  for (int node = 0; node < disc.num_nodes(); ++node) {
    const auto it = left_of.find(node);
    for (int c = 0; c < dpn; ++c) {
      const int d = disc.dof(node, c);
      if (it == left_of.end()) {
        if (reduced[d] >= 0) trip.emplace_back(d, reduced[d], Scalar(1));
      } else {
        const int src = reduced[disc.dof(it->second, c)];
        if (src >= 0 && !fixed[d]) trip.emplace_back(d, src, phase);
      }
    }
  }
  Eigen::SparseMatrix<Scalar> T(disc.num_dofs(), n);
  T.setFromTriplets(trip.begin(), trip.end());
  const Eigen::SparseMatrix<Scalar> Th = T.adjoint();
  const Eigen::SparseMatrix<Scalar> Kc = sys.K.template cast<Scalar>();
  const Eigen::SparseMatrix<Scalar> Mc = sys.M.template cast<Scalar>();
  Eigen::SparseMatrix<Scalar> K = Th * Kc * T;
  Eigen::SparseMatrix<Scalar> M = Th * Mc * T;
  K = 0.5 * (K + Eigen::SparseMatrix<Scalar>(K.adjoint()));
  M = 0.5 * (M + Eigen::SparseMatrix<Scalar>(M.adjoint()));

  // slightly negative shift: the factorization stays definite and the
  // lowest bands (including the acoustic zero at k = 0) come first
  const double scale = std::abs(std::real(K.diagonal().sum()) / std::real(M.diagonal().sum()));
  const auto pairs = detail::shift_invert_lanczos<Scalar>(K, M, -1e-6 * scale, std::min(count, n));
  std::vector<double> f;
  for (double lambda : pairs.values) f.push_back(std::sqrt(std::max(lambda, 0.0)) / constants::two_pi);
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

std::vector<double> solve_bloch(const SystemMatrices& sys, double k, int count) {
  const auto& disc = *sys.disc;
  if (disc.periodic_pairs().empty()) throw Error("not a unit cell");
  const double a = *disc.mesh().lattice_constant();
  const double ka = k * a;
  if (ka == 0.0) return bloch_frequencies<double>(sys, 1.0, count);
  if (std::abs(std::abs(ka) - std::numbers::pi) < 1e-12) return bloch_frequencies<double>(sys, -1.0, count);
  return bloch_frequencies<std::complex<double>>(sys, std::polar(1.0, ka), count);
}

std::vector<double> BandStructure::family_bands(std::size_t ik, Model model) const {
  std::vector<double> out;
  for (std::size_t j = 0; j < bands[ik].size(); ++j)
    if (family[ik][j] == model) out.push_back(bands[ik][j]);
  return out;
}

std::vector<std::pair<double, double>> find_gaps(const BandStructure& bs) {
  if (bs.k.empty()) return {};
  std::vector<std::pair<double, double>> spans;
  double top = INFINITY;
  for (Model model : {Model::in_plane, Model::out_of_plane}) {
    std::vector<double> lo, hi;
    for (std::size_t ik = 0; ik < bs.k.size(); ++ik) {
      const auto f = bs.family_bands(ik, model);
      if (f.empty()) continue;
      lo.resize(std::max(lo.size(), f.size()), INFINITY);
      hi.resize(std::max(hi.size(), f.size()), -INFINITY);
      for (std::size_t j = 0; j < f.size(); ++j) {
        lo[j] = std::min(lo[j], f[j]);
        hi[j] = std::max(hi[j], f[j]);
      }
    }
    if (lo.empty()) continue;
    top = std::min(top, lo.back());
    for (std::size_t j = 0; j < lo.size(); ++j) spans.emplace_back(lo[j], hi[j]);
  }
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<double, double>> gaps;
  if (spans.empty()) return gaps;
  const double tol = 1e-3 * top;  // discretization splits of degenerate bands are not gaps
  double reach = spans.front().second;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first >= top) break;
    if (spans[i].first > reach + tol) gaps.emplace_back(reach, spans[i].first);
    reach = std::max(reach, spans[i].second);
  }
  return gaps;
}

BandStructure band_structure(const Mesh& mesh, const MaterialMap& materials, int n_k, int n_bands,
                             const BandOptions& options) {
  if (n_k < 2) throw Error("band structure needs n_k >= 2");
  if (n_bands < 1) throw Error("band structure needs n_bands >= 1");
  if (mesh.periodic_pairs.empty()) throw Error("not a unit cell");
  const double a = *mesh.lattice_constant();
  const std::array<SystemMatrices, 2> sys{assemble(mesh, materials, Model::in_plane, options.thickness),
                                          assemble(mesh, materials, Model::out_of_plane, options.thickness)};

  BandStructure bs;
  bs.lattice = a;
  bs.bands_per_family = n_bands;
  for (int i = 0; i < n_k; ++i) bs.k.push_back(std::numbers::pi / a * i / (n_k - 1));

  std::vector<std::array<std::vector<double>, 2>> raw(static_cast<std::size_t>(n_k));
  auto work = [&](int worker, int workers) {
    for (int task = worker; task < 2 * n_k; task += workers)
      raw[task / 2][task % 2] = solve_bloch(sys[task % 2], bs.k[task / 2], n_bands);
  };
  const int workers = std::clamp(options.threads, 1, 2 * n_k);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& per_k : raw) {
    std::vector<std::pair<double, Model>> merged;
    for (double f : per_k[0]) merged.emplace_back(f, Model::in_plane);
    for (double f : per_k[1]) merged.emplace_back(f, Model::out_of_plane);
    std::stable_sort(merged.begin(), merged.end(), [](auto& x, auto& y) { return x.first < y.first; });
    std::vector<double> f;
    std::vector<Model> fam;
    for (const auto& [v, m] : merged) {
      f.push_back(v);
      fam.push_back(m);
    }
    bs.bands.push_back(std::move(f));
    bs.family.push_back(std::move(fam));
  }
  bs.gaps = find_gaps(bs);
  return bs;
}

}  // namespace qad
