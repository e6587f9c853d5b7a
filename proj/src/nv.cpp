#include "qad/nv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/Geometry>

namespace qad {

namespace {

Eigen::Vector3d unit(const Eigen::Vector3i& v) { return v.cast<double>().normalized(); }

std::string bracket(const Eigen::Vector3i& v) {
  std::string s = "[";
  for (int i = 0; i < 3; ++i) s += std::to_string(v(i));
  return s + "]";
}

Eigen::Vector3i parse_direction(const std::string& text) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') throw Error("bad crystal direction '" + text + "'");
  Eigen::Vector3i v;
  int count = 0, sign = 1;
  for (std::size_t i = 1; i + 1 < text.size(); ++i) {
    const char c = text[i];
    if (c == '-') {
      sign = -1;
    } else if (c >= '0' && c <= '9') {
      if (count == 3) throw Error("bad crystal direction '" + text + "'");
      v(count++) = sign * (c - '0');
      sign = 1;
    } else if (c != ',' && c != ' ') {
      throw Error("bad crystal direction '" + text + "'");
    }
  }
  if (count != 3) throw Error("bad crystal direction '" + text + "'");
  return v;
}

}  // namespace

void NVOrientation::validate() const {
  if (z_dir.isZero() || x_dir.isZero()) throw Error("orientation directions must be non-zero");
  if (z_dir.dot(x_dir) != 0) throw Error("x_dir " + bracket(x_dir) + " is not perpendicular to z_dir " + bracket(z_dir));
}

std::string NVOrientation::label() const { return bracket(z_dir) + "(" + bracket(x_dir) + ")"; }

NVOrientation parse_orientation(const std::string& text) {
  const auto zpos = text.find("z=");
  const auto xpos = text.find("x=");
  if (zpos == std::string::npos || xpos == std::string::npos) throw Error("orientation must read z=[...],x=[...]");
  auto take = [&](std::size_t pos) {
    const auto close = text.find(']', pos);
    if (close == std::string::npos) throw Error("orientation must read z=[...],x=[...]");
    return parse_direction(text.substr(pos + 2, close - pos - 1));
  };
  NVOrientation o{take(zpos), take(xpos)};
  o.validate();
  return o;
}

std::array<NVOrientation, 3> x_choices(const Eigen::Vector3i& z) {
  if ((z.array().abs() != 1).any()) throw Error("z_dir must be a <111> direction");
  // the 2 of a <112> axis sits at position j with the sign of z_j; the
  // remaining entries follow from perpendicularity
  std::array<NVOrientation, 3> out;
  for (int k = 0; k < 3; ++k) {
    const int j = (2 + k) % 3;
    Eigen::Vector3i x;
    for (int i = 0; i < 3; ++i) x(i) = i == j ? 2 * z(j) : -z(i);
    out[k] = {z, x};
  }
  return out;
}

std::array<NVOrientation, 4> figure_orientations() {
  std::array<NVOrientation, 4> out;
  const std::array<Eigen::Vector3i, 4> z{Eigen::Vector3i(-1, -1, -1), Eigen::Vector3i(1, 1, -1),
                                         Eigen::Vector3i(-1, 1, 1), Eigen::Vector3i(1, -1, 1)};
  for (int i = 0; i < 4; ++i) out[i] = x_choices(z[i])[0];
  return out;
}

std::vector<NVOrientation> orientation_catalogue() {
  std::vector<NVOrientation> out;
  for (const auto& f : figure_orientations())
    for (const auto& o : x_choices(f.z_dir)) out.push_back(o);
  return out;
}

Eigen::Matrix3d rotation_cryst_to_lab() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3d R;
  R << s, s, 0.0, -s, s, 0.0, 0.0, 0.0, 1.0;
  return R;
}

Eigen::Matrix3d rotation_cryst_to_nv(const NVOrientation& o) {
  o.validate();
  const Eigen::Vector3d x = unit(o.x_dir), z = unit(o.z_dir);
  Eigen::Matrix3d R;
  R.row(0) = x;
  R.row(1) = z.cross(x);
  R.row(2) = z;
  return R;
}

Eigen::Matrix3d transform_strain(const Eigen::Matrix3d& eps_lab, const NVOrientation& o) {
  if ((eps_lab - eps_lab.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(eps_lab.cwiseAbs().maxCoeff(), 1e-300))
    throw Error("strain tensor is not symmetric");
  const Eigen::Matrix3d R = rotation_cryst_to_nv(o) * rotation_cryst_to_lab().transpose();
  const Eigen::Matrix3d out = R * eps_lab * R.transpose();
  return 0.5 * (out + out.transpose());
}

CouplingSet project_strain(const Eigen::Matrix3d& e, const StrainSusceptibilities& sus) {
  CouplingSet g;
  g.g_E1 = sus.lambda_E * (e(1, 1) - e(0, 0)) + 2.0 * sus.lambda_Eprime * e(0, 2);
  g.g_E2 = 2.0 * (sus.lambda_E * e(0, 1) + sus.lambda_Eprime * e(1, 2));
  if (sus.lambda_A && sus.lambda_Aprime) g.g_A = *sus.lambda_A * e(2, 2) + *sus.lambda_Aprime * (e(0, 0) + e(1, 1));
  return g;
}

Eigen::Matrix3d lab_zero_point_strain(const ElasticMode& mode, const Eigen::Vector2d& position,
                                      const CouplingOptions& options) {
  Eigen::Matrix3d eps = zero_point_strain(mode, position);
  if (mode.disc->model() == Model::in_plane && options.plane_stress_zz) {
    const double nu = mode.disc->material(mode.disc->locate(position)->element).nu;
    eps(2, 2) = -nu * (eps(0, 0) + eps(1, 1)) / (1.0 - nu);
  }
  return eps;
}

CouplingSet coupling_coefficients(const ElasticMode& mode, const Eigen::Vector2d& position, const NVOrientation& o,
                                  const StrainSusceptibilities& sus, const CouplingOptions& options) {
  return project_strain(transform_strain(lab_zero_point_strain(mode, position, options), o), sus);
}

void Grid::validate() const {
  std::vector<std::string> bad;
  if (!(nx >= 1)) bad.push_back("nx must be >= 1");
  if (!(ny >= 1)) bad.push_back("ny must be >= 1");
  if (!(x1 >= x0)) bad.push_back("x1 must be >= x0");
  if (!(y1 >= y0)) bad.push_back("y1 must be >= y0");
  if (!bad.empty()) {
    std::string msg = "invalid grid:";
    for (const auto& b : bad) msg += " " + b + ";";
    msg.pop_back();
    throw Error(msg);
  }
}

std::vector<Eigen::Vector2d> Grid::points() const {
  validate();
  std::vector<Eigen::Vector2d> out;
  for (int j = 0; j < ny; ++j) {
    const double y = ny == 1 ? y0 : y0 + (y1 - y0) * j / (ny - 1);
    for (int i = 0; i < nx; ++i) out.emplace_back(nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1), y);
  }
  return out;
}

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ',');) parts.push_back(p);
  if (parts.size() != 6) throw Error("grid must read x0,y0,x1,y1,nx,ny");
  try {
    Grid g{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]),
           std::stoi(parts[4]), std::stoi(parts[5])};
    g.validate();
    return g;
  } catch (const std::logic_error&) {
    throw Error("grid must read x0,y0,x1,y1,nx,ny");
  }
}

CouplingMap coupling_map(const ElasticMode& mode, const std::vector<Eigen::Vector2d>& grid,
                         const std::vector<NVOrientation>& orientations, const StrainSusceptibilities& sus,
                         const CouplingOptions& options, int threads) {
  if (mode.norm != NormConvention::kinetic_unit) throw Error("mode not normalized");
  for (const auto& o : orientations) o.validate();
  std::vector<std::optional<std::vector<CouplingRow>>> per_point(grid.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < grid.size(); i += stride) {
      if (!mode.disc->locate(grid[i])) continue;
      const Eigen::Matrix3d lab = lab_zero_point_strain(mode, grid[i], options);
      std::vector<CouplingRow> rows;
      for (const auto& o : orientations) rows.push_back({grid[i], o, project_strain(transform_strain(lab, o), sus)});
      per_point[i] = std::move(rows);
    }
  };
  const std::size_t n = static_cast<std::size_t>(std::clamp(threads, 1, 64));
  if (n == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work, t, n);
    for (auto& t : pool) t.join();
  }
  CouplingMap map;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!per_point[i]) {
      map.skipped.push_back(grid[i]);
      continue;
    }
    for (auto& r : *per_point[i]) map.rows.push_back(std::move(r));
  }
  return map;
}

void write_coupling_csv(std::ostream& out, const CouplingMap& map) {
  out << "X,Y,orientation,g_A_hz,g_E1_hz,g_E2_hz\n";
  for (const auto& r : map.rows) {
    out << format_number(r.position.x()) << ',' << format_number(r.position.y()) << ',' << r.orientation.label() << ','
        << (r.g.g_A ? format_number(*r.g.g_A) : std::string()) << ',' << format_number(r.g.g_E1) << ','
        << format_number(r.g.g_E2) << '\n';
  }
}

double invariant_coupling_norm(const CouplingSet& g) { return std::hypot(g.g_E1, g.g_E2); }

StaticSplitting static_diagonalize(const CouplingSet& g) {
  const double a = g.g_A.value_or(0.0);
  const double e = invariant_coupling_norm(g);
  StaticSplitting s{{a - e, a + e}, 0.0, e == 0.0};
  if (!s.degenerate) s.mixing_angle = 0.5 * std::atan2(g.g_E2, g.g_E1);
  return s;
}

// ---------------------------------------------------------------------------

std::string to_string(GammaConvention c) { return c == GammaConvention::half ? "half" : "full"; }

GammaConvention gamma_convention_from_string(const std::string& name) {
  if (name == "half") return GammaConvention::half;
  if (name == "full") return GammaConvention::full;
  throw Error("unknown gamma convention '" + name + "' (expected half or full)");
}

double thermal_occupation(Frequency omega, double temperature) {
  if (temperature < 0.0) throw Error("temperature must be non-negative");
  if (temperature == 0.0) return 0.0;
  if (!(omega.angular() > 0.0)) throw Error("frequency must be positive");
  return 1.0 / std::expm1(hbar() * omega.angular() / (constants::k_B * temperature));
}

void CoolingInputs::validate() const {
  std::vector<std::string> bad;
  if (!(omega.angular() > 0.0)) bad.push_back("omega must be positive");
  if (!(q >= 1.0) || !std::isfinite(q)) bad.push_back("q must be >= 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) bad.push_back("temperature must be positive");
  if (!(gamma_xy_hz > 0.0) || !std::isfinite(gamma_xy_hz)) bad.push_back("gamma_xy must be positive");
  if (omega_r_hz && (!(*omega_r_hz > 0.0) || !std::isfinite(*omega_r_hz))) bad.push_back("omega_r must be positive");
  if (!bad.empty()) {
    std::string msg = "invalid cooling inputs:";
    for (const auto& b : bad) msg += " " + b + ";";
    msg.pop_back();
    throw Error(msg);
  }
}

double rethermalization_rate(const CoolingInputs& in) {
  in.validate();
  const double full = thermal_occupation(in.omega, in.temperature) * in.omega.hz() / in.q;
  return in.convention == GammaConvention::full ? full : 0.5 * full;
}

double cooperativity(double g_hz, double gamma_hz, double Gamma_hz) {
  if (!(gamma_hz > 0.0) || !(Gamma_hz > 0.0)) throw Error("zero denominator");
  return 4.0 * g_hz * g_hz / (gamma_hz * Gamma_hz);
}

OffResonantCooling offresonant_cooling_rate(double g_hz, double omega_r_hz, double gamma_xy_hz, double omega_hz,
                                            double gamma_th_hz) {
  if (!(gamma_xy_hz > 0.0) || !(omega_hz > 0.0)) throw Error("zero denominator");
  const double rate = g_hz * g_hz * omega_r_hz * omega_r_hz / (gamma_xy_hz * omega_hz * omega_hz);
  return {rate, rate > gamma_th_hz};
}

double resonant_cooling_rate(double g_hz, double omega_r_hz, double gamma_xy_hz) {
  if (!(gamma_xy_hz > 0.0)) throw Error("zero denominator");
  return 4.0 * g_hz * g_hz * omega_r_hz * omega_r_hz / std::pow(gamma_xy_hz, 3);
}

double final_occupation(double gamma_th_hz, double gamma_e2_hz) {
  if (!(gamma_e2_hz > 0.0)) throw Error("zero denominator");
  return gamma_th_hz / gamma_e2_hz;
}

double collective_rate(double gamma_single_hz, int n) {
  if (n < 1) throw Error("emitter count must be >= 1");
  return n * gamma_single_hz;
}

double collective_rate_for_volume(double gamma_ref_hz, double v_ref, double density, double v) {
  if (!(v > 0.0) || !(v_ref > 0.0) || !(density >= 0.0)) throw Error("volumes must be positive and density >= 0");
  return (density * v) * (gamma_ref_hz * v_ref / v);
}

CoolingReport cooling_report(const CoolingInputs& in, double g_hz) {
  in.validate();
  CoolingReport r{};
  r.convention = in.convention;
  r.n_th = thermal_occupation(in.omega, in.temperature);
  r.gamma_th_hz = rethermalization_rate(in);
  r.c = cooperativity(g_hz, r.gamma_th_hz, in.gamma_xy_hz);
  const auto off = offresonant_cooling_rate(g_hz, in.rabi_hz(), in.gamma_xy_hz, in.omega.hz(), r.gamma_th_hz);
  r.gamma_e1_hz = off.rate_hz;
  r.offresonant_efficient = off.efficient;
  r.gamma_e2_hz = resonant_cooling_rate(g_hz, in.rabi_hz(), in.gamma_xy_hz);
  r.n_fin = r.gamma_e2_hz > 0.0 ? final_occupation(r.gamma_th_hz, r.gamma_e2_hz) : INFINITY;
  return r;
}

CouplingReport coupling_report(const CouplingSet& g, const Eigen::Vector2d& position, const NVOrientation& o,
                               const CoolingInputs& in) {
  const auto e1 = cooling_report(in, g.g_E1);
  const auto e2 = cooling_report(in, g.g_E2);
  return {g, e1.n_th, e1.gamma_th_hz, e1.c, e2.c, e1.gamma_e1_hz, e2.gamma_e2_hz, e2.n_fin, position, o};
}

}  // namespace qad
