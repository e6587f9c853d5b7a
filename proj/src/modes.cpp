#include "qad/modes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace qad {

namespace {

double element_volume(const Discretization& disc, int e) { return disc.mesh().signed_area(e) * disc.thickness(); }

double kinetic_norm(const ElasticMode& mode) {
  const auto& disc = *mode.disc;
  double sum = 0.0;
  for (int e = 0; e < disc.num_elements(); ++e) {
    double s = 0.0;
    for (const auto& [L, w] : triangle_quadrature()) s += w * displacement_at(disc, mode.u, {e, L}).squaredNorm();
    sum += disc.material(e).rho * s * element_volume(disc, e);
  }
  return sum;
}

}  // namespace

EnergyDensity energy_density(const ElasticMode& mode) { return energy_density(mode, mode.disc->materials()); }

EnergyDensity energy_density(const ElasticMode& mode, const MaterialMap& materials) {
  const auto& disc = *mode.disc;
  const double omega = mode.omega.angular();
  const auto& quad = triangle_quadrature();
  EnergyDensity h;
  h.values.resize(static_cast<std::size_t>(disc.num_elements()));
  for (int e = 0; e < disc.num_elements(); ++e) {
    const auto& mat = materials.at(disc.mesh().centroid(e));
    const double vol = element_volume(disc, e);
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const MeshPoint q{e, quad[i].first};
      const auto [s, k] = energy_parts_at(disc, mode.u, omega, q, mat);
      h.values[e][i] = s + k;
      h.strain_energy += quad[i].second * vol * s;
      h.kinetic_energy += quad[i].second * vol * k;
      if (s + k > h.max) {
        h.max = s + k;
        h.argmax = q;
      }
    }
  }
  h.argmax_position = disc.position(h.argmax);
  const double scale = std::max(h.strain_energy, h.kinetic_energy);
  h.material_mismatch = scale > 0.0 && std::abs(h.strain_energy - h.kinetic_energy) > 1e-6 * scale;
  return h;
}

ModeVolume effective_volume(const ElasticMode& mode) { return effective_volume(mode, mode.disc->materials()); }

ModeVolume effective_volume(const ElasticMode& mode, const MaterialMap& materials) {
  const auto h = energy_density(mode, materials);
  if (!(h.max > 0.0) || !(h.total() > 0.0)) throw Error("null mode");
  ModeVolume v{};
  v.veff = h.total() / h.max;
  v.area = v.veff / mode.thickness();
  v.over_lambda_p3 = v.over_lambda_s3 = NAN;  // static fields have no wavelength
  if (mode.omega.angular() > 0.0) {
    const auto lambda = wavelengths(materials.at(h.argmax_position), mode.omega);
    v.over_lambda_p3 = v.veff / std::pow(lambda.longitudinal, 3);
    v.over_lambda_s3 = v.veff / std::pow(lambda.shear, 3);
  }
  return v;
}

NormalizationIntegrals normalization_integrals(const ElasticMode& mode) {
  const auto h = energy_density(mode);
  const double w2 = std::pow(mode.omega.angular(), 2);
  return {kinetic_norm(mode), w2 > 0.0 ? 2.0 * h.strain_energy / w2 : 0.0};
}

double equipartition_ratio(const ElasticMode& mode) {
  const auto h = energy_density(mode);
  if (!(h.strain_energy > 0.0)) throw Error("null mode");
  return h.kinetic_energy / h.strain_energy;
}

ElasticMode normalize(const ElasticMode& mode) {
  const double n = kinetic_norm(mode);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("null mode");
  ElasticMode out = mode;
  out.norm = NormConvention::kinetic_unit;
  if (std::abs(n - 1.0) <= 1e-12) return out;
  const double s = 1.0 / std::sqrt(n);
  out.u *= s;
  for (auto& eps : out.strain) eps *= s;
  return out;
}

Eigen::Matrix3d zero_point_strain(const ElasticMode& mode, const Eigen::Vector2d& position) {
  if (mode.norm != NormConvention::kinetic_unit) throw Error("mode not normalized");
  const auto q = mode.disc->locate(position);
  if (!q) throw Error("position outside mesh");
  const Eigen::Matrix3d eps = strain_at(*mode.disc, mode.u, *q);
  if (eps.isZero(0.0)) return eps;
  const double omega = mode.omega.angular();
  if (!(omega > 0.0)) throw Error("zero-frequency mode has no zero-point amplitude");
  return std::sqrt(hbar() / (2.0 * omega)) * eps;
}

std::vector<double> energy_profile(const ElasticMode& mode, const std::vector<double>& edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) throw Error("profile edges must be ascending");
  const auto h = energy_density(mode);
  if (!(h.total() > 0.0)) throw Error("null mode");
  const auto& disc = *mode.disc;
  const auto& quad = triangle_quadrature();
  std::vector<double> out(edges.size() - 1, 0.0);
  for (int e = 0; e < disc.num_elements(); ++e) {
    const double vol = element_volume(disc, e);
    for (std::size_t i = 0; i < quad.size(); ++i) {
      const double x = std::abs(disc.position({e, quad[i].first}).x());
      const auto it = std::upper_bound(edges.begin(), edges.end(), x);
      if (it == edges.begin() || it == edges.end()) continue;
      out[static_cast<std::size_t>(it - edges.begin() - 1)] += quad[i].second * vol * h.values[e][i];
    }
  }
  for (double& v : out) v /= h.total();
  return out;
}

CavityLocalization cavity_localization(const ElasticMode& mode, const CavityGeometry& geometry) {
  const auto layout = cavity_layout(geometry);
  std::vector<double> edges{0.0, layout.junction};
  for (int k = 1; k <= geometry.cells_per_side; ++k) edges.push_back(layout.junction + k * geometry.cell.lattice);
  edges.back() = std::max(edges.back(), layout.end) * (1.0 + 1e-12);
  const auto profile = energy_profile(mode, edges);
  CavityLocalization loc{};
  loc.defect_fraction = profile[0];
  loc.cell_fractions.assign(profile.begin() + 1, profile.end());
  loc.min_decades_per_cell = NAN;
  for (std::size_t k = 0; k + 1 < loc.cell_fractions.size(); ++k) {
    const double d = std::log10(loc.cell_fractions[k] / loc.cell_fractions[k + 1]);
    if (!(d >= loc.min_decades_per_cell)) loc.min_decades_per_cell = d;
  }
  loc.waist_strain = zero_point_strain(mode, Eigen::Vector2d::Zero()).norm();
  return loc;
}

std::optional<std::size_t> select_cavity_mode(const std::vector<ElasticMode>& modes, const CavityGeometry& geometry,
                                              double lo_hz, double hi_hz) {
  std::optional<std::size_t> best;
  double best_strain = -1.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double f = modes[i].omega.hz();
    if (f < lo_hz || f > hi_hz) continue;
    const auto loc = cavity_localization(modes[i], geometry);
    if (loc.defect_fraction < 0.5) continue;
    if (loc.waist_strain > best_strain) {
      best_strain = loc.waist_strain;
      best = i;
    }
  }
  return best;
}

ModeReport mode_report(const ElasticMode& mode) {
  const auto h = energy_density(mode);
  const auto v = effective_volume(mode);
  return {mode.omega.hz(),
          v.veff,
          v.over_lambda_p3,
          v.over_lambda_s3,
          h.strain_energy > 0.0 ? h.kinetic_energy / h.strain_energy : 0.0,
          h.max,
          mode.degenerate,
          h.material_mismatch};
}

// ---------------------------------------------------------------------------

void save_mode(const ElasticMode& mode, const std::filesystem::path& path, const std::string& header_comment) {
  const auto& disc = *mode.disc;
  std::ostringstream out;
  std::istringstream header(header_comment);
  for (std::string line; std::getline(header, line);) out << "# " << line << '\n';
  out << "model " << to_string(disc.model()) << '\n';
  out << "thickness " << format_number(disc.thickness()) << '\n';
  for (const auto& m : disc.materials().layers)
    out << "layer " << format_number(m.E) << ' ' << format_number(m.nu) << ' ' << format_number(m.rho) << '\n';
  for (double x : disc.materials().cuts) out << "cut " << format_number(x) << '\n';
  out << "omega " << format_number(mode.omega.angular()) << '\n';
  out << "norm " << (mode.norm == NormConvention::kinetic_unit ? "kinetic_unit" : "raw") << '\n';
  out << "degenerate " << (mode.degenerate ? 1 : 0) << '\n';
  out << to_text(disc.mesh());
  for (Eigen::Index i = 0; i < mode.u.size(); ++i) out << "u " << format_number(mode.u(i)) << '\n';
  std::ofstream file(path);
  if (!file) throw Error("cannot write " + path.string());
  file << out.str();
}

namespace {

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error("parse error at line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

ElasticMode load_mode(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot read " + path.string());
  std::string mesh_text, line;
  std::optional<Model> model;
  std::optional<double> thickness, omega;
  MaterialMap materials;
  materials.layers.clear();
  std::vector<double> u;
  NormConvention norm = NormConvention::raw;
  bool degenerate = false;
  for (int n = 1; std::getline(file, line); ++n) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    std::vector<std::string> args;
    for (std::string a; in >> a;) args.push_back(a);
    auto need = [&](std::size_t count) {
      if (args.size() != count) throw Error("parse error at line " + std::to_string(n) + ": '" + key + "' expects " +
                                            std::to_string(count) + " values");
    };
    if (key == "v" || key == "t" || key == "b" || key == "p") {
      mesh_text += line + '\n';
    } else if (key == "u") {
      need(1);
      u.push_back(parse_double(args[0], n));
    } else if (key == "model") {
      need(1);
      model = model_from_string(args[0]);
    } else if (key == "thickness") {
      need(1);
      thickness = parse_double(args[0], n);
    } else if (key == "layer") {
      need(3);
      materials.layers.push_back({parse_double(args[0], n), parse_double(args[1], n), parse_double(args[2], n)});
    } else if (key == "cut") {
      need(1);
      materials.cuts.push_back(parse_double(args[0], n));
    } else if (key == "omega") {
      need(1);
      omega = parse_double(args[0], n);
    } else if (key == "norm") {
      need(1);
      if (args[0] != "kinetic_unit" && args[0] != "raw")
        throw Error("parse error at line " + std::to_string(n) + ": unknown norm '" + args[0] + "'");
      norm = args[0] == "kinetic_unit" ? NormConvention::kinetic_unit : NormConvention::raw;
    } else if (key == "degenerate") {
      need(1);
      degenerate = args[0] == "1";
    } else {
      throw Error("parse error at line " + std::to_string(n) + ": unknown record '" + key + "'");
    }
  }
  if (!model || !thickness || !omega || materials.layers.empty())
    throw Error("mode file " + path.string() + " lacks model, thickness, omega or layer records");
  materials.validate();
  auto disc = std::make_shared<const Discretization>(from_text(mesh_text), *model, *thickness, materials);
  if (static_cast<int>(u.size()) != disc->num_dofs())
    throw Error("mode file has " + std::to_string(u.size()) + " displacement values, mesh needs " +
                std::to_string(disc->num_dofs()));
  ElasticMode mode;
  mode.omega = Frequency::from_angular(*omega);
  mode.u = Eigen::Map<const Field<double>>(u.data(), static_cast<Eigen::Index>(u.size()));
  mode.norm = norm;
  mode.degenerate = degenerate;
  mode.disc = disc;
  mode.strain.reserve(static_cast<std::size_t>(disc->num_elements()));
  for (int e = 0; e < disc->num_elements(); ++e)
    mode.strain.push_back(strain_at(*disc, mode.u, {e, Eigen::Vector3d::Constant(1.0 / 3.0)}));
  return mode;
}

}  // namespace qad
