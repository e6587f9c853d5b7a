#include "qad/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qad/modes.hpp"
#include "qad/nv.hpp"
#include "qad/oracles.hpp"

namespace qad::cli {

namespace {

using Json = nlohmann::ordered_json;
using Pairs = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) { return format_number(v); }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("bad number in " + what + ": '" + s + "'");
}

LayerStack parse_layers(const std::string& text) {
  LayerStack stack;
  for (const auto& item : split(text, ';')) {
    const auto f = split(item, ':');
    if (f.size() != 3) throw Error("layer '" + item + "' is not length:density:modulus");
    stack.layers.push_back({parse_double(f[0], "layers"), parse_double(f[1], "layers"), parse_double(f[2], "layers")});
  }
  stack.validate();
  return stack;
}

std::vector<NVOrientation> resolve_orientations(const std::vector<std::string>& texts) {
  if (texts.empty()) {
    const auto f = figure_orientations();
    return {f.begin(), f.end()};
  }
  std::vector<NVOrientation> out;
  for (const auto& t : texts) out.push_back(parse_orientation(t));
  return out;
}

std::vector<double> log_samples(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1));
  return r;
}

// ---------------------------------------------------------------------------
// Output helpers

std::string header_text(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : describe(c)) s += k + " = " + v + "\n";
  return s;
}

std::ofstream open(const RunConfig& c, const std::string& name) {
  std::ofstream f(c.out / name);
  if (!f) throw Error("cannot write " + (c.out / name).string());
  return f;
}

void write_csv_header(std::ostream& out, const RunConfig& c) {
  for (const auto& [k, v] : describe(c)) out << "# " << k << " = " << v << '\n';
}

void write_json(const RunConfig& c, const std::string& name, Json body) {
  Json doc;
  Json cfg;
  for (const auto& [k, v] : describe(c)) cfg[k] = v;
  doc["config"] = cfg;
  for (auto& [k, v] : body.items()) doc[k] = v;
  auto f = open(c, name);
  f << doc.dump(2) << '\n';
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------------------
// Subcommands

void run_wedge(const RunConfig& c) {
  const auto& w = c.wedge;
  const auto mesh = generate({WedgeGeometry{w.theta, w.tip, w.length}, w.h, w.refinement});
  const auto sys = assemble(mesh, c.material, Model::in_plane, 1.0);
  StaticProblem prob;
  prob.edge_loads.push_back({BoundaryTag::load, {w.force / w.tip, 0.0}});
  const auto sol = solve_static(sys, prob);

  // r is measured from the virtual apex behind the truncated tip
  const double apex = 0.5 * w.tip / std::tan(w.theta);
  const WedgeSpec spec{w.force, w.theta, c.material.E};
  auto csv = open(c, "wedge.csv");
  write_csv_header(csv, c);
  csv << "r,phi,e_rr_fem,e_rr_formula,e_rr_balanced\n";
  double sx = 0, sy = 0, sxx = 0, sxy = 0, dev_formula = 0, dev_balanced = 0;
  const auto radii = log_samples(w.r_min, w.r_max, w.samples);
  for (double r : radii) {
    const auto q = sys.disc->locate({r - apex, 0.0});
    if (!q) throw Error("sample r = " + num(r) + " lies outside the wedge mesh");
    const double fem = strain_at(*sys.disc, sol.u, *q)(0, 0);
    const double a = wedge_strain(spec, r, 0.0).rr, b = wedge_strain_balanced(spec, r, 0.0).rr;
    csv << num(r) << ",0," << num(fem) << ',' << num(a) << ',' << num(b) << '\n';
    dev_formula = std::max(dev_formula, std::abs(fem / a - 1));
    dev_balanced = std::max(dev_balanced, std::abs(fem / b - 1));
    const double x = std::log(r), y = std::log(std::abs(fem));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = radii.size();
  const double slope = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : NAN;
  write_json(c, "wedge.json",
             {{"slope", number_or_null(slope)},
              {"max_rel_dev_formula", dev_formula},
              {"max_rel_dev_balanced", dev_balanced},
              {"static_residual", sol.residual},
              {"nodes", mesh.nodes.size()}});
}

void run_bands(const RunConfig& c) {
  const auto& b = c.bands;
  const auto mesh = generate({UnitCellGeometry{b.lattice, b.neck, b.radius}, b.h});
  const auto bs = band_structure(mesh, c.material, b.n_k, b.n_bands, {b.thickness, c.threads});
  auto csv = open(c, "bands.csv");
  write_csv_header(csv, c);
  write_bands_csv(csv, bs);
  Json gaps = Json::array();
  double widest = 0.0;
  for (const auto& [lo, hi] : bs.gaps) {
    gaps.push_back({{"lo_hz", lo}, {"hi_hz", hi}, {"width_hz", hi - lo}});
    widest = std::max(widest, hi - lo);
  }
  write_json(c, "gaps.json", {{"gaps", gaps}, {"widest_gap_hz", widest}});
}

std::pair<double, double> selection_window(const RunConfig& c) {
  const auto& m = c.modes;
  if (m.window_hz) return *m.window_hz;
  const auto& cell = m.cavity.cell;
  const auto mesh = generate({UnitCellGeometry{cell.lattice, cell.neck, cell.radius}, m.h});
  const auto bs = band_structure(mesh, c.material, m.gap_n_k, m.gap_n_bands, {m.thickness, c.threads});
  if (bs.gaps.empty()) throw Error("mirror cell has no complete gap; pass --window-hz");
  auto best = bs.gaps.front();
  for (const auto& g : bs.gaps) {
    if (g.first <= m.shift_hz && m.shift_hz <= g.second) return g;
    if (g.second - g.first > best.second - best.first) best = g;
  }
  return best;
}

void run_modes(const RunConfig& c) {
  const auto& m = c.modes;
  const auto window = selection_window(c);
  const auto mesh = generate({m.cavity, m.h, m.refinement});
  const auto sys = assemble(mesh, c.material, m.model, m.thickness);
  std::vector<ElasticMode> modes;
  for (const auto& mode : solve_modes(sys, Frequency::from_hz(m.shift_hz), m.count)) modes.push_back(normalize(mode));

  const std::string header = header_text(c);
  Json list = Json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "mode_%03zu", i);
    save_mode(modes[i], c.out / (std::string(stem) + ".mode"), header);
    auto field = open(c, std::string(stem) + ".csv");
    write_csv_header(field, c);
    write_field_csv(field, *modes[i].disc, modes[i].u, modes[i].omega.angular());

    const auto r = mode_report(modes[i]);
    const auto loc = cavity_localization(modes[i], m.cavity);
    list.push_back({{"index", i},
                    {"frequency_hz", r.frequency_hz},
                    {"veff_m3", r.veff_m3},
                    {"veff_over_lambda_p3", number_or_null(r.veff_over_lambda_p3)},
                    {"veff_over_lambda_s3", number_or_null(r.veff_over_lambda_s3)},
                    {"equipartition_ratio", r.equipartition_ratio},
                    {"max_h_j_per_m3", r.max_h_j_per_m3},
                    {"degenerate", r.degenerate},
                    {"material_mismatch", r.material_mismatch},
                    {"defect_fraction", loc.defect_fraction},
                    {"cell_fractions", loc.cell_fractions},
                    {"min_decades_per_cell", number_or_null(loc.min_decades_per_cell)},
                    {"waist_strain", loc.waist_strain},
                    {"file", std::string(stem) + ".mode"}});
  }
  const auto chosen = select_cavity_mode(modes, m.cavity, window.first, window.second);
  write_json(c, "modes.json",
             {{"window_hz", {window.first, window.second}},
              {"selected", chosen ? Json(*chosen) : Json(nullptr)},
              {"modes", list}});
}

void run_couple(const RunConfig& c) {
  const auto& p = c.couple;
  auto mode = load_mode(p.mode_file);
  if (mode.norm != NormConvention::kinetic_unit) mode = normalize(mode);
  StrainSusceptibilities sus;
  sus.lambda_E = p.lambda_e;
  sus.lambda_Eprime = p.lambda_eprime;
  sus.lambda_A = p.lambda_a;
  sus.lambda_Aprime = p.lambda_aprime;
  const auto map = coupling_map(mode, parse_grid(p.grid).points(), resolve_orientations(p.orientations), sus,
                                {p.plane_stress_zz}, c.threads);
  auto csv = open(c, "couplings.csv");
  write_csv_header(csv, c);
  write_coupling_csv(csv, map);

  const CouplingRow* best[2] = {nullptr, nullptr};
  for (const auto& row : map.rows) {
    if (!best[0] || std::abs(row.g.g_E1) > std::abs(best[0]->g.g_E1)) best[0] = &row;
    if (!best[1] || std::abs(row.g.g_E2) > std::abs(best[1]->g.g_E2)) best[1] = &row;
  }
  auto entry = [](const CouplingRow* row, double g) -> Json {
    if (!row) return nullptr;
    return {{"abs_hz", std::abs(g)}, {"X", row->position.x()}, {"Y", row->position.y()},
            {"orientation", row->orientation.label()}};
  };
  write_json(c, "couple.json",
             {{"frequency_hz", mode.omega.hz()},
              {"rows", map.rows.size()},
              {"skipped", map.skipped.size()},
              {"max_g_e1", entry(best[0], best[0] ? best[0]->g.g_E1 : 0.0)},
              {"max_g_e2", entry(best[1], best[1] ? best[1]->g.g_E2 : 0.0)}});
}

CoolingInputs cooling_inputs(const CoolRun& p) {
  CoolingInputs in;
  in.omega = Frequency::from_hz(p.omega_hz);
  in.q = p.q;
  in.temperature = p.temp_k;
  in.gamma_xy_hz = p.gamma_xy_hz;
  in.omega_r_hz = p.omega_r_hz;
  in.convention = gamma_convention_from_string(p.convention);
  return in;
}

void run_cool(const RunConfig& c) {
  const auto r = cooling_report(cooling_inputs(c.cool), *c.cool.g_hz);
  write_json(c, "cool.json",
             {{"n_th", r.n_th},
              {"gamma_th_hz", r.gamma_th_hz},
              {"c", r.c},
              {"gamma_e1_hz", r.gamma_e1_hz},
              {"gamma_e2_hz", r.gamma_e2_hz},
              {"n_fin", r.n_fin},
              {"convention", to_string(r.convention)},
              {"offresonant_efficient", r.offresonant_efficient}});
}

void run_oracle(const RunConfig& c) {
  const auto& o = c.oracle;
  auto csv = open(c, "oracle.csv");
  write_csv_header(csv, c);
  if (o.kind == "wedge") {
    const WedgeSpec spec{o.force, o.theta, c.material.E};
    csv << "r,phi,e_rr\n";
    for (double phi : o.phi)
      for (double r : log_samples(o.r_min, o.r_max, o.samples))
        csv << num(r) << ',' << num(phi) << ',' << num(wedge_strain(spec, r, phi).rr) << '\n';
  } else {
    const auto stack = parse_layers(o.layers);
    csv << "f_hz,cos_ka\n";
    for (int i = 1; i <= o.samples; ++i) {
      const double f = o.f_max_hz * i / o.samples;
      csv << num(f) << ',' << num(layered_dispersion(stack, Frequency::from_hz(f))) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

struct Checker {
  std::vector<std::string> bad;
  void positive(double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) bad.push_back(name + " must be positive");
  }
  void at_least(int v, int lo, const std::string& name) {
    if (v < lo) bad.push_back(name + " must be >= " + std::to_string(lo));
  }
  void expect(bool ok, const std::string& message) {
    if (!ok) bad.push_back(message);
  }
  template <class F>
  void no_throw(F f, const std::string& name) {
    try {
      f();
    } catch (const std::exception& e) {
      bad.push_back(name + ": " + e.what());
    }
  }
};

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
  Checker k;
  k.no_throw([&] { c.material.validate(); }, "material");
  k.at_least(c.threads, 1, "threads");
  const double half_pi = std::numbers::pi / 2;
  if (c.subcommand == "wedge") {
    const auto& w = c.wedge;
    k.expect(w.theta > 0 && w.theta < half_pi, "theta must lie in (0, pi/2)");
    k.positive(w.tip, "tip");
    k.positive(w.length, "length");
    k.expect(w.force != 0.0 && std::isfinite(w.force), "force must be non-zero");
    k.positive(w.h, "h");
    k.expect(w.refinement >= 1.0, "refinement must be >= 1");
    k.positive(w.r_min, "r_min");
    k.expect(w.r_max > w.r_min, "r_max must exceed r_min");
    k.expect(w.r_max < w.length, "r_max must lie inside the wedge");
    k.at_least(w.samples, 2, "samples");
  } else if (c.subcommand == "bands") {
    const auto& b = c.bands;
    k.positive(b.lattice, "lattice");
    k.positive(b.neck, "neck");
    k.positive(b.radius, "radius");
    k.expect(2 * b.radius < b.lattice, "radius must be below lattice / 2");
    k.expect(b.neck + 2 * b.radius < b.lattice, "neck + 2 radius must be below lattice");
    k.positive(b.h, "h");
    k.positive(b.thickness, "thickness");
    k.at_least(b.n_k, 2, "n_k");
    k.at_least(b.n_bands, 1, "n_bands");
  } else if (c.subcommand == "modes") {
    const auto& m = c.modes;
    k.positive(m.cavity.waist, "waist");
    k.positive(m.cavity.block_flat, "block_flat");
    k.positive(m.cavity.block_height, "block_height");
    k.positive(m.cavity.curvature, "curvature");
    k.expect(m.cavity.half_angle > 0 && m.cavity.half_angle < half_pi, "half_angle must lie in (0, pi/2)");
    k.positive(m.cavity.cell.lattice, "lattice");
    k.positive(m.cavity.cell.neck, "neck");
    k.positive(m.cavity.cell.radius, "radius");
    k.at_least(m.cavity.cells_per_side, 1, "cells");
    k.positive(m.h, "h");
    k.expect(m.refinement >= 1.0, "refinement must be >= 1");
    k.expect(m.shift_hz >= 0.0, "shift_hz must be non-negative");
    k.at_least(m.count, 1, "count");
    k.positive(m.thickness, "thickness");
    if (m.window_hz) k.expect(m.window_hz->first < m.window_hz->second, "window_hz must be lo,hi with lo < hi");
    k.at_least(m.gap_n_k, 2, "gap_n_k");
    k.at_least(m.gap_n_bands, 1, "gap_n_bands");
  } else if (c.subcommand == "couple") {
    const auto& p = c.couple;
    k.expect(!p.mode_file.empty(), "mode is required");
    k.expect(p.mode_file.empty() || std::filesystem::exists(p.mode_file), "mode file not found: " + p.mode_file.string());
    for (const auto& o : p.orientations) k.no_throw([&] { parse_orientation(o); }, "orientation '" + o + "'");
    k.no_throw([&] { parse_grid(p.grid); }, "grid");
    k.expect(p.lambda_a.has_value() == p.lambda_aprime.has_value(), "lambda_a and lambda_aprime go together");
  } else if (c.subcommand == "cool") {
    const auto& p = c.cool;
    k.expect(p.g_hz.has_value(), "g_hz is required");
    if (p.g_hz) k.expect(std::isfinite(*p.g_hz), "g_hz must be finite");
    k.positive(p.omega_hz, "omega_hz");
    k.no_throw([&] { gamma_convention_from_string(p.convention); }, "gamma_convention");
    if (p.omega_hz > 0 && std::isfinite(p.omega_hz)) {
      CoolingInputs in;
      in.omega = Frequency::from_hz(p.omega_hz);
      in.q = p.q;
      in.temperature = p.temp_k;
      in.gamma_xy_hz = p.gamma_xy_hz;
      in.omega_r_hz = p.omega_r_hz;
      k.no_throw([&] { in.validate(); }, "cooling inputs");
    }
  } else if (c.subcommand == "oracle") {
    const auto& o = c.oracle;
    k.expect(o.kind == "wedge" || o.kind == "layers", "kind must be wedge or layers");
    k.at_least(o.samples, 1, "samples");
    if (o.kind == "wedge") {
      k.expect(o.theta > 0 && o.theta < half_pi, "theta must lie in (0, pi/2)");
      k.positive(o.r_min, "r_min");
      k.expect(o.r_max >= o.r_min, "r_max must not be below r_min");
      for (double phi : o.phi) k.expect(std::abs(phi) <= o.theta, "phi " + num(phi) + " lies outside the wedge");
    } else if (o.kind == "layers") {
      k.no_throw([&] { parse_layers(o.layers); }, "layers");
      k.positive(o.f_max_hz, "f_max_hz");
    }
  } else {
    k.bad.push_back("unknown subcommand '" + c.subcommand + "'");
  }
  return k.bad;
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& c) {
  Pairs p{{"subcommand", c.subcommand},
          {"out", c.out.string()},
          {"threads", std::to_string(c.threads)},
          {"E", num(c.material.E)},
          {"nu", num(c.material.nu)},
          {"rho", num(c.material.rho)}};
  auto add = [&](const std::string& k, double v) { p.emplace_back(k, num(v)); };
  auto addi = [&](const std::string& k, int v) { p.emplace_back(k, std::to_string(v)); };
  auto addo = [&](const std::string& k, const std::optional<double>& v) { p.emplace_back(k, v ? num(*v) : "none"); };
  if (c.subcommand == "wedge") {
    const auto& w = c.wedge;
    add("theta", w.theta), add("tip", w.tip), add("length", w.length), add("force", w.force), add("h", w.h);
    add("refinement", w.refinement), add("r_min", w.r_min), add("r_max", w.r_max), addi("samples", w.samples);
  } else if (c.subcommand == "bands") {
    const auto& b = c.bands;
    add("lattice", b.lattice), add("neck", b.neck), add("radius", b.radius), add("h", b.h);
    add("thickness", b.thickness), addi("n_k", b.n_k), addi("n_bands", b.n_bands);
  } else if (c.subcommand == "modes") {
    const auto& m = c.modes;
    add("waist", m.cavity.waist), add("block_flat", m.cavity.block_flat), add("block_height", m.cavity.block_height);
    add("curvature", m.cavity.curvature), add("half_angle", m.cavity.half_angle);
    add("lattice", m.cavity.cell.lattice), add("neck", m.cavity.cell.neck), add("radius", m.cavity.cell.radius);
    addi("cells", m.cavity.cells_per_side), p.emplace_back("termination", to_string(m.cavity.termination));
    add("h", m.h), add("refinement", m.refinement), add("shift_hz", m.shift_hz), addi("count", m.count);
    p.emplace_back("model", to_string(m.model)), add("thickness", m.thickness);
    p.emplace_back("window_hz", m.window_hz ? num(m.window_hz->first) + "," + num(m.window_hz->second) : "gap");
    addi("gap_n_k", m.gap_n_k), addi("gap_n_bands", m.gap_n_bands);
  } else if (c.subcommand == "couple") {
    const auto& q = c.couple;
    p.emplace_back("mode", q.mode_file.string());
    std::vector<std::string> labels;
    try {
      for (const auto& o : resolve_orientations(q.orientations)) labels.push_back(o.label());
    } catch (const Error&) {
      labels = q.orientations;
    }
    p.emplace_back("orientation", join(labels, " "));
    p.emplace_back("grid", q.grid);
    add("lambda_e", q.lambda_e), add("lambda_eprime", q.lambda_eprime);
    addo("lambda_a", q.lambda_a), addo("lambda_aprime", q.lambda_aprime);
    p.emplace_back("plane_stress_zz", q.plane_stress_zz ? "true" : "false");
  } else if (c.subcommand == "cool") {
    const auto& q = c.cool;
    addo("g_hz", q.g_hz), add("omega_hz", q.omega_hz), add("q", q.q), add("temp_k", q.temp_k);
    add("gamma_xy_hz", q.gamma_xy_hz), addo("omega_r_hz", q.omega_r_hz);
    p.emplace_back("gamma_convention", q.convention);
  } else if (c.subcommand == "oracle") {
    const auto& o = c.oracle;
    p.emplace_back("kind", o.kind);
    if (o.kind == "layers") {
      p.emplace_back("layers", o.layers), add("f_max_hz", o.f_max_hz);
    } else {
      std::vector<std::string> phis;
      for (double x : o.phi) phis.push_back(num(x));
      add("theta", o.theta), add("force", o.force), p.emplace_back("phi", join(phis, ","));
      add("r_min", o.r_min), add("r_max", o.r_max);
    }
    addi("samples", o.samples);
  }
  return p;
}

void run(const RunConfig& c) {
  const auto bad = validate(c);
  if (!bad.empty()) throw Error("invalid config: " + join(bad, "; "));
  std::filesystem::create_directories(c.out);
  if (c.subcommand == "wedge") run_wedge(c);
  else if (c.subcommand == "bands") run_bands(c);
  else if (c.subcommand == "modes") run_modes(c);
  else if (c.subcommand == "couple") run_couple(c);
  else if (c.subcommand == "cool") run_cool(c);
  else run_oracle(c);
}

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Phononic cavity toolkit: lightning-rod wedge, Bloch bands, cavity modes, NV couplings and cooling."};
  app.name("qad");
  app.set_config("--config", "", "INI file; [section] per subcommand, command-line flags win");
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string out = ".";
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->capture_default_str();
  app.add_option("--E", c.material.E, "Young's modulus [Pa]")->capture_default_str();
  app.add_option("--nu", c.material.nu, "Poisson ratio")->capture_default_str();
  app.add_option("--rho", c.material.rho, "density [kg/m^3]")->capture_default_str();

  auto* wedge = app.add_subcommand("wedge", "static FEM of the truncated wedge against the 1/r law");
  auto& w = c.wedge;
  wedge->add_option("--theta", w.theta, "half angle [rad]")->capture_default_str();
  wedge->add_option("--tip", w.tip, "tip width [m]")->capture_default_str();
  wedge->add_option("--length", w.length, "wedge length [m]")->capture_default_str();
  wedge->add_option("--force", w.force, "tip force per unit thickness [N/m]")->capture_default_str();
  wedge->add_option("--mesh-size", w.h, "element size [m]")->capture_default_str();
  wedge->add_option("--refinement", w.refinement, "size reduction at the tip")->capture_default_str();
  wedge->add_option("--r-min", w.r_min, "first sample radius from the apex [m]")->capture_default_str();
  wedge->add_option("--r-max", w.r_max, "last sample radius [m]")->capture_default_str();
  wedge->add_option("--samples", w.samples, "log-spaced samples")->capture_default_str();

  auto* bands = app.add_subcommand("bands", "Bloch bands and complete gaps of the unit cell");
  auto& b = c.bands;
  bands->add_option("--lattice", b.lattice, "A [m]")->capture_default_str();
  bands->add_option("--neck", b.neck, "B [m]")->capture_default_str();
  bands->add_option("--radius", b.radius, "R [m]")->capture_default_str();
  bands->add_option("--mesh-size", b.h, "element size [m]")->capture_default_str();
  bands->add_option("--thickness", b.thickness, "slab thickness [m]")->capture_default_str();
  bands->add_option("--n-k", b.n_k, "k samples over [0, pi/A]")->capture_default_str();
  bands->add_option("--n-bands", b.n_bands, "bands per family")->capture_default_str();

  auto* modes = app.add_subcommand("modes", "cavity eigenmodes, mode volumes and mode files");
  auto& m = c.modes;
  std::string model = to_string(m.model);
  std::vector<double> window;
  modes->add_option("--waist", m.cavity.waist, "d [m]")->capture_default_str();
  modes->add_option("--block-flat", m.cavity.block_flat, "c [m]")->capture_default_str();
  modes->add_option("--block-height", m.cavity.block_height, "e [m]")->capture_default_str();
  modes->add_option("--curvature", m.cavity.curvature, "r' [m]")->capture_default_str();
  modes->add_option("--half-angle", m.cavity.half_angle, "theta [rad]")->capture_default_str();
  modes->add_option("--lattice", m.cavity.cell.lattice, "A [m]")->capture_default_str();
  modes->add_option("--neck", m.cavity.cell.neck, "B [m]")->capture_default_str();
  modes->add_option("--radius", m.cavity.cell.radius, "R [m]")->capture_default_str();
  modes->add_option("--cells", m.cavity.cells_per_side, "crystal cells per side")->capture_default_str();
  modes->add_option("--mesh-size", m.h, "element size [m]")->capture_default_str();
  modes->add_option("--refinement", m.refinement, "size reduction at the waist")->capture_default_str();
  modes->add_option("--shift-hz", m.shift_hz, "target frequency [Hz]")->capture_default_str();
  modes->add_option("--count", m.count, "modes nearest the shift")->capture_default_str();
  modes->add_option("--model", model, "in_plane or out_of_plane")->capture_default_str();
  modes->add_option("--thickness", m.thickness, "slab thickness [m]")->capture_default_str();
  modes->add_option("--window-hz", window, "selection window lo,hi [Hz]; default: complete gap of the cell")
      ->expected(2)
      ->delimiter(',');
  modes->add_option("--gap-n-k", m.gap_n_k, "k samples for the gap window")->capture_default_str();
  modes->add_option("--gap-n-bands", m.gap_n_bands, "bands per family for the gap window")->capture_default_str();

  auto* couple = app.add_subcommand("couple", "NV strain-coupling map of a mode file");
  auto& q = c.couple;
  std::string mode_file;
  double lambda_a = 0, lambda_aprime = 0;
  bool no_zz = false;
  couple->add_option("--mode", mode_file, "mode file written by `modes`");
  couple->add_option("--orientation", q.orientations, "z=[...],x=[...] (repeatable; default: figure set)");
  couple->add_option("--grid", q.grid, "x0,y0,x1,y1,nx,ny [m]")->capture_default_str();
  couple->add_option("--lambda-e", q.lambda_e, "[Hz]")->capture_default_str();
  couple->add_option("--lambda-eprime", q.lambda_eprime, "[Hz]")->capture_default_str();
  auto* la = couple->add_option("--lambda-a", lambda_a, "[Hz], enables g_A");
  auto* lap = couple->add_option("--lambda-aprime", lambda_aprime, "[Hz], enables g_A");
  couple->add_flag("--no-plane-stress-zz", no_zz, "leave eps_ZZ = 0 for in-plane modes");

  auto* cool = app.add_subcommand("cool", "cooperativity and cooling figures for one coupling");
  auto& k = c.cool;
  double g_hz = 0, omega_r = 0;
  auto* g_opt = cool->add_option("--g-hz", g_hz, "coupling g/2pi [Hz]");
  cool->add_option("--omega-hz", k.omega_hz, "mechanical frequency [Hz]")->capture_default_str();
  cool->add_option("--q", k.q, "mechanical quality factor")->capture_default_str();
  cool->add_option("--temp-k", k.temp_k, "bath temperature [K]")->capture_default_str();
  cool->add_option("--gamma-xy-hz", k.gamma_xy_hz, "orbital dephasing [Hz]")->capture_default_str();
  auto* or_opt = cool->add_option("--omega-r-hz", omega_r, "Rabi frequency [Hz]; default gamma-xy");
  cool->add_option("--gamma-convention", k.convention, "half or full")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "closed-form references as CSV");
  auto& o = c.oracle;
  oracle->add_option("--kind", o.kind, "wedge or layers")->capture_default_str();
  oracle->add_option("--theta", o.theta, "wedge half angle [rad]")->capture_default_str();
  oracle->add_option("--force", o.force, "tip force per unit thickness [N/m]")->capture_default_str();
  oracle->add_option("--phi", o.phi, "polar angles [rad]")->delimiter(',');
  oracle->add_option("--r-min", o.r_min, "[m]")->capture_default_str();
  oracle->add_option("--r-max", o.r_max, "[m]")->capture_default_str();
  oracle->add_option("--samples", o.samples, "samples per curve")->capture_default_str();
  oracle->add_option("--layers", o.layers, "length:density:modulus;... [SI]");
  oracle->add_option("--f-max-hz", o.f_max_hz, "upper frequency [Hz]")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    c.subcommand = app.get_subcommands().front()->get_name();
    c.out = out;
    m.model = model_from_string(model);
    if (!window.empty()) m.window_hz = std::pair{window[0], window[1]};
    q.mode_file = mode_file;
    if (la->count()) q.lambda_a = lambda_a;
    if (lap->count()) q.lambda_aprime = lambda_aprime;
    q.plane_stress_zz = !no_zz;
    if (g_opt->count()) k.g_hz = g_hz;
    if (or_opt->count()) k.omega_r_hz = omega_r;
    run(c);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "error: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qad::cli
