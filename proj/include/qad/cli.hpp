// Command-line front end: one RunConfig per invocation, one subcommand per run.
//
// Every artifact starts with the resolved configuration (a `#` comment block
// in CSV and mode files, a "config" object in JSON).

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qad/core.hpp"
#include "qad/fem.hpp"
#include "qad/mesh.hpp"

namespace qad::cli {

struct WedgeRun {
  double theta = 0.15 * std::numbers::pi;
  double tip = 10e-9;
  double length = 20e-6;
  double force = -1.0;  // N/m
  double h = 0.5e-6;
  double refinement = 100.0;
  double r_min = 0.2e-6;
  double r_max = 2e-6;
  int samples = 41;
};

struct BandsRun {
  double lattice = 1.925e-6;
  double neck = 0.2e-6;
  double radius = 0.29e-6;
  double h = 0.08e-6;
  double thickness = 0.5e-6;
  int n_k = 32;
  int n_bands = 12;
};

struct ModesRun {
  CavityGeometry cavity = default_cavity();
  double h = 0.08e-6;
  double refinement = 4.0;
  double shift_hz = 2.4e9;
  int count = 20;
  Model model = Model::in_plane;
  double thickness = 0.5e-6;
  /// Selection window; when absent the complete gap of the mirror cell is used.
  std::optional<std::pair<double, double>> window_hz;
  int gap_n_k = 16;
  int gap_n_bands = 12;
};

struct CoupleRun {
  std::filesystem::path mode_file;
  std::vector<std::string> orientations;  // empty: the four figure orientations
  std::string grid = "-0.6e-6,-0.3e-6,0.6e-6,0.3e-6,121,61";
  double lambda_e = -0.85e15;
  double lambda_eprime = 0.02e15;
  std::optional<double> lambda_a;
  std::optional<double> lambda_aprime;
  bool plane_stress_zz = true;
};

struct CoolRun {
  std::optional<double> g_hz;
  double omega_hz = 2.838e9;
  double q = 1e5;
  double temp_k = 4.0;
  double gamma_xy_hz = 15e6;
  std::optional<double> omega_r_hz;
  std::string convention = "full";
};

struct OracleRun {
  std::string kind = "wedge";  // wedge | layers
  double theta = 0.15 * std::numbers::pi;
  double force = -1.0;
  std::vector<double> phi{0.0};
  double r_min = 0.2e-6;
  double r_max = 2e-6;
  int samples = 41;
  std::string layers;  // "length:density:modulus;..."
  double f_max_hz = 10e9;
};

struct RunConfig {
  std::string subcommand;
  std::filesystem::path out = ".";
  int threads = 1;
  IsotropicMaterial material;
  WedgeRun wedge;
  BandsRun bands;
  ModesRun modes;
  CoupleRun couple;
  CoolRun cool;
  OracleRun oracle;
};

/// Every violated field of the active subcommand; empty when valid.
std::vector<std::string> validate(const RunConfig& config);

/// Resolved key/value pairs of the globals and the active subcommand.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& config);

/// Validates (Error "invalid config: ..." listing every problem), then solves
/// and writes the artifacts into config.out.
void run(const RunConfig& config);

/// Parses argv (flags override --config), runs, and maps errors to a nonzero
/// status with a single `error: ...` line on stderr.
int main(int argc, char** argv);

}  // namespace qad::cli
