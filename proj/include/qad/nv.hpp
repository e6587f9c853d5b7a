// Colour-centre strain coupling: crystal/lab/NV rotations, projection of the
// zero-point strain onto the A, E1 and E2 channels of C3v, and the
// cooperativity and cooling-rate formulas built on them.
//
// Rates and couplings are ordinary frequencies in Hz (g means g/2pi). The lab
// frame has X along [110], Y along [-110], Z along [001].

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qad/core.hpp"
#include "qad/modes.hpp"

namespace qad {

/// NV axis z_dir (a <111> direction) and local x axis x_dir (a <112> direction
/// perpendicular to it), both in cubic crystal coordinates.
struct NVOrientation {
  Eigen::Vector3i z_dir;
  Eigen::Vector3i x_dir;

  /// Throws Error unless both are non-zero and perpendicular.
  void validate() const;
  /// Bar notation for negatives written as a leading minus: "[-1-1-1]([11-2])".
  std::string label() const;
};

/// Parses "z=[-1-1-1],x=[11-2]" (digits may be comma separated inside brackets).
NVOrientation parse_orientation(const std::string& text);

/// The four orientations of the coupling-map figure:
/// [-1-1-1]([11-2]), [11-1]([-1-1-2]), [-111]([1-12]), [1-11]([-112]).
std::array<NVOrientation, 4> figure_orientations();
/// For one z_dir, the three x_dir choices related by the threefold rotation about z.
std::array<NVOrientation, 3> x_choices(const Eigen::Vector3i& z_dir);
/// All twelve (z, x) pairs, grouped by z in figure order.
std::vector<NVOrientation> orientation_catalogue();

Eigen::Matrix3d rotation_cryst_to_lab();
/// Rows: x_dir, z_dir cross x_dir, z_dir (normalized).
Eigen::Matrix3d rotation_cryst_to_nv(const NVOrientation& o);
/// R eps R^T with R = R_cryst_to_nv R_cryst_to_lab^T. Throws Error for asymmetric input.
Eigen::Matrix3d transform_strain(const Eigen::Matrix3d& eps_lab, const NVOrientation& o);

struct StrainSusceptibilities {
  std::optional<double> lambda_A;       // Hz, no default
  std::optional<double> lambda_Aprime;  // Hz, no default
  double lambda_E = -0.85e15;           // Hz
  double lambda_Eprime = 0.02e15;       // Hz
};

struct CouplingSet {
  std::optional<double> g_A;  // Hz, present only with both lambda_A values
  double g_E1 = 0.0;          // Hz
  double g_E2 = 0.0;          // Hz
};

/// Channel projection of an NV-frame (zero-point) strain tensor:
/// g_E1 = lambda_E (eyy - exx) + 2 lambda_E' exz, g_E2 = 2 (lambda_E exy + lambda_E' eyz),
/// g_A = lambda_A ezz + lambda_A' (exx + eyy).
CouplingSet project_strain(const Eigen::Matrix3d& eps_nv, const StrainSusceptibilities& sus);

struct CouplingOptions {
  /// Add the plane-stress eps_ZZ = -nu (eps_XX + eps_YY) / (1 - nu) to in-plane modes.
  bool plane_stress_zz = true;
};

/// Lab-frame zero-point strain at a point, padded to 3D.
Eigen::Matrix3d lab_zero_point_strain(const ElasticMode& mode, const Eigen::Vector2d& position,
                                      const CouplingOptions& options = {});

/// Requires a kinetic_unit mode; throws Error("position outside mesh").
CouplingSet coupling_coefficients(const ElasticMode& mode, const Eigen::Vector2d& position, const NVOrientation& o,
                                  const StrainSusceptibilities& sus, const CouplingOptions& options = {});

struct CouplingRow {
  Eigen::Vector2d position;
  NVOrientation orientation;
  CouplingSet g;
};

struct CouplingMap {
  std::vector<CouplingRow> rows;            // grid-major, orientation-minor
  std::vector<Eigen::Vector2d> skipped;     // grid points outside the mesh
};

/// Regular grid over [x0, x1] x [y0, y1] with nx * ny points, row-major in Y.
struct Grid {
  double x0, y0, x1, y1;
  int nx, ny;

  void validate() const;
  std::vector<Eigen::Vector2d> points() const;
};
Grid parse_grid(const std::string& text);  // "x0,y0,x1,y1,nx,ny"

CouplingMap coupling_map(const ElasticMode& mode, const std::vector<Eigen::Vector2d>& grid,
                         const std::vector<NVOrientation>& orientations, const StrainSusceptibilities& sus,
                         const CouplingOptions& options = {}, int threads = 1);

/// `X,Y,orientation,g_A_hz,g_E1_hz,g_E2_hz`; g_A is empty when absent.
void write_coupling_csv(std::ostream& out, const CouplingMap& map);

/// sqrt(g_E1^2 + g_E2^2).
double invariant_coupling_norm(const CouplingSet& g);

struct StaticSplitting {
  std::array<double, 2> eigenvalues;  // g_A - g_E, g_A + g_E
  double mixing_angle;                // atan2(g_E2, g_E1) / 2
  bool degenerate;                    // g_E == 0; the angle is then reported as 0
};
/// Diagonalizes [[g_A + g_E1, g_E2], [g_E2, g_A - g_E1]]; a missing g_A counts as 0.
StaticSplitting static_diagonalize(const CouplingSet& g);

// ---------------------------------------------------------------------------
// Thermal bath, cooperativities and cooling

enum class GammaConvention { half, full };  // n_th f / 2Q or n_th f / Q
std::string to_string(GammaConvention c);
GammaConvention gamma_convention_from_string(const std::string& name);

/// Bose occupation 1 / (exp(hbar Omega / k_B T) - 1); 0 at T = 0.
double thermal_occupation(Frequency omega, double temperature);

struct CoolingInputs {
  Frequency omega;                  // mechanical mode
  double q = 1e5;
  double temperature = 4.0;         // K
  double gamma_xy_hz = 15e6;        // orbital dephasing
  std::optional<double> omega_r_hz; // Rabi frequency; defaults to gamma_xy_hz
  GammaConvention convention = GammaConvention::full;

  double rabi_hz() const { return omega_r_hz.value_or(gamma_xy_hz); }
  /// Throws Error listing every invalid field.
  void validate() const;
};

/// Re-thermalization rate [Hz].
double rethermalization_rate(const CoolingInputs& in);

/// 4 g^2 / (gamma Gamma). Throws Error("zero denominator") unless both rates are positive.
double cooperativity(double g_hz, double gamma_hz, double Gamma_hz);

struct OffResonantCooling {
  double rate_hz;  // g^2 Omega_R^2 / (Gamma Omega^2)
  bool efficient;  // rate exceeds the re-thermalization rate
};
OffResonantCooling offresonant_cooling_rate(double g_hz, double omega_r_hz, double gamma_xy_hz, double omega_hz,
                                            double gamma_th_hz);

/// 4 g^2 Omega_R^2 / Gamma^3 [Hz].
double resonant_cooling_rate(double g_hz, double omega_r_hz, double gamma_xy_hz);
/// gamma_th / Gamma_E2.
double final_occupation(double gamma_th_hz, double gamma_e2_hz);

/// N Gamma for N >= 1 emitters.
double collective_rate(double gamma_single_hz, int n);
/// Collective rate with N = density * V and a single-emitter rate scaling as
/// 1/V from a reference (gamma_ref at v_ref); the volume cancels exactly.
double collective_rate_for_volume(double gamma_ref_hz, double v_ref, double density, double v);

/// Figures of merit for a single coupling g used in both protocols.
struct CoolingReport {
  double n_th;
  double gamma_th_hz;
  double c;
  double gamma_e1_hz;
  double gamma_e2_hz;
  double n_fin;
  bool offresonant_efficient;
  GammaConvention convention;
};
CoolingReport cooling_report(const CoolingInputs& in, double g_hz);

/// Coupling and cooling figures of one emitter: E1 figures from g_E1, E2 from g_E2.
struct CouplingReport {
  CouplingSet couplings;
  double n_th;
  double gamma_th_hz;
  double c_e1;
  double c_e2;
  double gamma_e1_hz;
  double gamma_e2_hz;
  double n_fin;
  Eigen::Vector2d position;
  NVOrientation orientation;
};
CouplingReport coupling_report(const CouplingSet& g, const Eigen::Vector2d& position, const NVOrientation& o,
                               const CoolingInputs& in);

}  // namespace qad
