// Modal post-processing: energy density, effective mode volume, kinetic
// normalization and single-phonon (zero-point) strain.
//
// The energy density is the period-averaged sum of strain and kinetic parts,
// evaluated at the six quadrature points of every element.

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qad/core.hpp"
#include "qad/fem.hpp"

namespace qad {

struct EnergyDensity {
  std::vector<std::array<double, 6>> values;  // [element][quadrature point], J/m^3
  double strain_energy = 0.0;                 // integral of the strain part [J]
  double kinetic_energy = 0.0;                // integral of the kinetic part [J]
  double max = 0.0;                           // largest quadrature-point value
  MeshPoint argmax{0, Eigen::Vector3d::Constant(1.0 / 3.0)};
  Eigen::Vector2d argmax_position = Eigen::Vector2d::Zero();
  /// Set when the strain and kinetic integrals disagree by more than 1e-6,
  /// i.e. the material is not the one the mode was solved with.
  bool material_mismatch = false;

  double total() const { return strain_energy + kinetic_energy; }
};

EnergyDensity energy_density(const ElasticMode& mode);
EnergyDensity energy_density(const ElasticMode& mode, const MaterialMap& materials);

struct ModeVolume {
  double veff;            // m^3
  double area;            // veff / thickness [m^2]
  double over_lambda_p3;  // wavelengths of the material at the density maximum; nan at Omega = 0
  double over_lambda_s3;
};

/// V = integral(h) / max(h). Throws Error("null mode") for a zero field.
ModeVolume effective_volume(const ElasticMode& mode);
ModeVolume effective_volume(const ElasticMode& mode, const MaterialMap& materials);

/// integral(rho |u|^2) and (1/Omega^2) integral(eps:c:eps); both 1 for a normalized eigenmode.
struct NormalizationIntegrals {
  double kinetic;
  double strain;
};
NormalizationIntegrals normalization_integrals(const ElasticMode& mode);

/// Kinetic over strain energy.
double equipartition_ratio(const ElasticMode& mode);

/// Rescales u and strain so that integral(rho |u|^2) dV = 1. Throws Error("null mode").
ElasticMode normalize(const ElasticMode& mode);

/// sqrt(hbar / 2 Omega) eps(position), lab frame, dimensionless.
/// Requires a kinetic_unit mode; throws Error for positions outside the mesh.
Eigen::Matrix3d zero_point_strain(const ElasticMode& mode, const Eigen::Vector2d& position);

/// Fractions of the total energy in the bands edges[i] <= |X| < edges[i+1].
std::vector<double> energy_profile(const ElasticMode& mode, const std::vector<double>& edges);

/// Energy bookkeeping of a cavity mode: the defect region |X| < junction and
/// the crystal cells outward from it.
struct CavityLocalization {
  double defect_fraction;
  std::vector<double> cell_fractions;  // cell 1 is adjacent to the defect
  /// Smallest log10(cell k / cell k+1) over neighbouring cells; nan with fewer than two cells.
  double min_decades_per_cell;
  /// Frobenius norm of the zero-point strain at the waist centre (0, 0).
  double waist_strain;
};
/// Requires a kinetic_unit mode of the given cavity geometry.
CavityLocalization cavity_localization(const ElasticMode& mode, const CavityGeometry& geometry);

/// The cavity mode among `modes` (normalized): frequency inside [lo, hi] Hz,
/// at least half the energy in the defect, and the largest waist strain.
/// nullopt when no mode qualifies.
std::optional<std::size_t> select_cavity_mode(const std::vector<ElasticMode>& modes, const CavityGeometry& geometry,
                                              double lo_hz, double hi_hz);

struct ModeReport {
  double frequency_hz;
  double veff_m3;
  double veff_over_lambda_p3;
  double veff_over_lambda_s3;
  double equipartition_ratio;
  double max_h_j_per_m3;
  bool degenerate;
  bool material_mismatch;
};
ModeReport mode_report(const ElasticMode& mode);

// ---------------------------------------------------------------------------
// Mode files: self-contained text holding the mesh, model, material and the
// nodal displacement vector. `#` lines are comments.

void save_mode(const ElasticMode& mode, const std::filesystem::path& path, const std::string& header_comment = {});
ElasticMode load_mode(const std::filesystem::path& path);

}  // namespace qad
