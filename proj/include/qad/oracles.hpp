// Closed-form references used to validate the finite-element results: the
// 2D wedge under an axial tip force and the 1D longitudinal transfer matrix
// of a layered rod.

#pragma once

#include <utility>
#include <vector>

#include "qad/core.hpp"

namespace qad {

struct WedgeSpec {
  double force;       // F_r per unit thickness [N/m], negative for compression
  double half_angle;  // theta [rad], in (0, pi/2)
  double E;           // Pa
};

/// Polar strain components; the shear and hoop parts vanish for this solution.
struct PolarStrain {
  double rr;
  double phi_r;
  double phi_phi;
};

/// eps_rr = -(F/E) cos(phi) / (r [theta - sin(2 theta)/2]).
/// Throws Error("singular point") for r <= 0 and Error for |phi| > theta.
PolarStrain wedge_strain(const WedgeSpec& spec, double r, double phi);

/// Same radial law with the denominator theta + sin(2 theta)/2, which makes
/// the radial stress carry the applied force across any arc.
PolarStrain wedge_strain_balanced(const WedgeSpec& spec, double r, double phi);

struct Layer {
  double length;   // m
  double density;  // kg/m^3
  double modulus;  // Pa
};

struct LayerStack {
  std::vector<Layer> layers;

  double period() const;
  /// Throws Error unless there is at least one layer and every parameter is positive.
  void validate() const;
};

/// cos(k a) = trace(T_n ... T_1) / 2 for longitudinal waves at f [Hz].
double layered_dispersion(const LayerStack& stack, Frequency f);

enum class BandEdgeKind { zone_centre, zone_edge };  // cos(ka) = +1 or -1

struct BandEdge {
  double frequency_hz;
  BandEdgeKind kind;
};

/// Frequencies in (0, f_max] where |cos(ka)| = 1, ascending. Scans `samples`
/// points and bisects each bracket. Grazing roots (no gap opens) are located
/// at extrema of the scan, to about 1e-8 relative.
std::vector<BandEdge> band_edges(const LayerStack& stack, double f_max_hz, int samples = 4000);

/// Propagating frequency intervals below f_max.
std::vector<std::pair<double, double>> passbands(const LayerStack& stack, double f_max_hz, int samples = 4000);

}  // namespace qad
