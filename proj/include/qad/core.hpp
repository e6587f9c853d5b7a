// Units, material parameters and bulk-wave quantities shared by every module.
//
// All internal physics is SI with angular frequency. Anything that leaves the
// library (CSV, JSON, CLI) is reported in Hz.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qad {

/// Library-wide error type. The message is a single line suitable for
/// machine parsing by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Overridable hbar. Only the dimensional-scaling tests touch this.
double hbar();
void set_hbar_for_testing(double value);

struct IsotropicMaterial {
  double E = 1050e9;   // Pa
  double nu = 0.2;     // dimensionless
  double rho = 3500.0; // kg / m^3

  static IsotropicMaterial diamond() { return {}; }

  /// Throws Error if E <= 0, rho <= 0 or nu outside (-1, 0.5).
  void validate() const;

  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  double lame_lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
};

/// Non-negative frequency stored as angular frequency [rad/s].
class Frequency {
 public:
  constexpr Frequency() = default;

  static Frequency from_hz(double hz) { return Frequency(constants::two_pi * hz); }
  static Frequency from_angular(double rad_per_s) { return Frequency(rad_per_s); }

  constexpr double angular() const { return omega_; }
  constexpr double hz() const { return omega_ / constants::two_pi; }

  friend constexpr bool operator==(Frequency, Frequency) = default;

 private:
  explicit Frequency(double omega) : omega_(omega) {
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
      throw Error("frequency must be finite and non-negative");
    }
  }
  double omega_ = 0.0;
};

struct WaveSpeeds {
  double longitudinal;  // v_p [m/s]
  double shear;         // v_s [m/s]
};

struct Wavelengths {
  double longitudinal;  // lambda_p [m]
  double shear;         // lambda_s [m]
};

WaveSpeeds wave_speeds(const IsotropicMaterial& mat);

/// lambda = v / f with f in Hz. Throws "degenerate wavelength" for f == 0.
Wavelengths wavelengths(const IsotropicMaterial& mat, Frequency f);

/// Shortest round-trip scientific representation of v.
std::string format_number(double v);

}  // namespace qad
