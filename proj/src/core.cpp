#include "qad/core.hpp"

#include <atomic>
#include <charconv>
#include <sstream>

namespace qad {

namespace {
std::atomic<double> g_hbar{constants::hbar};
}

double hbar() { return g_hbar.load(std::memory_order_relaxed); }
void set_hbar_for_testing(double value) { g_hbar.store(value, std::memory_order_relaxed); }

void IsotropicMaterial::validate() const {
  std::ostringstream bad;
  if (!(E > 0.0)) bad << " E=" << E;
  if (!(rho > 0.0)) bad << " rho=" << rho;
  if (!(nu > -1.0 && nu < 0.5)) bad << " nu=" << nu;
  if (!bad.str().empty()) throw Error("invalid material:" + bad.str());
}

WaveSpeeds wave_speeds(const IsotropicMaterial& mat) {
  mat.validate();
  const double nu = mat.nu;
  const double vp = std::sqrt(mat.E * (1.0 - nu) / (mat.rho * (1.0 + nu) * (1.0 - 2.0 * nu)));
  const double vs = std::sqrt(mat.E / (2.0 * mat.rho * (1.0 + nu)));
  return {vp, vs};
}

Wavelengths wavelengths(const IsotropicMaterial& mat, Frequency f) {
  if (f.hz() == 0.0) throw Error("degenerate wavelength");
  const auto v = wave_speeds(mat);
  return {v.longitudinal / f.hz(), v.shear / f.hz()};
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

}  // namespace qad
