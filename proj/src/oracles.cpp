#include "qad/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

namespace qad {

namespace {

void check_wedge(const WedgeSpec& s, double r, double phi) {
  if (!(s.half_angle > 0.0 && s.half_angle < std::numbers::pi / 2)) throw Error("wedge half-angle outside (0, pi/2)");
  if (!(s.E > 0.0)) throw Error("Young's modulus must be positive");
  if (!(r > 0.0)) throw Error("singular point");
  if (std::abs(phi) > s.half_angle) throw Error("phi outside the wedge");
}

}  // namespace

PolarStrain wedge_strain(const WedgeSpec& s, double r, double phi) {
  check_wedge(s, r, phi);
  const double t = s.half_angle;
  return {-(s.force / s.E) * std::cos(phi) / (r * (t - 0.5 * std::sin(2 * t))), 0.0, 0.0};
}

PolarStrain wedge_strain_balanced(const WedgeSpec& s, double r, double phi) {
  check_wedge(s, r, phi);
  const double t = s.half_angle;
  return {-(s.force / s.E) * std::cos(phi) / (r * (t + 0.5 * std::sin(2 * t))), 0.0, 0.0};
}

double LayerStack::period() const {
  double a = 0.0;
  for (const auto& l : layers) a += l.length;
  return a;
}

void LayerStack::validate() const {
  if (layers.empty()) throw Error("layer stack is empty");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (!(l.length > 0.0 && l.density > 0.0 && l.modulus > 0.0))
      throw Error("layer " + std::to_string(i) + " needs positive length, density and modulus");
  }
}

double layered_dispersion(const LayerStack& stack, Frequency f) {
  stack.validate();
  const double w = f.angular();
  Eigen::Matrix2d T = Eigen::Matrix2d::Identity();
  // state (u, C du/dx); a layer of length d, wavenumber q = w / v:
  // [[cos qd, sin qd / (qC)], [-qC sin qd, cos qd]]
  for (const auto& l : stack.layers) {
    const double q = w * std::sqrt(l.density / l.modulus);
    const double qd = q * l.length;
    Eigen::Matrix2d t;
    if (q == 0.0) {
      t << 1.0, l.length / l.modulus, 0.0, 1.0;
    } else {
      const double z = q * l.modulus;
      t << std::cos(qd), std::sin(qd) / z, -z * std::sin(qd), std::cos(qd);
    }
    T = t * T;
  }
  return 0.5 * T.trace();
}

std::vector<BandEdge> band_edges(const LayerStack& stack, double f_max_hz, int samples) {
  stack.validate();
  if (!(f_max_hz > 0.0)) throw Error("f_max must be positive");
  if (samples < 16) throw Error("band edge scan needs at least 16 samples");
  auto D = [&](double f) { return layered_dispersion(stack, Frequency::from_hz(f)); };
  auto bisect = [&](double a, double b, double target) {
    double ga = D(a) - target;
    for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = D(m) - target;
      if ((gm > 0) == (ga > 0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };
  // golden-section refinement of an extremum of D near +-1
  auto extremum = [&](double a, double b, double sign) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
      if (sign * D(c) > sign * D(d)) {
        b = d;
      } else {
        a = c;
      }
      c = b - g * (b - a);
      d = a + g * (b - a);
    }
    return 0.5 * (a + b);
  };

  std::vector<BandEdge> edges;
  const double df = f_max_hz / samples;
  std::vector<double> f(static_cast<std::size_t>(samples) + 1), v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = i == 0 ? 1e-9 * df : df * static_cast<double>(i);
    v[i] = D(f[i]);
  }
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    for (double target : {1.0, -1.0}) {
      if ((v[i] - target) * (v[i + 1] - target) < 0.0) {
        edges.push_back({bisect(f[i], f[i + 1], target), target > 0 ? BandEdgeKind::zone_centre : BandEdgeKind::zone_edge});
      }
    }
    // a band edge where D only touches +-1 (no gap opens)
    if (i > 0) {
      for (double sign : {1.0, -1.0}) {
        if (sign * v[i] >= sign * v[i - 1] && sign * v[i] >= sign * v[i + 1] && std::abs(v[i] - sign) < 1e-3) {
          const double x = extremum(f[i - 1], f[i + 1], sign);
          if (std::abs(D(x) - sign) < 1e-9) edges.push_back({x, sign > 0 ? BandEdgeKind::zone_centre : BandEdgeKind::zone_edge});
        }
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const BandEdge& a, const BandEdge& b) { return a.frequency_hz < b.frequency_hz; });
  std::vector<BandEdge> unique;
  for (const auto& e : edges)
    if (unique.empty() || e.frequency_hz - unique.back().frequency_hz > 1e-9 * e.frequency_hz) unique.push_back(e);
  return unique;
}

std::vector<std::pair<double, double>> passbands(const LayerStack& stack, double f_max_hz, int samples) {
  const auto edges = band_edges(stack, f_max_hz, samples);
  std::vector<std::pair<double, double>> out;
  double start = 0.0;
  bool open = true;  // the acoustic band starts at f = 0
  for (const auto& e : edges) {
    const double mid_after = e.frequency_hz * (1.0 + 1e-7);
    const bool propagating = std::abs(layered_dispersion(stack, Frequency::from_hz(mid_after))) <= 1.0;
    if (open && !propagating) {
      out.emplace_back(start, e.frequency_hz);
      open = false;
    } else if (!open && propagating) {
      start = e.frequency_hz;
      open = true;
    }
  }
  if (open) out.emplace_back(start, f_max_hz);
  return out;
}

}  // namespace qad
