#include <ostream>

#include "qad/fem.hpp"

namespace qad {

void write_field_csv(std::ostream& out, const Discretization& disc, const Field<double>& u, double omega) {
  const bool in_plane = disc.model() == Model::in_plane;
  out << (in_plane ? "X,Y,uX,uY,eXX,eYY,eXY,h\n" : "X,Y,uZ,eXZ,eYZ,h\n");
  for (int e = 0; e < disc.num_elements(); ++e) {
    const MeshPoint q{e, Eigen::Vector3d::Constant(1.0 / 3.0)};
    const Eigen::Vector2d p = disc.position(q);
    const Eigen::Vector3d d = displacement_at(disc, u, q);
    const Eigen::Matrix3d s = strain_at(disc, u, q);
    const double h = energy_density_at(disc, u, omega, q);
    out << format_number(p.x()) << ',' << format_number(p.y()) << ',';
    if (in_plane) {
      out << format_number(d.x()) << ',' << format_number(d.y()) << ',' << format_number(s(0, 0)) << ','
          << format_number(s(1, 1)) << ',' << format_number(s(0, 1));
    } else {
      out << format_number(d.z()) << ',' << format_number(s(0, 2)) << ',' << format_number(s(1, 2));
    }
    out << ',' << format_number(h) << '\n';
  }
}

void write_bands_csv(std::ostream& out, const BandStructure& bands) {
  out << "k,band_index,family,frequency_hz\n";
  for (std::size_t ik = 0; ik < bands.k.size(); ++ik) {
    for (Model model : {Model::in_plane, Model::out_of_plane}) {
      const auto f = bands.family_bands(ik, model);
      for (std::size_t j = 0; j < f.size(); ++j)
        out << format_number(bands.k[ik]) << ',' << j << ',' << to_string(model) << ',' << format_number(f[j]) << '\n';
    }
  }
}

}  // namespace qad
