#include "doctest.h"

#include <cmath>

#include "qad/core.hpp"

using namespace qad;

TEST_CASE("diamond wave speeds") {
  const auto v = wave_speeds(IsotropicMaterial::diamond());
  // sqrt(1050e9 * 0.8 / (3500 * 1.2 * 0.6)), sqrt(1050e9 / (2 * 3500 * 1.2))
  CHECK(v.longitudinal == doctest::Approx(18257.418583505536).epsilon(1e-12));
  CHECK(v.shear == doctest::Approx(11180.339887498949).epsilon(1e-12));
}

TEST_CASE("zero Poisson ratio collapses the speeds") {
  IsotropicMaterial m{200e9, 0.0, 8000.0};
  const auto v = wave_speeds(m);
  CHECK(v.longitudinal == doctest::Approx(std::sqrt(m.E / m.rho)));
  CHECK(v.shear == doctest::Approx(std::sqrt(m.E / (2 * m.rho))));
}

TEST_CASE("speed ratio depends only on nu") {
  for (double nu : {-0.9, -0.3, 0.0, 0.1, 0.25, 0.45, 0.499}) {
    for (double E : {1e6, 1050e9}) {
      IsotropicMaterial m{E, nu, 1234.0};
      const auto v = wave_speeds(m);
      CHECK(v.longitudinal / v.shear == doctest::Approx(std::sqrt(2 * (1 - nu) / (1 - 2 * nu))));
      CHECK(v.longitudinal > v.shear);
    }
  }
}

TEST_CASE("wavelengths at the cavity frequency") {
  const auto mat = IsotropicMaterial::diamond();
  const auto l = wavelengths(mat, Frequency::from_hz(2.838e9));
  CHECK(l.longitudinal == doctest::Approx(6.433198937105545e-06).epsilon(1e-12));
  CHECK(l.shear == doctest::Approx(3.93951370243092e-06).epsilon(1e-12));
  CHECK(std::pow(l.longitudinal / l.shear, 3) == doctest::Approx(4.354648431614537));

  const auto l2 = wavelengths(mat, Frequency::from_hz(2 * 2.838e9));
  CHECK(l2.longitudinal == doctest::Approx(l.longitudinal / 2).epsilon(1e-15));
  CHECK(l2.shear == doctest::Approx(l.shear / 2).epsilon(1e-15));
}

TEST_CASE("zero frequency has no wavelength") {
  CHECK_THROWS_WITH_AS(wavelengths(IsotropicMaterial::diamond(), Frequency::from_hz(0.0)), "degenerate wavelength", Error);
}

TEST_CASE("material invariants") {
  CHECK_THROWS_AS((IsotropicMaterial{0.0, 0.2, 3500}.validate()), Error);
  CHECK_THROWS_AS((IsotropicMaterial{1e9, 0.5, 3500}.validate()), Error);
  CHECK_THROWS_AS((IsotropicMaterial{1e9, -1.0, 3500}.validate()), Error);
  CHECK_THROWS_AS((IsotropicMaterial{1e9, 0.2, -1}.validate()), Error);
  CHECK_NOTHROW(IsotropicMaterial::diamond().validate());
}

TEST_CASE("frequency conversion applies 2 pi once") {
  const auto f = Frequency::from_hz(2.838e9);
  CHECK(f.angular() == doctest::Approx(2 * M_PI * 2.838e9));
  CHECK(f.hz() == doctest::Approx(2.838e9).epsilon(1e-15));
  CHECK(Frequency::from_angular(f.angular()).hz() == doctest::Approx(2.838e9).epsilon(1e-15));
  CHECK_THROWS_AS(Frequency::from_hz(-1.0), Error);
  CHECK_THROWS_AS(Frequency::from_hz(NAN), Error);
}
