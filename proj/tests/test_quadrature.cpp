#include <doctest.h>

#include <cmath>
#include <complex>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"
#include "combgate/quadrature.hpp"

using namespace combgate;
using cplx = std::complex<double>;

TEST_CASE("smooth and oscillatory integrals") {
  auto r = integrate([](double x) { return cplx(std::sin(x)); }, {0.0, constants::pi});
  CHECK(r.value.real() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.error <= 1e-9 * r.l1);
  // \int e^{-x^2} cos(50 x) = sqrt(pi) e^{-625} ~ 0: relative to the L1 norm.
  r = integrate([](double x) { return cplx(std::exp(-x * x) * std::cos(50 * x)); }, {-8.0, 8.0});
  CHECK(std::abs(r.value) < 1e-9 * r.l1);
  // \int e^{-x^2 + 3ix} = sqrt(pi) e^{-9/4}.
  r = integrate([](double x) { return std::exp(cplx(-x * x, 3 * x)); }, {-9.0, 0.0, 9.0}, {1e-12});
  CHECK(std::abs(r.value - std::sqrt(constants::pi) * std::exp(-2.25)) < 1e-12);
}

TEST_CASE("breakpoints") {
  const auto p = make_breakpoints(0.0, 1.0, {0.5, -1.0, 2.0, 0.5, 0.25});
  REQUIRE(p.size() == 4);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.25);
  CHECK(p[2] == 0.5);
  CHECK(p[3] == 1.0);
}

TEST_CASE("near-pole integrals in closed form") {
  // g = 1: \int_{-1}^{1} dw / (z - w) = log(z + 1) - log(z - 1).
  for (cplx z : {cplx(0.3, -1e-3), cplx(0.3, -1e-9), cplx(-0.9, 2e-6), cplx(3.0, -0.5)}) {
    const auto r = integrate_pole([](double) { return cplx(1.0); }, z, {-1.0, 1.0});
    const cplx ref = std::log(z + 1.0) - std::log(z - 1.0);
    CHECK(std::abs(r.value - ref) < 1e-10 * std::abs(ref));
  }
  // g(w) = w^2 + 1: exact result via polynomial division.
  const cplx z(0.2, -1e-7);
  const auto r = integrate_pole([](double w) { return cplx(w * w + 1.0); }, z, {-1.0, 1.0});
  // (w^2 + 1)/(z - w) = -(w + z) + (z^2 + 1)/(z - w)
  const cplx ref = -2.0 * z + (z * z + 1.0) * (std::log(z + 1.0) - std::log(z - 1.0));
  CHECK(std::abs(r.value - ref) < 1e-9 * std::abs(ref));
}

TEST_CASE("pole on the axis: sign of the zero imaginary part picks the branch") {
  auto g = [](double) { return cplx(1.0); };
  const auto below = integrate_pole(g, cplx(0.5, -0.0), {0.0, 1.0});
  const auto above = integrate_pole(g, cplx(0.5, 0.0), {0.0, 1.0});
  CHECK(below.value.imag() == doctest::Approx(constants::pi));
  CHECK(above.value.imag() == doctest::Approx(-constants::pi));
  CHECK(below.value.real() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("failure to converge is reported") {
  QuadOptions o;
  o.rel_tol = 1e-14;
  o.max_intervals = 3;
  CHECK_THROWS_AS(integrate([](double x) { return cplx(std::sin(1000 * x) * std::exp(-x)); }, {0.0, 50.0}, o),
                  NumericsError);
}
