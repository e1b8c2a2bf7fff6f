#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "combgate/constants.hpp"
#include "combgate/magnus.hpp"
#include "combgate/phase_profile.hpp"

using namespace combgate;

namespace {

struct Fixture {
  LevelScheme scheme = load_level_scheme(bundled_scheme_path());
  CombConfig cfg;
  ElectronicModel m = ElectronicModel::from(scheme, cfg.polarization);
  QubitLevels q{scheme.find("S1/2:-1/2"), scheme.find("D5/2:-1/2")};
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("interference doubles the phase at the overlap") {
  const auto& f = fx();
  for (std::size_t a : {f.q.level0, f.q.level1}) {
    const StarkPhase p = stark_phase(f.m, f.cfg, a, 0.0);
    CHECK(p.total() / p.far == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(stark_phase_far(f.m, f.cfg, a) == doctest::Approx(p.far).epsilon(1e-12));
  }
}

TEST_CASE("two routes to the level phase: frequency integral and Magnus diagonal") {
  // The diagonal of the second-order exponent is i times the phase per pair; the
  // two are computed by different integrals.
  const auto& f = fx();
  const Eigen::MatrixXcd Y = magnus_second_order_matrix(f.m, f.cfg, 0.0);
  for (std::size_t a : {f.q.level0, f.q.level1, f.scheme.find("D3/2:1/2")}) {
    const double th = stark_phase(f.m, f.cfg, a, 0.0).total();
    CHECK(Y(a, a).imag() == doctest::Approx(th).epsilon(1e-6));
    CHECK(std::abs(Y(a, a).real()) < 1e-6 * std::abs(th));
  }
  const double x = 0.31e-6;
  const Eigen::MatrixXcd Yx = magnus_second_order_matrix(f.m, f.cfg, x);
  CHECK(Yx(f.q.level1, f.q.level1).imag() == doctest::Approx(stark_phase(f.m, f.cfg, f.q.level1, x).total()).epsilon(1e-6));
}

TEST_CASE("profile shape: symmetric, ripple at lambda/2, decays to the far value") {
  const auto& f = fx();
  const double d0 = differential_phase(f.m, f.cfg, f.q, 0.0);
  const double far = 0.5 * (stark_phase_far(f.m, f.cfg, f.q.level1) - stark_phase_far(f.m, f.cfg, f.q.level0));
  CHECK(d0 > 0.0);
  CHECK(d0 / far == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(differential_phase(f.m, f.cfg, f.q, 0.2e-6) == doctest::Approx(differential_phase(f.m, f.cfg, f.q, -0.2e-6)).epsilon(1e-10));
  // cos(2 k x): minimum a quarter wavelength away.
  CHECK(differential_phase(f.m, f.cfg, f.q, 0.25e-6) < far);
  CHECK(differential_phase(f.m, f.cfg, f.q, 0.5e-6) > far);
  // Overlap falls as exp(-(2x/c)^2 / 2tau^2): still sizeable at 3 um, gone by 20 um
  // and staying gone (the fringes get fast; the quadrature has to keep up).
  CHECK(std::abs(differential_phase(f.m, f.cfg, f.q, 3e-6) - far) > 0.1 * far);
  for (double x : {20e-6, 40e-6, 80e-6})
    CHECK(std::abs(differential_phase(f.m, f.cfg, f.q, x) - far) < 1e-6 * far);
}

TEST_CASE("derivative and envelope") {
  const auto& f = fx();
  const std::size_t a = f.q.level1;
  CHECK(std::abs(stark_phase_derivative(f.m, f.cfg, a, 0.0)) < 1e-9 * f.cfg.k_c() * stark_phase_far(f.m, f.cfg, a));
  const double x = 0.137e-6, h = 1e-11;
  const double fd = (stark_phase(f.m, f.cfg, a, x + h).total() - stark_phase(f.m, f.cfg, a, x - h).total()) / (2 * h);
  CHECK(stark_phase_derivative(f.m, f.cfg, a, x) == doctest::Approx(fd).epsilon(1e-5));
  // The envelope bounds the interference term and decreases with distance.
  double prev = 1e300;
  for (double xx : {0.1e-6, 0.5e-6, 1e-6, 2e-6, 4e-6}) {
    const double env = stark_phase_envelope(f.m, f.cfg, a, xx);
    CHECK(std::abs(stark_phase(f.m, f.cfg, a, xx).interference) <= env * (1 + 1e-9));
    CHECK(env < prev);
    prev = env;
  }
}

TEST_CASE("phase scales as the field squared") {
  const auto& f = fx();
  const StarkPhaseModel base(f.m, f.cfg, f.q);
  CHECK(base.with_field_scale(1.5).differential(0.0) == doctest::Approx(2.25 * base.differential(0.0)).epsilon(1e-10));
  const StarkPhaseModel moved = base.aimed_at(10e-6);
  CHECK(moved.differential(10e-6) == doctest::Approx(base.differential(0.0)).epsilon(1e-9));
}

TEST_CASE("profile table and CSV") {
  const auto& f = fx();
  const auto grid = position_grid(0.0, 1e-6, 11);
  REQUIRE(grid.size() == 11);
  CHECK(grid[5] == 0.0);
  const PhaseProfile p = phase_shift_profile(f.m, f.cfg, f.q, grid, {}, 2);
  CHECK(p.differential(5) == doctest::Approx(differential_phase(f.m, f.cfg, f.q, 0.0)).epsilon(1e-12));
  CHECK(p.differential_at(0.1e-6) == doctest::Approx(0.5 * (p.differential(5) + p.differential(6))));
  CHECK(p.differential_at(5e-6) == p.differential_far());
  std::ostringstream os;
  write_profile_csv(p, os);
  const std::string s = os.str();
  CHECK(s.rfind("x_m,dtheta0_rad,dtheta1_rad,differential_rad\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 12);
  // Deterministic regardless of worker count.
  std::ostringstream os1;
  write_profile_csv(phase_shift_profile(f.m, f.cfg, f.q, grid, {}, 1), os1);
  CHECK(os1.str() == s);
}
