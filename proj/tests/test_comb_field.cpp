#include <doctest.h>

#include <cmath>
#include <complex>

#include "combgate/comb_field.hpp"
#include "combgate/constants.hpp"
#include "combgate/errors.hpp"

using namespace combgate;
using cplx = std::complex<double>;

namespace {

// Direct Fourier sum on a uniform grid; the trapezoid rule is spectrally accurate
// for these Gaussian-windowed integrands.
template <class F>
cplx fourier_sum(F f, double omega, double t0, double t1, int n) {
  const double h = (t1 - t0) / n;
  cplx s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * f(t) * std::polar(1.0, omega * t);
  }
  return s * h;
}

}  // namespace

TEST_CASE("defaults and derived quantities") {
  const CombConfig cfg;
  CHECK(cfg.omega_c() == doctest::Approx(1.8836515673e15).epsilon(1e-9));
  CHECK(cfg.period() == 1e-8);
  CHECK(cfg.k_c() == doctest::Approx(6.283185307e6));
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("validation") {
  CombConfig c;
  c.polarization = Eigen::Vector3d(1, 1, 0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = CombConfig{};
  c.tau_s = 1e-10;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = CombConfig{};
  c.rep_rate_hz = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("envelope Fourier transform against a direct sum") {
  const CombConfig cfg;
  auto f = [&](double t) { return cplx(envelope(t, cfg)); };
  const double peak = envelope_fourier(0.0, cfg);
  for (double wt : {0.0, 0.3, 1.0, 2.5, 4.0}) {
    const double w = wt / cfg.tau_s;
    const cplx ref = fourier_sum(f, w, -12 * cfg.tau_s, 12 * cfg.tau_s, 4000);
    CHECK(std::abs(ref - envelope_fourier(w, cfg)) < 1e-8 * peak);
  }
}

TEST_CASE("single pulse spectrum against a direct sum, with carrier envelope phase") {
  CombConfig cfg;
  cfg.cep_rad = 0.7;
  auto f = [&](double t) { return cplx(single_pulse_field(t, 0.0, cfg)); };
  const double peak = envelope_fourier(0.0, cfg);
  for (double dw : {-2.0, 0.0, 0.5, 3.0}) {
    for (double sgn : {1.0, -1.0}) {
      const double w = sgn * cfg.omega_c() + dw / cfg.tau_s;
      const cplx ref = fourier_sum(f, w, -12 * cfg.tau_s, 12 * cfg.tau_s, 60000);
      CHECK(std::abs(ref - single_pulse_fourier(w, cfg)) < 1e-8 * peak);
    }
  }
}

TEST_CASE("Parseval: time and frequency energies agree") {
  const CombConfig cfg;
  const double tau = cfg.tau_s;
  double et = 0.0, ew = 0.0;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double t = -10 * tau + 20 * tau * i / n;
    et += std::pow(single_pulse_field(t, 0.0, cfg), 2) * (20 * tau / n) * ((i == 0 || i == n) ? 0.5 : 1.0);
  }
  // |F|^2 is concentrated at +-wc; integrate both lobes.
  for (double sgn : {1.0, -1.0})
    for (int i = 0; i <= n; ++i) {
      const double w = sgn * cfg.omega_c() + (-12.0 + 24.0 * i / n) / tau;
      ew += std::norm(single_pulse_fourier(w, cfg)) * (24.0 / tau / n) * ((i == 0 || i == n) ? 0.5 : 1.0);
    }
  CHECK(ew / constants::two_pi == doctest::Approx(et).epsilon(1e-9));
}

TEST_CASE("arrival times and aiming") {
  CombConfig cfg;
  cfg.aim_at(15e-6);
  CHECK(cfg.overlap_position() == doctest::Approx(15e-6));
  CHECK(arrival_1(15e-6, 3, cfg) == doctest::Approx(arrival_2(15e-6, 3, cfg)).epsilon(1e-15));
  CHECK(arrival_1(0.0, 2, cfg) - arrival_1(0.0, 0, cfg) == doctest::Approx(2 * cfg.period()));
  // Away from the overlap the pulses separate by 2 dx / c.
  const double dx = 1e-6;
  CHECK(arrival_2(15e-6 + dx, 0, cfg) - arrival_1(15e-6 + dx, 0, cfg) == doctest::Approx(-2 * dx / constants::c));
}

TEST_CASE("pair field spectrum matches the time-domain pair") {
  CombConfig cfg;
  cfg.aim_at(0.2e-6);
  const double x = 0.2e-6 + 0.7e-6;
  auto f = [&](double t) { return cplx(pair_field_scalar(t, x, 0, cfg)); };
  const double a = std::min(arrival_1(x, 0, cfg), arrival_2(x, 0, cfg)) - 12 * cfg.tau_s;
  const double b = std::max(arrival_1(x, 0, cfg), arrival_2(x, 0, cfg)) + 12 * cfg.tau_s;
  const double peak = envelope_fourier(0.0, cfg);
  for (double dw : {-1.0, 0.0, 1.3}) {
    const double w = cfg.omega_c() + dw / cfg.tau_s;
    const cplx ref = fourier_sum(f, w, a, b, 200000);
    CHECK(std::abs(ref - pair_field_fourier(w, x, cfg)) < 1e-7 * peak);
  }
  // The polarization vector carries the scalar.
  const Eigen::Vector3d v = pair_field_time(1e-15, x, 0, cfg);
  CHECK(v.z() == doctest::Approx(pair_field_scalar(1e-15, x, 0, cfg)));
  CHECK(v.x() == 0.0);
}

TEST_CASE("position derivatives against finite differences") {
  CombConfig cfg;
  const double x = 37e-9, h = 1e-12;
  for (double t : {-30e-15, -3e-15, 0.0, 11e-15, 25e-15}) {
    const double fd = (pair_field_scalar(t, x + h, 0, cfg) - pair_field_scalar(t, x - h, 0, cfg)) / (2 * h);
    CHECK(pair_field_scalar_dx(t, x, 0, cfg) == doctest::Approx(fd).epsilon(1e-5).scale(cfg.field_rabi * cfg.omega_c() / constants::c * 1e-3));
  }
  for (double dw : {-1.0, 0.0, 2.0}) {
    const double w = cfg.omega_c() + dw / cfg.tau_s;
    const cplx fd = (pair_field_fourier(w, x + h, cfg) - pair_field_fourier(w, x - h, cfg)) / (2 * h);
    CHECK(std::abs(pair_field_fourier_dx(w, x, cfg) - fd) < 1e-6 * std::abs(envelope_fourier(0, cfg)) * cfg.k_c());
  }
}
