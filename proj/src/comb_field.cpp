#include "combgate/comb_field.hpp"

#include <cmath>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"

namespace combgate {

using constants::c;

double CombConfig::omega_c() const { return constants::two_pi * c / wavelength_m; }
double CombConfig::k_c() const { return constants::two_pi / wavelength_m; }

void CombConfig::validate() const {
  if (!(wavelength_m > 0.0)) throw ConfigError("comb: carrier wavelength must be positive");
  if (!(tau_s > 0.0)) throw ConfigError("comb: pulse duration must be positive");
  if (!(rep_rate_hz > 0.0)) throw ConfigError("comb: repetition rate must be positive");
  if (!(field_rabi >= 0.0)) throw ConfigError("comb: peak field must be nonnegative");
  if (n_pulses < 0) throw ConfigError("comb: pulse count must be nonnegative");
  if (std::abs(polarization.norm() - 1.0) > 1e-12)
    throw ConfigError("comb: polarization vector must have unit norm");
  if (!(tau_s < 1e-3 * period()))
    throw ConfigError("comb: pulse duration must be below 1e-3 of the repetition period");
}

void CombConfig::aim_at(double x_target_m) {
  t1_s = -x_target_m / c;
  t2_s = x_target_m / c;
}

double CombConfig::overlap_position() const { return 0.5 * c * (t2_s - t1_s); }

double envelope(double t, const CombConfig& cfg) {
  const double s = t / cfg.tau_s;
  return cfg.field_rabi * std::exp(-s * s);
}

double envelope_fourier(double omega, const CombConfig& cfg) {
  const double s = omega * cfg.tau_s;
  return cfg.field_rabi * cfg.tau_s * std::sqrt(constants::pi) * std::exp(-0.25 * s * s);
}

double arrival_1(double x, int k, const CombConfig& cfg) {
  return k * cfg.period() + cfg.t1_s + x / c;
}

double arrival_2(double x, int k, const CombConfig& cfg) {
  return k * cfg.period() + cfg.t2_s - x / c;
}

double single_pulse_field(double t, double arrival, const CombConfig& cfg) {
  const double s = t - arrival;
  return 2.0 * envelope(s, cfg) * std::cos(cfg.omega_c() * s + cfg.cep_rad);
}

double pair_field_scalar(double t, double x, int k, const CombConfig& cfg) {
  return single_pulse_field(t, arrival_1(x, k, cfg), cfg) +
         single_pulse_field(t, arrival_2(x, k, cfg), cfg);
}

Eigen::Vector3d pair_field_time(double t, double x, int k, const CombConfig& cfg) {
  return pair_field_scalar(t, x, k, cfg) * cfg.polarization;
}

namespace {

double single_pulse_rate(double t, double arrival, const CombConfig& cfg) {
  const double s = t - arrival;
  const double env = envelope(s, cfg);
  const double ph = cfg.omega_c() * s + cfg.cep_rad;
  return 2.0 * (-2.0 * s / (cfg.tau_s * cfg.tau_s) * env * std::cos(ph) -
                cfg.omega_c() * env * std::sin(ph));
}

}  // namespace

double pair_field_scalar_dx(double t, double x, int k, const CombConfig& cfg) {
  // d/dx f(t - a1(x)) = -f'/c, d/dx f(t - a2(x)) = +f'/c.
  return (single_pulse_rate(t, arrival_2(x, k, cfg), cfg) -
          single_pulse_rate(t, arrival_1(x, k, cfg), cfg)) /
         c;
}

std::complex<double> pair_field_fourier_dx(double omega, double x, const CombConfig& cfg) {
  const double a1 = arrival_1(x, 0, cfg);
  const double a2 = arrival_2(x, 0, cfg);
  const std::complex<double> I(0.0, 1.0);
  return single_pulse_fourier(omega, cfg) * (I * omega / c) *
         (std::polar(1.0, omega * a1) - std::polar(1.0, omega * a2));
}

std::complex<double> single_pulse_fourier(double omega, const CombConfig& cfg) {
  const double wc = cfg.omega_c();
  const std::complex<double> ph = std::polar(1.0, cfg.cep_rad);
  return envelope_fourier(omega - wc, cfg) * std::conj(ph) + envelope_fourier(omega + wc, cfg) * ph;
}

std::complex<double> pair_field_fourier(double omega, double x, const CombConfig& cfg) {
  const double a1 = arrival_1(x, 0, cfg);
  const double a2 = arrival_2(x, 0, cfg);
  return single_pulse_fourier(omega, cfg) *
         (std::polar(1.0, omega * a1) + std::polar(1.0, omega * a2));
}

}  // namespace combgate
