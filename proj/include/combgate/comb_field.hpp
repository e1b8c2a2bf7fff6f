#pragma once

#include <complex>

#include <Eigen/Dense>

namespace combgate {

/// Two counter-propagating pulse trains along x. Comb 1 travels towards +x and
/// its k-th pulse reaches position x at k*T + t1 + x/c; comb 2 travels towards -x
/// and arrives at k*T + t2 - x/c.
///
/// Field amplitudes are in Rabi units e*a0*E/hbar (rad/s), so that u.d*E with d in
/// e*a0 is directly an angular frequency. A single pulse is
///   E(t) = Eenv(t) exp(-i wc t - i cep) + c.c.,   Eenv(t) = E_peak exp(-t^2/tau^2),
/// with the carrier referenced to the envelope of each pulse.
///
/// Fourier convention used everywhere: F(w) = \int f(t) exp(+i w t) dt.
struct CombConfig {
  double wavelength_m = 1000e-9;
  double tau_s = 20e-15;
  double rep_rate_hz = 100e6;
  double t1_s = 0.0;
  double t2_s = 0.0;
  Eigen::Vector3d polarization = Eigen::Vector3d(0.0, 0.0, 1.0);
  double field_rabi = 4.405e12;  // e*a0*E_peak/hbar, rad/s
  double cep_rad = 0.0;
  int n_pulses = 200;

  double omega_c() const;
  double period() const { return 1.0 / rep_rate_hz; }
  double k_c() const;
  /// Throws ConfigError on |u| != 1, tau >= 1e-3 T, nonpositive scales.
  void validate() const;
  /// Set t1, t2 symmetric about zero so that the pulses overlap at x.
  void aim_at(double x_target_m);
  double overlap_position() const;
};

double envelope(double t, const CombConfig& cfg);
double envelope_fourier(double omega, const CombConfig& cfg);

/// Arrival times of the two pulses of pair k at position x.
double arrival_1(double x, int k, const CombConfig& cfg);
double arrival_2(double x, int k, const CombConfig& cfg);

/// Real field of a single pulse whose envelope peaks at t = arrival.
double single_pulse_field(double t, double arrival, const CombConfig& cfg);

/// Scalar field of pair k at (t, x), along the polarization vector.
double pair_field_scalar(double t, double x, int k, const CombConfig& cfg);
Eigen::Vector3d pair_field_time(double t, double x, int k, const CombConfig& cfg);

/// Fourier image of pair 0 at position x (pair k differs by exp(i w k T)).
std::complex<double> pair_field_fourier(double omega, double x, const CombConfig& cfg);

/// x-derivatives of the pair field, used by the Lamb-Dicke expansion.
double pair_field_scalar_dx(double t, double x, int k, const CombConfig& cfg);
std::complex<double> pair_field_fourier_dx(double omega, double x, const CombConfig& cfg);

/// Fourier image of one pulse centered at t = 0.
std::complex<double> single_pulse_fourier(double omega, const CombConfig& cfg);

}  // namespace combgate
