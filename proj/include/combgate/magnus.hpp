#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "combgate/comb_field.hpp"
#include "combgate/level_scheme.hpp"
#include "combgate/quadrature.hpp"

namespace combgate {

/// The pieces of H = H0 - E(t) u.d that the propagators need. Any level structure
/// can be described this way; LevelScheme is the usual source.
struct ElectronicModel {
  Eigen::VectorXd energies;    // rad/s
  Eigen::VectorXd linewidths;  // rad/s
  Eigen::MatrixXcd ud;         // u.d, e*a0, Hermitian

  static ElectronicModel from(const LevelScheme& scheme, const Eigen::Vector3d& u);
  Eigen::Index size() const { return energies.size(); }
};

/// Fourier image E(w) of the field seen during one pulse pair.
using Spectrum = std::function<std::complex<double>(double)>;

/// Pair spectrum at position x.
Spectrum pair_spectrum(const CombConfig& cfg, double x);

struct MagnusOptions {
  QuadOptions quad{};
  /// Half-width of each spectral lobe kept, in units of 1/tau.
  double band = 12.0;
};

/// First order: X_ab = i (u.d)_ab E_k(e_a - e_b), with E_k the pair spectrum at x.
Eigen::MatrixXcd magnus_first_order(const ElectronicModel& m, const CombConfig& cfg, double x);

/// Second order entry
///   Y_ab = i \int dw/2pi E(D/2 - w) E(D/2 + w) sum_g d_ag d_gb / (e_g - iG_g/2 - ebar - w)
///          - (X^2)_ab / 2
/// with D = e_a - e_b and ebar = (e_a + e_b)/2. A real pole takes the causal branch;
/// the X^2 term then leaves its principal value, as the Magnus kernel requires.
std::complex<double> magnus_second_order(const ElectronicModel& m, const CombConfig& cfg, double x,
                                         std::size_t alpha, std::size_t beta,
                                         const MagnusOptions& opt = {});

/// All nonzero entries of Y, sharing frequency integrals between entries.
Eigen::MatrixXcd magnus_second_order_matrix(const ElectronicModel& m, const CombConfig& cfg,
                                            double x, const MagnusOptions& opt = {});

/// Same for an arbitrary spectrum; cfg only sets the carrier and the band.
Eigen::MatrixXcd magnus_first_order(const ElectronicModel& m, const Spectrum& E);
Eigen::MatrixXcd magnus_second_order_matrix(const ElectronicModel& m, const Spectrum& E,
                                            const CombConfig& cfg, const MagnusOptions& opt = {});

struct PulsePairOperator {
  Eigen::MatrixXcd X;
  Eigen::MatrixXcd Y;
  Eigen::MatrixXcd U_raw;  // exp(X + Y), contracting when linewidths are nonzero
  Eigen::MatrixXcd U;      // unitary polar factor of U_raw
  Eigen::VectorXd loss;    // 1 - |U_raw e_a|^2 per level: absorption per pair
};

PulsePairOperator pulse_pair_operator(const ElectronicModel& m, const CombConfig& cfg, double x,
                                      const MagnusOptions& opt = {});
PulsePairOperator pulse_pair_operator(const ElectronicModel& m, const Spectrum& E,
                                      const CombConfig& cfg, const MagnusOptions& opt = {});

/// Unitary polar factor W of A = W P.
Eigen::MatrixXcd unitary_polar_factor(const Eigen::MatrixXcd& A);

/// diag(exp(i e_a t)) with the phase reduced in extended precision; t = k T.
Eigen::VectorXcd free_phases(const Eigen::VectorXd& energies, double period, long k);

/// U_{N-1} ... U_0 with U_k = D_k U D_k^dagger, D_k = free_phases(kT): pair k
/// arrives at t = kT + t1,2 and the product is in the interaction picture.
Eigen::MatrixXcd train_propagator(const Eigen::MatrixXcd& U_pair, const Eigen::VectorXd& energies,
                                  double period, int n_pulses);

Eigen::MatrixXcd train_propagator(const ElectronicModel& m, const CombConfig& cfg, double x,
                                  const MagnusOptions& opt = {});

}  // namespace combgate
