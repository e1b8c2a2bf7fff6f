#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "combgate/gate_compiler.hpp"
#include "combgate/level_scheme.hpp"
#include "combgate/magnus.hpp"
#include "combgate/phase_profile.hpp"

namespace combgate {

// --- photon scattering -------------------------------------------------------

/// Total (elastic + Raman) Kramers-Heisenberg cross section in m^2 for a photon of
/// angular frequency omega and polarization u incident on sublevel `initial`,
/// integrated over scattered directions and polarizations and summed over every
/// final sublevel with a positive scattered frequency. Intermediate levels carry
/// complex energies e_g - i G_g/2.
double scattering_cross_section(double omega, const LevelScheme& scheme, std::size_t initial,
                                const Eigen::Vector3d& u);

struct ScatteringResult {
  double per_pulse = 0.0;  // one pulse of one comb
  double per_train = 0.0;  // per ion: 2 N_pulses * per_pulse
  double chain = 0.0;      // per_train times number of ions
  double quad_error = 0.0;
};

/// Photons scattered by one pulse,
///   N = (eps0 c / hbar) \int_0^inf dw/pi sigma(w)/w |E(w)|^2,
/// with E(w) the single-pulse spectrum in V s/m. Worst case over the given levels.
ScatteringResult scattering_probability(const LevelScheme& scheme, const CombConfig& cfg,
                                        const std::vector<std::size_t>& levels,
                                        std::size_t n_ions = 1, const QuadOptions& opt = {});

// --- coherent leakage to other sublevels ------------------------------------

struct LeakageChannel {
  std::size_t from = 0;
  std::size_t to = 0;
  std::complex<double> a0;  // amplitude per pulse pair
  double delta_omega = 0.0; // e_to - e_from, rad/s
  long k = 0;               // integer part of delta_omega T / 2pi
  double dk = 0.0;          // fractional part
  double period = 0.0;
};

LeakageChannel make_leakage_channel(std::size_t from, std::size_t to, std::complex<double> a0,
                                    double delta_omega, double period);

struct LeakageResult {
  double exact = 0.0;  // |a0 sum_k exp(i de k T)|^2
  double bound = 0.0;  // |a0|^2 / sin^2(de T / 2)
  bool resonant = false;
};

/// Geometric sum of N equal per-pair amplitudes with the free phase between pairs.
/// A channel with de T = 0 mod 2pi is flagged resonant: the bound is infinite and the
/// exact value grows as N^2.
LeakageResult leakage_probability(const LeakageChannel& ch, int n_pulses);

/// (nu_rep / (2 pi N nu_z))^2.
double zeeman_leakage_estimate(double rep_rate_hz, int n_pulses, double zeeman_hz);

// --- motional excitation -----------------------------------------------------

struct PhononResult {
  double exact = 0.0;
  double bound = 0.0;
};

/// First-order excitation of the modes by the position-dependent phase,
///   P = (1/k_c^2) (d dtheta/dx)^2 sum_s |eta_s|^2 |exp(i w_s t_g) - 1|^2 / (w_s T)^2,
/// bound with |...|^2 -> 4.
PhononResult phonon_excitation_probability(double dphase_dx, const ChainGeometry& geometry,
                                           std::size_t ion, double t_gate, double period,
                                           double k_c);

/// Diagonal-in-qubit Hamiltonian linear in the mode quadratures,
///   H = sum_a |a><a| [ rate_a + sum_s coupling_as (a_s + a_s^dagger) ],
/// rate_a = dtheta_a(x0)/T and coupling_as = eta_s dtheta_a'(x0)/(k_c T).
struct EffectiveHamiltonian {
  std::array<double, 2> rate{};
  std::array<std::vector<double>, 2> coupling;
  std::vector<double> mode_omega;
};

EffectiveHamiltonian effective_qubit_phonon_hamiltonian(const StarkPhaseModel& phases,
                                                        const ChainGeometry& geometry,
                                                        std::size_t ion, double x_eval);

/// Excitation probability of mode s from the linear coupling g over t_g, to first
/// order: |g (exp(i w t_g) - 1)/w|^2.
double first_order_excitation(double coupling, double omega, double t_gate);

// --- assembly ----------------------------------------------------------------

struct ErrorBudget {
  double crosstalk = 0.0;
  double photon_scattering = 0.0;
  double zeeman_leakage = 0.0;
  double fine_structure_leakage = 0.0;
  double phonon_excitation = 0.0;
  double total = 0.0;

  // Context kept next to the numbers.
  double zeeman_from_y = 0.0;      // Raman amplitude route; 0 for pure pi light
  double phonon_exact = 0.0;       // exact expression at the gate time
  double fine_structure_exact = 0.0;
  long fine_structure_k = 0;
  double fine_structure_dk = 0.0;
  double scattering_per_pulse = 0.0;
  std::vector<std::string> notes;
};

/// Pure reduction: total = sum of the entries. Negative entries are rejected.
ErrorBudget assemble_budget(double crosstalk, double photon_scattering, double zeeman_leakage,
                            double fine_structure_leakage, double phonon_excitation);

struct BudgetOptions {
  double pointing_offset = 30e-9;  // target ion offset from the pulse overlap, m
  unsigned workers = 0;
};

/// Evaluates every channel for a compiled plan; channels run concurrently.
ErrorBudget compute_budget(const LevelScheme& scheme, const StarkPhaseModel& phases,
                           const GatePlan& plan, const ChainGeometry& geometry,
                           const BudgetOptions& opt = {});

void write_budget_table(const ErrorBudget& b, std::ostream& out);
void write_budget_csv(const ErrorBudget& b, std::ostream& out);

}  // namespace combgate
