#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "combgate/comb_field.hpp"
#include "combgate/gate_compiler.hpp"
#include "combgate/level_scheme.hpp"
#include "combgate/phase_profile.hpp"

namespace combgate {

/// How the ion position operator enters the field.
enum class MotionCoupling {
  /// E(t, x0) + dE/dx(t, x0) * dx_hat: first order in the Lamb-Dicke parameters.
  LambDicke,
  /// E(t, x0 + dx_hat) with the truncated position operator.
  Exact,
};

struct SimOptions {
  int fock_cutoff = 5;  // n_max per mode
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  MotionCoupling coupling = MotionCoupling::LambDicke;
  double window_half_span_tau = 8.0;
  double max_state_bytes = 1.0e9;
  double fock_leak_limit = 1e-6;
  int checkpoint_every = 50;  // invariant checks, in windows; 0 disables
  bool decay = true;          // false drops every decay channel
};

/// Density matrix on electronic (x) Fock, electronic index major:
/// row = alpha * P + p, with p the mixed-radix Fock index (mode 0 most significant).
struct SimState {
  Eigen::MatrixXcd rho;
  std::size_t n_elec = 0;
  std::vector<int> fock_dims;
  double time = 0.0;

  std::size_t phonon_dim() const;
  std::size_t dim() const { return n_elec * phonon_dim(); }

  /// psi_elec (x) |0...0>.
  static SimState product(const Eigen::VectorXcd& electronic, const std::vector<int>& fock_dims);

  /// Throws NumericsError if Hermiticity (1e-10), trace (1e-8) or positivity
  /// (-1e-8) fail.
  void check(double herm_tol = 1e-10, double trace_tol = 1e-8, double eig_tol = 1e-8) const;
  double min_eigenvalue() const;
};

/// Bytes needed by the simulator for this many electronic levels and Fock dims.
double estimate_state_bytes(std::size_t n_elec, const std::vector<int>& fock_dims);

/// Instantaneous Lindblad generator in the interaction picture of H0 + sum w_s n_s:
///   drho/dt = -i [H_I(t), rho] + sum_c g_c (L_c rho L_c^+ - {L_c^+ L_c, rho}/2),
///   H_I(t) = -E(t, x_I(t)) (u.d)_I(t),  x_I(t) = x0 + sum_s eta_s/k_c (a_s e^{-i w_s t} + h.c.).
class LindbladGenerator {
 public:
  LindbladGenerator(const LevelScheme& scheme, const CombConfig& cfg, const ChainGeometry& geometry,
                    std::size_t ion, const SimOptions& opt);
  Eigen::MatrixXcd apply(double t, const Eigen::MatrixXcd& rho) const;
  Eigen::MatrixXcd hamiltonian(double t) const;
  std::size_t dim() const { return n_elec_ * P_; }
  const std::vector<int>& fock_dims() const { return dims_; }

 private:
  std::size_t n_elec_, P_;
  std::vector<int> dims_;
  CombConfig cfg_;
  double x0_;
  MotionCoupling coupling_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd ud_;
  std::vector<Eigen::MatrixXcd> lowering_;  // per mode, P x P
  std::vector<double> mode_omega_, mode_eta_;
  std::vector<Eigen::MatrixXcd> jumps_;     // sqrt(g_c) L_c on the full space
  Eigen::MatrixXcd jump_sum_;               // sum L^+ L
};

LindbladGenerator build_generator(const LevelScheme& scheme, const CombConfig& cfg,
                                  const ChainGeometry& geometry, std::size_t ion,
                                  const SimOptions& opt = {});

/// Pulse-pair trains by windowed integration: the propagation through one pair is
/// integrated once, in the eigenbasis of the (frozen) position operator, and reused
/// for every pair through the free-evolution phases; decay between windows is applied
/// as an exact map.
class TrainSimulator {
 public:
  TrainSimulator(const LevelScheme& scheme, const CombConfig& cfg, const ChainGeometry& geometry,
                 std::size_t ion, const SimOptions& opt = {});

  SimState initial_state(const Eigen::VectorXcd& electronic) const;
  /// Applies `n_pulses` pairs starting with pair index `first`.
  SimState evolve(const SimState& s, int n_pulses, int first = 0) const;
  /// One window (pair k) without the following gap.
  void apply_window(Eigen::MatrixXcd& rho, int k) const;
  /// Field-free decay over `gap` seconds.
  void apply_decay(Eigen::MatrixXcd& rho, double gap) const;

  double window_begin() const { return s_a_; }
  double window_end() const { return s_b_; }
  std::size_t nodes() const { return static_cast<std::size_t>(xi_.size()); }
  const Eigen::VectorXd& node_offsets() const { return xi_; }
  int rhs_evaluations() const { return rhs_evals_; }
  int accepted_steps() const { return steps_; }

  /// Pure-state propagation with the per-pair Magnus operators in place of the
  /// integrated window (decay ignored).
  Eigen::VectorXcd pure_state_reference(const Eigen::VectorXcd& psi0, int n_pulses,
                                        const MagnusOptions& mopt = {}) const;

 private:
  void integrate_window();

  std::size_t n_elec_, P_;
  std::vector<int> dims_;
  CombConfig cfg_;
  double x0_;
  SimOptions opt_;
  ElectronicModel model_;
  Eigen::VectorXd total_energy_;  // e_alpha + sum w_s n_s
  double s_a_ = 0, s_b_ = 0, s_c_ = 0;
  Eigen::VectorXd xi_;            // node offsets (eigenvalues of dx_hat at s_c)
  Eigen::MatrixXcd Q_;            // Fock -> node basis, columns are eigenvectors
  std::vector<Eigen::MatrixXcd> V_;  // per node electronic propagator through the window
  std::vector<std::size_t> p_levels_;
  std::vector<Eigen::MatrixXcd> K_;  // per node pair (i <= j): 36 x 324 jump integrals
  std::vector<Eigen::MatrixXcd> LP_; // sqrt(g_c) L_c restricted to short-lived columns
  Eigen::VectorXd gamma_;
  int rhs_evals_ = 0, steps_ = 0;
};

SimState evolve_train(const SimState& initial, const GatePlan& plan, const LevelScheme& scheme,
                      const ChainGeometry& geometry, std::size_t ion, const SimOptions& opt = {});

/// Arg <q1, 0| rho |q0, 0>; throws PhysicsError if the coherence is below 1e-6.
double extract_phase(const SimState& s, const QubitLevels& q);

struct Diagnostics {
  Eigen::VectorXd populations;   // per electronic level
  double qubit_population = 0.0;
  double nonqubit_population = 0.0;
  std::vector<double> phonon_number;               // per mode
  std::vector<std::vector<double>> fock_distribution;  // per mode
  double phonon_excitation = 0.0;  // 1 - P(all modes in |0>)
  double fock_leak = 0.0;          // largest population in any |n_max>
  double trace_deficit = 0.0;
};

Diagnostics diagnostics(const SimState& s, const QubitLevels& q);

}  // namespace combgate
