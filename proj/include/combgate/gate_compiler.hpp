#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "combgate/phase_profile.hpp"

namespace combgate {

enum class Axis { X, Y, Z };
const char* axis_name(Axis a);
Axis parse_axis(const std::string& s);

/// Ion positions along the trap axis and the motional modes they share.
struct ChainGeometry {
  std::vector<double> positions;   // m, strictly increasing
  Eigen::MatrixXd eta;             // ions x modes Lamb-Dicke parameters
  std::vector<double> mode_omega;  // rad/s

  std::size_t ions() const { return positions.size(); }
  std::size_t modes() const { return mode_omega.size(); }
  void validate() const;
};

/// eta = k_c sqrt(hbar / (2 m omega)).
double lamb_dicke(double omega, double mass_kg, double k_c);

/// Dimensionless equilibrium positions of n ions in a harmonic well (units of
/// (e^2 / (4 pi eps0 m w^2))^(1/3)), by Newton iteration on the force balance.
std::vector<double> equilibrium_positions(std::size_t n, double rel_tol = 1e-12);

/// Axial chain for n ions in a trap of axial frequency omega_ax: positions, normal
/// modes and per-ion per-mode Lamb-Dicke factors along the comb axis.
ChainGeometry harmonic_chain(std::size_t n, double omega_ax, double mass_kg, double k_c,
                             double offset_m = 0.0);

/// Single ion with one mode.
ChainGeometry single_ion(double x0, double omega_ax, double eta);

/// t2 - t1 that puts the pulse overlap at x.
double delay_for_target(double x_target);
double target_for_delay(double delay);

struct PulseCount {
  int n = 0;
  double residual = 0.0;  // theta - n * dtheta
};
PulseCount pulses_for_angle(double theta, double dtheta);

struct GateStep {
  enum class Kind { Global, Train };
  Kind kind = Kind::Global;
  Axis axis = Axis::Z;
  double angle = 0.0;  // global rotations only
};

struct CompileOptions {
  /// If positive, the field is rescaled first so that the phase per pair at the
  /// target equals this value.
  double calibrate_phase_per_pair = 0.0;
  /// Rescale the field after rounding so that n * dtheta equals theta exactly.
  bool fractional_calibration = false;
};

struct GatePlan {
  std::size_t target = 0;
  Axis axis = Axis::Z;
  double theta = 0.0;
  double delay = 0.0;          // t2 - t1, s
  int n_pulses = 0;
  double dtheta_target = 0.0;  // differential phase per pair at the target
  double dtheta_far = 0.0;
  double residual_angle = 0.0;
  double field_scale = 1.0;    // applied to the configured peak field
  double compensation = 0.0;   // angle of the global Rz(-compensation)
  CombConfig comb;             // aimed, scaled and with n_pulses set
  std::vector<GateStep> steps; // time order, first applied first
  std::vector<double> predicted_residual;  // per ion, rad

  double duration() const { return n_pulses * comb.period(); }
  bool empty() const { return steps.empty(); }
};

/// Compiles a local rotation on ion `target`. The train puts Rz(2 N dtheta(x_i)) on
/// every ion; a global Rz(-2 N dtheta_far) removes the part shared with distant
/// ions. X and Y are obtained by conjugating with global pi/2 rotations:
///   X: Ry(-pi/2), train, Rz(-c), Ry(pi/2)      Y: Rx(pi/2), train, Rz(-c), Rx(-pi/2)
GatePlan compile_rotation(Axis axis, double theta, std::size_t target,
                          const StarkPhaseModel& phases, const ChainGeometry& geometry,
                          const CompileOptions& opt = {});

struct IonPhase {
  std::size_t ion = 0;
  double x = 0.0;
  double train_angle = 0.0;  // 2 N dtheta(x)
  double net_angle = 0.0;    // after the global compensation
  double residual = 0.0;     // net minus intended (theta on target, 0 elsewhere)
  double crosstalk_bound = 0.0;       // 2 N * ripple envelope, non-target ions
  double crosstalk_infidelity = 0.0;  // crosstalk_bound^2
};

std::vector<IonPhase> chain_phase_report(const GatePlan& plan, const StarkPhaseModel& phases,
                                         const ChainGeometry& geometry);

// 2x2 helpers on (|0>, |1>).
using Mat2 = Eigen::Matrix2cd;
Mat2 rotation(Axis axis, double angle);
/// Unitary the plan applies to an ion whose train angle is `train_angle`.
Mat2 plan_unitary(const GatePlan& plan, double train_angle);
/// |Tr(A^dagger B)|/2: 1 when equal up to a global phase.
double gate_overlap(const Mat2& a, const Mat2& b);

}  // namespace combgate
