#include "combgate/gate_compiler.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"

namespace combgate {

using cplx = std::complex<double>;

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Z: return "Z";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "X" || s == "x") return Axis::X;
  if (s == "Y" || s == "y") return Axis::Y;
  if (s == "Z" || s == "z") return Axis::Z;
  throw ConfigError("rotation axis must be X, Y or Z, got '" + s + "'");
}

void ChainGeometry::validate() const {
  if (positions.empty()) throw ConfigError("chain: no ions");
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(positions[i] > positions[i - 1]))
      throw ConfigError("chain: ion positions must be strictly increasing");
  if (static_cast<std::size_t>(eta.rows()) != positions.size() ||
      static_cast<std::size_t>(eta.cols()) != mode_omega.size())
    throw ConfigError("chain: Lamb-Dicke table must be ions x modes");
  if (!eta.allFinite()) throw ConfigError("chain: Lamb-Dicke parameters must be finite");
  for (double w : mode_omega)
    if (!(w > 0.0)) throw ConfigError("chain: mode frequencies must be positive");
}

double lamb_dicke(double omega, double mass_kg, double k_c) {
  if (!(omega > 0.0) || !(mass_kg > 0.0) || !(k_c > 0.0))
    throw ConfigError("lamb_dicke: inputs must be positive");
  return k_c * std::sqrt(constants::hbar / (2.0 * mass_kg * omega));
}

namespace {

Eigen::MatrixXd coulomb_hessian(const std::vector<double>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r3 = std::pow(std::abs(u[i] - u[j]), 3);
      A(i, i) += 2.0 / r3;
      A(i, j) = -2.0 / r3;
    }
  return A;
}

}  // namespace

std::vector<double> equilibrium_positions(std::size_t n, double rel_tol) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (static_cast<double>(i) - 0.5 * (n - 1.0)) * 1.5;
  if (n < 2) return u;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd F(n);
    for (std::size_t i = 0; i < n; ++i) {
      double f = u[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double r = u[i] - u[j];
        f -= (r > 0 ? 1.0 : -1.0) / (r * r);
      }
      F[static_cast<Eigen::Index>(i)] = f;
    }
    const Eigen::VectorXd step = coulomb_hessian(u).ldlt().solve(F);
    double scale = 1.0;
    // Keep the ordering intact.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double gap = u[i + 1] - u[i];
      const double dgap = step[i + 1] - step[i];
      if (dgap > 0.5 * gap) scale = std::min(scale, 0.5 * gap / dgap);
    }
    double maxu = 0.0, maxs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] -= scale * step[static_cast<Eigen::Index>(i)];
      maxu = std::max(maxu, std::abs(u[i]));
      maxs = std::max(maxs, std::abs(scale * step[static_cast<Eigen::Index>(i)]));
    }
    if (maxs <= rel_tol * maxu) return u;
  }
  throw NumericsError("equilibrium_positions: Newton iteration did not converge");
}

ChainGeometry harmonic_chain(std::size_t n, double omega_ax, double mass_kg, double k_c,
                             double offset_m) {
  if (n == 0) throw ConfigError("harmonic_chain: need at least one ion");
  using namespace constants;
  const double ell =
      std::cbrt(e * e / (4.0 * pi * eps0 * mass_kg * omega_ax * omega_ax));
  const auto u = equilibrium_positions(n);
  ChainGeometry g;
  for (double ui : u) g.positions.push_back(offset_m + ell * ui);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coulomb_hessian(u));
  const double eta0 = lamb_dicke(omega_ax, mass_kg, k_c);
  g.eta.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(n); ++s) {
    const double mu = es.eigenvalues()[s];
    const double ws = omega_ax * std::sqrt(mu);
    g.mode_omega.push_back(ws);
    Eigen::VectorXd b = es.eigenvectors().col(s);
    if (b.sum() < 0.0 || (std::abs(b.sum()) < 1e-12 && b[0] < 0.0)) b = -b;
    g.eta.col(s) = eta0 * b * std::sqrt(omega_ax / ws);
  }
  return g;
}

ChainGeometry single_ion(double x0, double omega_ax, double eta) {
  ChainGeometry g;
  g.positions = {x0};
  g.mode_omega = {omega_ax};
  g.eta = Eigen::MatrixXd::Constant(1, 1, eta);
  return g;
}

double delay_for_target(double x_target) { return 2.0 * x_target / constants::c; }
double target_for_delay(double delay) { return 0.5 * constants::c * delay; }

PulseCount pulses_for_angle(double theta, double dtheta) {
  if (!(dtheta > 0.0))
    throw PhysicsError("pulses_for_angle: differential phase per pair is not positive (" +
                       std::to_string(dtheta) +
                       " rad); the carrier may sit near a magic wavelength");
  if (!(theta > 0.0)) throw ConfigError("pulses_for_angle: rotation angle must be positive");
  PulseCount pc;
  pc.n = static_cast<int>(std::lround(theta / dtheta));
  pc.residual = theta - pc.n * dtheta;
  return pc;
}

GatePlan compile_rotation(Axis axis, double theta, std::size_t target,
                          const StarkPhaseModel& phases, const ChainGeometry& geometry,
                          const CompileOptions& opt) {
  if (target >= geometry.ions()) throw ConfigError("compile_rotation: target ion out of range");
  if (theta < 0.0) throw ConfigError("compile_rotation: rotation angle must be nonnegative");
  const double x_tg = geometry.positions[target];

  GatePlan plan;
  plan.target = target;
  plan.axis = axis;
  plan.theta = theta;
  plan.delay = delay_for_target(x_tg);
  plan.predicted_residual.assign(geometry.ions(), 0.0);

  StarkPhaseModel aimed = phases.aimed_at(x_tg);
  plan.comb = aimed.comb();
  plan.comb.n_pulses = 0;
  if (theta == 0.0) return plan;

  double scale = 1.0;
  if (opt.calibrate_phase_per_pair > 0.0) {
    const double d = aimed.differential(x_tg);
    if (!(d > 0.0))
      throw PhysicsError("compile_rotation: cannot calibrate a nonpositive phase per pair");
    const double f = std::sqrt(opt.calibrate_phase_per_pair / d);
    aimed = aimed.with_field_scale(f);
    scale *= f;
  }
  double dtheta = aimed.differential(x_tg);
  const PulseCount pc = pulses_for_angle(theta, dtheta);
  if (pc.n == 0) throw PhysicsError("compile_rotation: angle is below half a pulse quantum");
  if (opt.fractional_calibration) {
    const double f = std::sqrt(theta / (pc.n * dtheta));
    aimed = aimed.with_field_scale(f);
    scale *= f;
    dtheta = aimed.differential(x_tg);
  }

  plan.n_pulses = pc.n;
  plan.dtheta_target = dtheta;
  plan.dtheta_far = aimed.differential_far();
  plan.residual_angle = theta - pc.n * dtheta;
  plan.field_scale = scale;
  plan.compensation = 2.0 * pc.n * plan.dtheta_far;
  plan.comb = aimed.comb();
  plan.comb.n_pulses = pc.n;

  const double h = 0.5 * constants::pi;
  const GateStep train{GateStep::Kind::Train, Axis::Z, 0.0};
  const GateStep comp{GateStep::Kind::Global, Axis::Z, -plan.compensation};
  switch (axis) {
    case Axis::Z:
      plan.steps = {train, comp};
      break;
    case Axis::X:
      plan.steps = {{GateStep::Kind::Global, Axis::Y, -h}, train, comp,
                    {GateStep::Kind::Global, Axis::Y, h}};
      break;
    case Axis::Y:
      plan.steps = {{GateStep::Kind::Global, Axis::X, h}, train, comp,
                    {GateStep::Kind::Global, Axis::X, -h}};
      break;
  }
  for (std::size_t i = 0; i < geometry.ions(); ++i) {
    const double net = 2.0 * pc.n * aimed.differential(geometry.positions[i]) - plan.compensation;
    plan.predicted_residual[i] = net - (i == target ? theta : 0.0);
  }
  return plan;
}

std::vector<IonPhase> chain_phase_report(const GatePlan& plan, const StarkPhaseModel& phases,
                                         const ChainGeometry& geometry) {
  std::vector<IonPhase> out;
  StarkPhaseModel aimed = phases.aimed_at(geometry.positions.at(plan.target));
  if (plan.field_scale != 1.0) aimed = aimed.with_field_scale(plan.field_scale);
  const double N2 = 2.0 * plan.n_pulses;
  for (std::size_t i = 0; i < geometry.ions(); ++i) {
    IonPhase ip;
    ip.ion = i;
    ip.x = geometry.positions[i];
    ip.train_angle = N2 * aimed.differential(ip.x);
    ip.net_angle = ip.train_angle - plan.compensation;
    ip.residual = ip.net_angle - (i == plan.target ? plan.theta : 0.0);
    if (i != plan.target) {
      ip.crosstalk_bound = N2 * aimed.differential_envelope(ip.x);
      ip.crosstalk_infidelity = ip.crosstalk_bound * ip.crosstalk_bound;
    }
    out.push_back(ip);
  }
  return out;
}

Mat2 rotation(Axis axis, double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  const cplx I(0.0, 1.0);
  Mat2 m;
  switch (axis) {
    case Axis::X: m << c, -I * s, -I * s, c; break;
    case Axis::Y: m << c, -s, s, c; break;
    case Axis::Z: m << std::exp(-I * (0.5 * angle)), 0.0, 0.0, std::exp(I * (0.5 * angle)); break;
  }
  return m;
}

Mat2 plan_unitary(const GatePlan& plan, double train_angle) {
  Mat2 u = Mat2::Identity();
  for (const auto& st : plan.steps) {
    const Mat2 op = st.kind == GateStep::Kind::Train ? rotation(Axis::Z, train_angle)
                                                     : rotation(st.axis, st.angle);
    u = op * u;
  }
  return u;
}

double gate_overlap(const Mat2& a, const Mat2& b) {
  return std::abs((a.adjoint() * b).trace()) / 2.0;
}

}  // namespace combgate
