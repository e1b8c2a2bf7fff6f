#include "combgate/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "combgate/errors.hpp"
#include "combgate/magnus.hpp"

namespace combgate {

namespace {

using cplx = std::complex<double>;
const cplx I1(0.0, 1.0);

std::size_t dims_product(const std::vector<int>& dims) {
  std::size_t p = 1;
  for (int d : dims) p *= static_cast<std::size_t>(d);
  return p;
}

// Occupation of `mode` in mixed-radix Fock index p (mode 0 most significant).
int digit(std::size_t p, const std::vector<int>& dims, std::size_t mode) {
  for (std::size_t s = dims.size(); s-- > mode + 1;) p /= static_cast<std::size_t>(dims[s]);
  return static_cast<int>(p % static_cast<std::size_t>(dims[mode]));
}

Eigen::MatrixXcd lowering(const std::vector<int>& dims, std::size_t mode) {
  const std::size_t P = dims_product(dims);
  std::size_t stride = 1;
  for (std::size_t s = mode + 1; s < dims.size(); ++s) stride *= static_cast<std::size_t>(dims[s]);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(P, P);
  for (std::size_t p = 0; p < P; ++p) {
    const int n = digit(p, dims, mode);
    if (n > 0) a(p - stride, p) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

struct Phonons {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXcd> a;
  std::vector<double> omega, eta;
  double k_c = 0.0;

  // dx_hat in the interaction picture at time t.
  Eigen::MatrixXcd dx(double t) const {
    const auto P = static_cast<Eigen::Index>(dims_product(dims));
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(P, P);
    for (std::size_t s = 0; s < a.size(); ++s) {
      const Eigen::MatrixXcd term = (eta[s] / k_c) * a[s] * std::polar(1.0, -omega[s] * t);
      x += term + term.adjoint();
    }
    return x;
  }
};

Phonons make_phonons(const ChainGeometry& g, std::size_t ion, const CombConfig& cfg, int n_max) {
  g.validate();
  if (ion >= g.ions()) throw ConfigError("ion index out of range");
  if (n_max < 1) throw ConfigError("Fock cutoff must be at least 1");
  Phonons ph;
  ph.k_c = cfg.k_c();
  for (std::size_t s = 0; s < g.modes(); ++s) {
    ph.dims.push_back(n_max + 1);
    ph.omega.push_back(g.mode_omega[s]);
    ph.eta.push_back(g.eta(static_cast<Eigen::Index>(ion), static_cast<Eigen::Index>(s)));
  }
  for (std::size_t s = 0; s < g.modes(); ++s) ph.a.push_back(lowering(ph.dims, s));
  return ph;
}

LevelScheme effective_scheme(const LevelScheme& scheme, const SimOptions& opt) {
  return opt.decay ? scheme : scheme.without_decay();
}

// Shorthand for sqrt(g_c) L_c, dropping channels with zero rate.
std::vector<Eigen::MatrixXcd> jump_ops(const LevelScheme& scheme) {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& ch : scheme.decay_channels())
    if (ch.rate > 0.0) out.push_back(std::sqrt(ch.rate) * ch.op);
  return out;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

struct Nonzero {
  Eigen::Index a, b;
  cplx ud;
  double delta;
};

std::vector<Nonzero> nonzeros(const Eigen::MatrixXcd& ud, const Eigen::VectorXd& e) {
  std::vector<Nonzero> out;
  for (Eigen::Index a = 0; a < ud.rows(); ++a)
    for (Eigen::Index b = 0; b < ud.cols(); ++b)
      if (std::abs(ud(a, b)) > 0.0) out.push_back({a, b, ud(a, b), e[a] - e[b]});
  return out;
}

}  // namespace

// ---------------------------------------------------------------- SimState

std::size_t SimState::phonon_dim() const { return dims_product(fock_dims); }

SimState SimState::product(const Eigen::VectorXcd& electronic, const std::vector<int>& fock_dims) {
  if (std::abs(electronic.norm() - 1.0) > 1e-12) throw ConfigError("initial electronic state is not normalized");
  SimState s;
  s.n_elec = static_cast<std::size_t>(electronic.size());
  s.fock_dims = fock_dims;
  const auto P = static_cast<Eigen::Index>(s.phonon_dim());
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(electronic.size() * P);
  for (Eigen::Index a = 0; a < electronic.size(); ++a) psi[a * P] = electronic[a];
  s.rho = psi * psi.adjoint();
  return s;
}

double SimState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void SimState::check(double herm_tol, double trace_tol, double eig_tol) const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) {
    std::ostringstream os;
    os << "density matrix lost Hermiticity (" << herm << ") at t = " << time;
    throw NumericsError(os.str());
  }
  const double tr = std::abs(rho.trace() - 1.0);
  if (tr > trace_tol) {
    std::ostringstream os;
    os << "trace drifted by " << tr << " at t = " << time;
    throw NumericsError(os.str());
  }
  const double ev = min_eigenvalue();
  if (ev < -eig_tol) {
    std::ostringstream os;
    os << "density matrix lost positivity (eigenvalue " << ev << ") at t = " << time;
    throw NumericsError(os.str());
  }
}

double estimate_state_bytes(std::size_t n_elec, const std::vector<int>& fock_dims) {
  const double P = static_cast<double>(dims_product(fock_dims));
  const double d = static_cast<double>(n_elec) * P;
  const double n = static_cast<double>(n_elec);
  const double np = 6.0;  // short-lived sublevels in the bundled scheme
  const double c = sizeof(cplx);
  // A handful of dim x dim work matrices, node propagators, node-pair jump integrals.
  return c * (8.0 * d * d + P * n * n * 4.0 + 0.5 * P * (P + 1.0) * np * np * n * n);
}

// ------------------------------------------------------- LindbladGenerator

LindbladGenerator::LindbladGenerator(const LevelScheme& scheme_in, const CombConfig& cfg,
                                     const ChainGeometry& geometry, std::size_t ion,
                                     const SimOptions& opt)
    : cfg_(cfg), x0_(0.0), coupling_(opt.coupling) {
  cfg_.validate();
  const LevelScheme scheme = effective_scheme(scheme_in, opt);
  const Phonons ph = make_phonons(geometry, ion, cfg_, opt.fock_cutoff);
  n_elec_ = scheme.size();
  dims_ = ph.dims;
  P_ = dims_product(dims_);
  x0_ = geometry.positions[ion];
  energies_ = scheme.energies();
  ud_ = scheme.dipole_along(cfg_.polarization);
  lowering_ = ph.a;
  mode_omega_ = ph.omega;
  mode_eta_ = ph.eta;
  const Eigen::MatrixXcd Ip = Eigen::MatrixXcd::Identity(P_, P_);
  const auto d = static_cast<Eigen::Index>(dim());
  jump_sum_ = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& L : jump_ops(scheme)) {
    jumps_.push_back(kron(L, Ip));
    jump_sum_ += jumps_.back().adjoint() * jumps_.back();
  }
}

Eigen::MatrixXcd LindbladGenerator::hamiltonian(double t) const {
  const auto P = static_cast<Eigen::Index>(P_);
  const auto k = static_cast<int>(std::lround(t / cfg_.period()));
  Eigen::MatrixXcd dx = Eigen::MatrixXcd::Zero(P, P);
  for (std::size_t s = 0; s < lowering_.size(); ++s) {
    const Eigen::MatrixXcd term =
        (mode_eta_[s] / cfg_.k_c()) * lowering_[s] * std::polar(1.0, -mode_omega_[s] * t);
    dx += term + term.adjoint();
  }
  Eigen::MatrixXcd F(P, P);
  if (coupling_ == MotionCoupling::LambDicke) {
    F = pair_field_scalar(t, x0_, k, cfg_) * Eigen::MatrixXcd::Identity(P, P) +
        pair_field_scalar_dx(t, x0_, k, cfg_) * dx;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dx);
    Eigen::VectorXcd f(P);
    for (Eigen::Index i = 0; i < P; ++i) f[i] = pair_field_scalar(t, x0_ + es.eigenvalues()[i], k, cfg_);
    F = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  }
  const auto n = static_cast<Eigen::Index>(n_elec_);
  Eigen::MatrixXcd udI(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      udI(a, b) = ud_(a, b) == 0.0 ? cplx(0.0) : ud_(a, b) * std::polar(1.0, (energies_[a] - energies_[b]) * t);
  return -kron(udI, F);
}

Eigen::MatrixXcd LindbladGenerator::apply(double t, const Eigen::MatrixXcd& rho) const {
  const Eigen::MatrixXcd H = hamiltonian(t);
  Eigen::MatrixXcd out = -I1 * (H * rho - rho * H);
  for (const auto& L : jumps_) out += L * rho * L.adjoint();
  out -= 0.5 * (jump_sum_ * rho + rho * jump_sum_);
  return out;
}

LindbladGenerator build_generator(const LevelScheme& scheme, const CombConfig& cfg,
                                  const ChainGeometry& geometry, std::size_t ion,
                                  const SimOptions& opt) {
  return LindbladGenerator(scheme, cfg, geometry, ion, opt);
}

// ---------------------------------------------------------- TrainSimulator

TrainSimulator::TrainSimulator(const LevelScheme& scheme_in, const CombConfig& cfg,
                               const ChainGeometry& geometry, std::size_t ion, const SimOptions& opt)
    : cfg_(cfg), x0_(0.0), opt_(opt) {
  cfg_.validate();
  if (!(opt_.rel_tol > 0.0) || !(opt_.abs_tol > 0.0)) throw ConfigError("integrator tolerances must be positive");
  if (!(opt_.window_half_span_tau >= 4.0)) throw ConfigError("window half span must be at least 4 tau");
  const LevelScheme scheme = effective_scheme(scheme_in, opt_);
  const Phonons ph = make_phonons(geometry, ion, cfg_, opt_.fock_cutoff);
  n_elec_ = scheme.size();
  dims_ = ph.dims;
  P_ = dims_product(dims_);
  x0_ = geometry.positions[ion];

  const double need = estimate_state_bytes(n_elec_, dims_);
  if (need > opt_.max_state_bytes) {
    std::ostringstream os;
    os << "simulation needs about " << need / 1e6 << " MB, above the configured limit of "
       << opt_.max_state_bytes / 1e6 << " MB";
    throw ConfigError(os.str());
  }

  model_ = ElectronicModel::from(scheme, cfg_.polarization);
  const auto jumps = jump_ops(scheme);
  // Total decay rate of each level from the jump operators, so that the trace is
  // conserved by construction.
  const auto n = static_cast<Eigen::Index>(n_elec_);
  gamma_ = Eigen::VectorXd::Zero(n);
  for (const auto& L : jumps) gamma_ += (L.adjoint() * L).diagonal().real();
  for (Eigen::Index a = 0; a < n; ++a)
    if (gamma_[a] > 0.0) p_levels_.push_back(static_cast<std::size_t>(a));
  model_.linewidths = gamma_;
  for (const auto& L : jumps) {
    Eigen::MatrixXcd lp(n, static_cast<Eigen::Index>(p_levels_.size()));
    for (std::size_t j = 0; j < p_levels_.size(); ++j) lp.col(static_cast<Eigen::Index>(j)) = L.col(static_cast<Eigen::Index>(p_levels_[j]));
    LP_.push_back(lp);
  }

  total_energy_.resize(static_cast<Eigen::Index>(n_elec_ * P_));
  for (std::size_t a = 0; a < n_elec_; ++a)
    for (std::size_t p = 0; p < P_; ++p) {
      double e = model_.energies[static_cast<Eigen::Index>(a)];
      for (std::size_t s = 0; s < dims_.size(); ++s) e += ph.omega[s] * digit(p, dims_, s);
      total_energy_[static_cast<Eigen::Index>(a * P_ + p)] = e;
    }

  const double a1 = arrival_1(x0_, 0, cfg_), a2 = arrival_2(x0_, 0, cfg_);
  const double half = opt_.window_half_span_tau * cfg_.tau_s;
  s_a_ = std::min(a1, a2) - half;
  s_b_ = std::max(a1, a2) + half;
  s_c_ = 0.5 * (s_a_ + s_b_);
  if (s_b_ - s_a_ >= cfg_.period()) throw ConfigError("pulse window longer than the repetition period");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ph.dx(s_c_));
  xi_ = es.eigenvalues();
  Q_ = es.eigenvectors();
  integrate_window();
}

void TrainSimulator::integrate_window() {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<cplx>;
  const auto n = static_cast<Eigen::Index>(n_elec_);
  const auto nn = static_cast<std::size_t>(n * n);
  const std::size_t nodes = static_cast<std::size_t>(xi_.size());
  const auto nz = nonzeros(model_.ud, model_.energies);
  const Eigen::VectorXd half_gamma = 0.5 * model_.linewidths;
  const bool ld = opt_.coupling == MotionCoupling::LambDicke;
  const CombConfig cfg = cfg_;
  const double x0 = x0_;
  const Eigen::VectorXd xi = xi_;

  State x(nodes * nn, cplx(0.0));
  for (std::size_t i = 0; i < nodes; ++i)
    for (Eigen::Index a = 0; a < n; ++a) x[i * nn + static_cast<std::size_t>(a * n + a)] = 1.0;

  std::vector<cplx> coupling(nz.size());
  std::vector<double> field(nodes);
  auto rhs = [&](const State& v, State& dv, double s) {
    ++rhs_evals_;
    for (std::size_t z = 0; z < nz.size(); ++z) coupling[z] = I1 * nz[z].ud * std::polar(1.0, nz[z].delta * s);
    if (ld) {
      const double f0 = pair_field_scalar(s, x0, 0, cfg), f1 = pair_field_scalar_dx(s, x0, 0, cfg);
      for (std::size_t i = 0; i < nodes; ++i) field[i] = f0 + xi[static_cast<Eigen::Index>(i)] * f1;
    } else {
      for (std::size_t i = 0; i < nodes; ++i) field[i] = pair_field_scalar(s, x0 + xi[static_cast<Eigen::Index>(i)], 0, cfg);
    }
    // Column-major V: element (a, c) at a + n c.  dV = (i f udI - G/2) V.
    for (std::size_t i = 0; i < nodes; ++i) {
      const cplx* V = v.data() + i * nn;
      cplx* D = dv.data() + i * nn;
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index a = 0; a < n; ++a) D[a + n * c] = -half_gamma[a] * V[a + n * c];
      for (std::size_t z = 0; z < nz.size(); ++z) {
        const cplx w = field[i] * coupling[z];
        const Eigen::Index a = nz[z].a, b = nz[z].b;
        for (Eigen::Index c = 0; c < n; ++c) D[a + n * c] += w * V[b + n * c];
      }
    }
  };

  const auto np = static_cast<Eigen::Index>(p_levels_.size());
  const std::size_t pairs = nodes * (nodes + 1) / 2;
  K_.assign(pairs, Eigen::MatrixXcd::Zero(np * np, n * n));
  std::vector<Eigen::MatrixXcd> prevP(nodes, Eigen::MatrixXcd::Zero(np, n));
  double t_prev = s_a_, dt_left = 0.0;
  bool first = true;

  auto accumulate = [&](double w) {
    if (w == 0.0) return;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t j = i; j < nodes; ++j, ++idx) {
        Eigen::MatrixXcd& K = K_[idx];
        const Eigen::MatrixXcd& Vi = prevP[i];
        const Eigen::MatrixXcd& Vj = prevP[j];
        for (Eigen::Index c = 0; c < n; ++c)
          for (Eigen::Index a = 0; a < np; ++a) {
            const cplx coeff = w * std::conj(Vj(a, c));
            if (coeff == 0.0) continue;
            K.block(np * a, n * c, np, n) += coeff * Vi;
          }
      }
  };

  auto observer = [&](const State& v, double s) {
    if (!first) {
      const double dt = s - t_prev;
      accumulate(0.5 * (dt_left + dt));  // finishes the weight of the previous sample
      dt_left = dt;
      ++steps_;
    }
    first = false;
    t_prev = s;
    for (std::size_t i = 0; i < nodes; ++i) {
      Eigen::Map<const Eigen::MatrixXcd> V(v.data() + i * nn, n, n);
      for (Eigen::Index r = 0; r < np; ++r) prevP[i].row(r) = V.row(static_cast<Eigen::Index>(p_levels_[static_cast<std::size_t>(r)]));
    }
  };

  auto stepper = odeint::make_controlled(opt_.abs_tol, opt_.rel_tol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = cfg_.tau_s / 100.0;
  try {
    odeint::integrate_adaptive(stepper, rhs, x, s_a_, s_b_, dt0, observer);
  } catch (const odeint::step_adjustment_error& e) {
    throw NumericsError(std::string("in-pulse step size underflow: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw NumericsError(std::string("in-pulse integrator made no progress: ") + e.what());
  }
  accumulate(0.5 * dt_left);

  V_.clear();
  for (std::size_t i = 0; i < nodes; ++i) V_.push_back(Eigen::Map<const Eigen::MatrixXcd>(x.data() + i * nn, n, n));
}

SimState TrainSimulator::initial_state(const Eigen::VectorXcd& electronic) const {
  if (static_cast<std::size_t>(electronic.size()) != n_elec_) throw ConfigError("initial state has the wrong number of levels");
  return SimState::product(electronic, dims_);
}

void TrainSimulator::apply_window(Eigen::MatrixXcd& rho, int k) const {
  const auto n = static_cast<Eigen::Index>(n_elec_);
  const auto P = static_cast<Eigen::Index>(P_);
  const Eigen::VectorXcd S = free_phases(total_energy_, cfg_.period(), k);
  // Back to the frame of pair 0, then into the node basis of the position operator.
  rho = (S.conjugate().asDiagonal() * rho * S.asDiagonal()).eval();
  Eigen::MatrixXcd QQ = Eigen::MatrixXcd::Zero(n * P, n * P);
  for (Eigen::Index a = 0; a < n; ++a) QQ.block(a * P, a * P, P, P) = Q_;
  Eigen::MatrixXcd x = QQ.adjoint() * rho * QQ;

  const auto np = static_cast<Eigen::Index>(p_levels_.size());
  Eigen::MatrixXcd out(n * P, n * P);
  Eigen::MatrixXcd B(n, n), sigma(np, np);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < P; ++i)
    for (Eigen::Index j = i; j < P; ++j, ++idx) {
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) B(a, b) = x(a * P + i, b * P + j);
      Eigen::MatrixXcd R = V_[static_cast<std::size_t>(i)] * B * V_[static_cast<std::size_t>(j)].adjoint();
      if (np > 0 && !LP_.empty()) {
        const Eigen::VectorXcd v = K_[idx] * Eigen::Map<const Eigen::VectorXcd>(B.data(), n * n);
        sigma = Eigen::Map<const Eigen::MatrixXcd>(v.data(), np, np);
        for (const auto& L : LP_) R += L * sigma * L.adjoint();
      }
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
          out(a * P + i, b * P + j) = R(a, b);
          if (i != j) out(b * P + j, a * P + i) = std::conj(R(a, b));
        }
    }
  rho = QQ * out * QQ.adjoint();
  rho = (S.asDiagonal() * rho * S.conjugate().asDiagonal()).eval();
}

void TrainSimulator::apply_decay(Eigen::MatrixXcd& rho, double gap) const {
  if (p_levels_.empty() || gap <= 0.0) return;
  const auto n = static_cast<Eigen::Index>(n_elec_);
  const auto P = static_cast<Eigen::Index>(P_);
  const auto np = static_cast<Eigen::Index>(p_levels_.size());
  // Short-lived block with each coherence weighted by \int_0^gap exp(-G t) dt.
  Eigen::MatrixXcd M(np * P, np * P);
  for (Eigen::Index u = 0; u < np; ++u)
    for (Eigen::Index v = 0; v < np; ++v) {
      const auto pu = static_cast<Eigen::Index>(p_levels_[static_cast<std::size_t>(u)]);
      const auto pv = static_cast<Eigen::Index>(p_levels_[static_cast<std::size_t>(v)]);
      const double g = 0.5 * (gamma_[pu] + gamma_[pv]);
      const double w = -std::expm1(-g * gap) / g;
      M.block(u * P, v * P, P, P) = w * rho.block(pu * P, pv * P, P, P);
    }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const double g = 0.5 * (gamma_[a] + gamma_[b]);
      if (g > 0.0) rho.block(a * P, b * P, P, P) *= std::exp(-g * gap);
    }
  const Eigen::MatrixXcd Ip = Eigen::MatrixXcd::Identity(P, P);
  for (const auto& L : LP_) {
    const Eigen::MatrixXcd LL = kron(L, Ip);
    rho += LL * M * LL.adjoint();
  }
}

SimState TrainSimulator::evolve(const SimState& s0, int n_pulses, int first) const {
  if (n_pulses < 0) throw ConfigError("negative number of pulse pairs");
  if (s0.n_elec != n_elec_ || s0.fock_dims != dims_) throw ConfigError("state does not match the simulator dimensions");
  SimState s = s0;
  const double gap = cfg_.period() - (s_b_ - s_a_);
  auto leak = [&]() {
    const Diagnostics d = diagnostics(s, QubitLevels{});
    if (d.fock_leak > opt_.fock_leak_limit) {
      std::ostringstream os;
      os << "Fock cutoff n_max = " << opt_.fock_cutoff << " too small: population " << d.fock_leak
         << " in the top level after pair " << s.time / cfg_.period();
      throw NumericsError(os.str());
    }
  };
  for (int k = first; k < first + n_pulses; ++k) {
    apply_window(s.rho, k);
    apply_decay(s.rho, gap);
    s.time += cfg_.period();
    const int done = k - first + 1;
    if (opt_.checkpoint_every > 0 && (done % opt_.checkpoint_every == 0 || done == n_pulses)) {
      s.check();
      leak();
    }
  }
  return s;
}

Eigen::VectorXcd TrainSimulator::pure_state_reference(const Eigen::VectorXcd& psi0, int n_pulses,
                                                      const MagnusOptions& mopt) const {
  const auto n = static_cast<Eigen::Index>(n_elec_);
  const auto P = static_cast<Eigen::Index>(P_);
  if (psi0.size() != n * P) throw ConfigError("reference state has the wrong dimension");
  ElectronicModel m = model_;
  m.linewidths.setZero();
  std::vector<Eigen::MatrixXcd> U;
  for (Eigen::Index i = 0; i < P; ++i) {
    const double xi = xi_[i];
    Spectrum E;
    if (opt_.coupling == MotionCoupling::LambDicke) {
      const CombConfig cfg = cfg_;
      const double x0 = x0_;
      E = [cfg, x0, xi](double w) { return pair_field_fourier(w, x0, cfg) + xi * pair_field_fourier_dx(w, x0, cfg); };
    } else {
      E = pair_spectrum(cfg_, x0_ + xi);
    }
    U.push_back(pulse_pair_operator(m, E, cfg_, mopt).U);
  }
  Eigen::VectorXcd psi = psi0;
  Eigen::MatrixXcd C(P, n);  // C(i, a): amplitude of level a on node i
  for (int k = 0; k < n_pulses; ++k) {
    const Eigen::VectorXcd S = free_phases(total_energy_, cfg_.period(), k);
    psi = S.conjugate().cwiseProduct(psi);
    for (Eigen::Index a = 0; a < n; ++a) C.col(a) = Q_.adjoint() * psi.segment(a * P, P);
    for (Eigen::Index i = 0; i < P; ++i) C.row(i) = (U[static_cast<std::size_t>(i)] * C.row(i).transpose()).transpose();
    for (Eigen::Index a = 0; a < n; ++a) psi.segment(a * P, P) = Q_ * C.col(a);
    psi = S.cwiseProduct(psi);
  }
  return psi;
}

SimState evolve_train(const SimState& initial, const GatePlan& plan, const LevelScheme& scheme,
                      const ChainGeometry& geometry, std::size_t ion, const SimOptions& opt) {
  if (plan.n_pulses == 0) return initial;
  TrainSimulator sim(scheme, plan.comb, geometry, ion, opt);
  return sim.evolve(initial, plan.n_pulses);
}

double extract_phase(const SimState& s, const QubitLevels& q) {
  const auto P = static_cast<Eigen::Index>(s.phonon_dim());
  const cplx c = s.rho(static_cast<Eigen::Index>(q.level1) * P, static_cast<Eigen::Index>(q.level0) * P);
  if (std::abs(c) < 1e-6) throw PhysicsError("qubit coherence vanished; phase undefined");
  return std::arg(c);
}

Diagnostics diagnostics(const SimState& s, const QubitLevels& q) {
  Diagnostics d;
  const auto n = static_cast<Eigen::Index>(s.n_elec);
  const std::size_t P = s.phonon_dim();
  const Eigen::VectorXd diag = s.rho.diagonal().real();
  d.populations = Eigen::VectorXd::Zero(n);
  std::vector<double> fock_total(P, 0.0);
  for (Eigen::Index a = 0; a < n; ++a)
    for (std::size_t p = 0; p < P; ++p) {
      const double v = diag[a * static_cast<Eigen::Index>(P) + static_cast<Eigen::Index>(p)];
      d.populations[a] += v;
      fock_total[p] += v;
    }
  const double trace = d.populations.sum();
  d.trace_deficit = 1.0 - trace;
  d.qubit_population = d.populations[static_cast<Eigen::Index>(q.level0)];
  if (q.level1 != q.level0) d.qubit_population += d.populations[static_cast<Eigen::Index>(q.level1)];
  d.nonqubit_population = trace - d.qubit_population;
  d.phonon_number.assign(s.fock_dims.size(), 0.0);
  d.fock_distribution.assign(s.fock_dims.size(), {});
  for (std::size_t m = 0; m < s.fock_dims.size(); ++m) {
    d.fock_distribution[m].assign(static_cast<std::size_t>(s.fock_dims[m]), 0.0);
    for (std::size_t p = 0; p < P; ++p) {
      const int k = digit(p, s.fock_dims, m);
      d.fock_distribution[m][static_cast<std::size_t>(k)] += fock_total[p];
      d.phonon_number[m] += k * fock_total[p];
    }
    d.fock_leak = std::max(d.fock_leak, d.fock_distribution[m].back());
  }
  d.phonon_excitation = trace - fock_total[0];
  return d;
}

}  // namespace combgate
