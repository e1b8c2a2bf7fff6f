#pragma once

// Independent reference for one pulse pair: direct adaptive integration of
// i dU/dt = H_I(t) U, H_I(t) = -E(t) (u.d)_I(t) - i G/2, on a small level scheme.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "combgate/comb_field.hpp"
#include "combgate/magnus.hpp"

namespace toy {

using cplx = std::complex<double>;

inline Eigen::MatrixXcd direct_pair_propagator(const combgate::ElectronicModel& m,
                                               const combgate::CombConfig& cfg, double x,
                                               double rtol = 1e-12) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<cplx>;
  const auto n = m.size();
  const double a = std::min(combgate::arrival_1(x, 0, cfg), combgate::arrival_2(x, 0, cfg)) - 9 * cfg.tau_s;
  const double b = std::max(combgate::arrival_1(x, 0, cfg), combgate::arrival_2(x, 0, cfg)) + 9 * cfg.tau_s;
  State u(static_cast<std::size_t>(n * n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i * n + i)] = 1.0;
  auto rhs = [&](const State& v, State& dv, double t) {
    const double f = combgate::pair_field_scalar(t, x, 0, cfg);
    Eigen::Map<const Eigen::MatrixXcd> V(v.data(), n, n);
    Eigen::Map<Eigen::MatrixXcd> D(dv.data(), n, n);
    Eigen::MatrixXcd H(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        H(i, j) = -f * m.ud(i, j) * std::polar(1.0, (m.energies[i] - m.energies[j]) * t);
    H.diagonal() -= cplx(0.0, 0.5) * m.linewidths.cast<cplx>();
    D = cplx(0.0, -1.0) * H * V;
  };
  odeint::integrate_adaptive(odeint::make_controlled(1e-15, rtol, odeint::runge_kutta_dopri5<State>()),
                             rhs, u, a, b, cfg.tau_s / 200);
  return Eigen::Map<const Eigen::MatrixXcd>(u.data(), n, n);
}

struct ToyCase {
  combgate::ElectronicModel model;
  combgate::CombConfig cfg;
  double x = 0.0;
};

/// Ground, a low-lying second level and one excited level coupled to both, at 0.1 to
/// 0.3 of the reference field. The third Magnus order, left out, grows as the field
/// cubed; it stays under 1e-6 except when the 1-2 line falls within a few bandwidths
/// of the carrier (roughly one draw in a hundred).
inline ToyCase random_case(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ToyCase c;
  const double wc = c.cfg.omega_c();
  c.model.energies = Eigen::Vector3d(0.0, wc * (0.02 + 0.3 * u(rng)), wc * (1.35 + 0.6 * u(rng)));
  c.model.linewidths = Eigen::Vector3d(0.0, 0.0, 0.0);
  c.model.ud = Eigen::MatrixXcd::Zero(3, 3);
  c.model.ud(0, 2) = 0.5 + 2.0 * u(rng);
  c.model.ud(1, 2) = cplx(0.5 + 2.0 * u(rng), 0.0) * std::polar(1.0, 6.28 * u(rng));
  c.model.ud(2, 0) = std::conj(c.model.ud(0, 2));
  c.model.ud(2, 1) = std::conj(c.model.ud(1, 2));
  c.cfg.field_rabi *= 0.1 + 0.2 * u(rng);
  c.cfg.cep_rad = 6.28 * u(rng);
  c.x = (u(rng) - 0.5) * 2e-6;
  return c;
}

inline double opnorm(const Eigen::MatrixXcd& A) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()[0];
}

}  // namespace toy
