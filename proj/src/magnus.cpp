#include "combgate/magnus.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <unsupported/Eigen/MatrixFunctions>

#include "combgate/constants.hpp"

namespace combgate {

using cplx = std::complex<double>;

ElectronicModel ElectronicModel::from(const LevelScheme& scheme, const Eigen::Vector3d& u) {
  return {scheme.energies(), scheme.linewidths(), scheme.dipole_along(u)};
}

Spectrum pair_spectrum(const CombConfig& cfg, double x) {
  return [cfg, x](double w) { return pair_field_fourier(w, x, cfg); };
}

Eigen::MatrixXcd magnus_first_order(const ElectronicModel& m, const CombConfig& cfg, double x) {
  return magnus_first_order(m, pair_spectrum(cfg, x));
}

Eigen::MatrixXcd magnus_first_order(const ElectronicModel& m, const Spectrum& E) {
  const auto n = m.size();
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
  const cplx I(0.0, 1.0);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (m.ud(a, b) == 0.0) continue;
      X(a, b) = I * m.ud(a, b) * E(m.energies[a] - m.energies[b]);
    }
  return X;
}

namespace {

/// Frequency windows where E(D/2 - w) E(D/2 + w) is non-negligible.
std::vector<std::pair<double, double>> product_support(double delta, const CombConfig& cfg,
                                                       double band) {
  const double wc = cfg.omega_c();
  const double R = band / cfg.tau_s;
  std::vector<std::pair<double, double>> iv;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      const double c1 = 0.5 * delta - s1 * wc;
      const double c2 = s2 * wc - 0.5 * delta;
      const double lo = std::max(c1 - R, c2 - R);
      const double hi = std::min(c1 + R, c2 + R);
      if (hi > lo) iv.emplace_back(lo, hi);
    }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& p : iv) {
    if (!merged.empty() && p.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, p.second);
    else
      merged.push_back(p);
  }
  return merged;
}

class SecondOrderEngine {
 public:
  SecondOrderEngine(const ElectronicModel& m, Spectrum E, const CombConfig& cfg,
                    const MagnusOptions& opt)
      : m_(m), E_(std::move(E)), cfg_(cfg), opt_(opt) {}

  cplx entry(Eigen::Index a, Eigen::Index b) {
    const double delta = m_.energies[a] - m_.energies[b];
    const double ebar = 0.5 * (m_.energies[a] + m_.energies[b]);
    cplx sum = 0.0, square = 0.0;
    for (Eigen::Index g = 0; g < m_.size(); ++g) {
      const cplx coef = m_.ud(a, g) * m_.ud(g, b);
      if (coef == 0.0) continue;
      const double im = -0.5 * m_.linewidths[g];
      const cplx z(m_.energies[g] - ebar, im == 0.0 ? -0.0 : im);
      sum += coef * integral(delta, z);
      square += coef * E_(m_.energies[a] - m_.energies[g]) * E_(m_.energies[g] - m_.energies[b]);
    }
    // The frequency integral is the time-ordered (causal) second order; the Magnus
    // exponent is that minus X^2/2. The subtraction cancels the on-shell residue of
    // intermediate levels inside the pulse spectrum, which exp(X) already carries.
    return cplx(0.0, 1.0) * sum / constants::two_pi + 0.5 * square;
  }

 private:
  cplx integral(double delta, cplx z) {
    auto key = std::make_tuple(delta, z.real(), z.imag());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto g = [&](double w) -> cplx {
      return E_(0.5 * delta - w) * E_(0.5 * delta + w);
    };
    cplx total = 0.0;
    for (const auto& [lo, hi] : product_support(delta, cfg_, opt_.band)) {
      // Interior breakpoints at the lobe centers help the first pass.
      std::vector<double> pts = make_breakpoints(
          lo, hi, {0.5 * delta - cfg_.omega_c(), cfg_.omega_c() - 0.5 * delta,
                   0.5 * delta + cfg_.omega_c(), -cfg_.omega_c() - 0.5 * delta, z.real()});
      total += integrate_pole(g, z, pts, opt_.quad).value;
    }
    cache_.emplace(key, total);
    return total;
  }

  const ElectronicModel& m_;
  Spectrum E_;
  const CombConfig& cfg_;
  MagnusOptions opt_;
  std::map<std::tuple<double, double, double>, cplx> cache_;
};

}  // namespace

cplx magnus_second_order(const ElectronicModel& m, const CombConfig& cfg, double x,
                         std::size_t alpha, std::size_t beta, const MagnusOptions& opt) {
  SecondOrderEngine eng(m, pair_spectrum(cfg, x), cfg, opt);
  return eng.entry(static_cast<Eigen::Index>(alpha), static_cast<Eigen::Index>(beta));
}

Eigen::MatrixXcd magnus_second_order_matrix(const ElectronicModel& m, const CombConfig& cfg,
                                            double x, const MagnusOptions& opt) {
  return magnus_second_order_matrix(m, pair_spectrum(cfg, x), cfg, opt);
}

Eigen::MatrixXcd magnus_second_order_matrix(const ElectronicModel& m, const Spectrum& E,
                                            const CombConfig& cfg, const MagnusOptions& opt) {
  const auto n = m.size();
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
  if (cfg.field_rabi == 0.0) return Y;
  SecondOrderEngine eng(m, E, cfg, opt);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      bool coupled = false;
      for (Eigen::Index g = 0; g < n && !coupled; ++g)
        coupled = m.ud(a, g) != 0.0 && m.ud(g, b) != 0.0;
      if (coupled) Y(a, b) = eng.entry(a, b);
    }
  return Y;
}

Eigen::MatrixXcd unitary_polar_factor(const Eigen::MatrixXcd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

PulsePairOperator pulse_pair_operator(const ElectronicModel& m, const CombConfig& cfg, double x,
                                      const MagnusOptions& opt) {
  return pulse_pair_operator(m, pair_spectrum(cfg, x), cfg, opt);
}

PulsePairOperator pulse_pair_operator(const ElectronicModel& m, const Spectrum& E,
                                      const CombConfig& cfg, const MagnusOptions& opt) {
  PulsePairOperator op;
  op.X = magnus_first_order(m, E);
  op.Y = magnus_second_order_matrix(m, E, cfg, opt);
  op.U_raw = (op.X + op.Y).exp();
  op.U = unitary_polar_factor(op.U_raw);
  op.loss = Eigen::VectorXd::Ones(m.size()) - op.U_raw.colwise().squaredNorm().transpose();
  return op;
}

Eigen::VectorXcd free_phases(const Eigen::VectorXd& energies, double period, long k) {
  const long double tp = 2.0L * 3.14159265358979323846264338327950288L;
  Eigen::VectorXcd out(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    long double per = std::fmod(static_cast<long double>(energies[i]) * period, tp);
    long double ph = std::fmod(per * static_cast<long double>(k), tp);
    out[i] = std::polar(1.0, static_cast<double>(ph));
  }
  return out;
}

Eigen::MatrixXcd train_propagator(const Eigen::MatrixXcd& U_pair, const Eigen::VectorXd& energies,
                                  double period, int n_pulses) {
  const auto n = U_pair.rows();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 0; k < n_pulses; ++k) {
    const Eigen::VectorXcd D = free_phases(energies, period, k);
    const Eigen::MatrixXcd Uk = D.asDiagonal() * U_pair * D.conjugate().asDiagonal();
    total = Uk * total;
  }
  return total;
}

Eigen::MatrixXcd train_propagator(const ElectronicModel& m, const CombConfig& cfg, double x,
                                  const MagnusOptions& opt) {
  const auto op = pulse_pair_operator(m, cfg, x, opt);
  return train_propagator(op.U, m.energies, cfg.period(), cfg.n_pulses);
}

}  // namespace combgate
