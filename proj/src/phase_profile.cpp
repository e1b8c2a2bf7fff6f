#include "combgate/phase_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"
#include "combgate/parallel.hpp"

namespace combgate {

using cplx = std::complex<double>;

namespace {

enum class Term { Far, Interference, Quadrature, Derivative };

double eq7_integral(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha, double x,
                    Term term, const QuadOptions& opt) {
  const auto a = static_cast<Eigen::Index>(alpha);
  if (a >= m.size()) throw ConfigError("stark_phase: level index out of range");
  const double wc = cfg.omega_c();
  const double lo = 0.0;
  const double hi = wc + 8.0 / cfg.tau_s;
  const double dt = cfg.t1_s - cfg.t2_s + 2.0 * x / constants::c;

  auto weight = [&](double w) -> double {
    const double e = envelope_fourier(w - wc, cfg);
    const double s = 4.0 / constants::two_pi * e * e;
    switch (term) {
      case Term::Far: return s;
      case Term::Interference: return s * std::cos(w * dt);
      case Term::Quadrature: return s * std::sin(w * dt);
      case Term::Derivative: return -s * (2.0 * w / constants::c) * std::sin(w * dt);
    }
    return 0.0;
  };

  // Starting pieces must resolve the carrier-band Gaussian and the delay fringes
  // cos(w dt); wider ones let the Gauss and Kronrod estimates alias together.
  std::vector<double> marks{wc - 8.0 / cfg.tau_s, wc};
  {
    double step = 0.5 / cfg.tau_s;
    if (dt != 0.0) step = std::min(step, 0.25 * constants::two_pi / std::abs(dt));
    for (double w = wc - 8.0 / cfg.tau_s + step; w < hi; w += step) marks.push_back(w);
  }

  double total = 0.0;
  for (Eigen::Index g = 0; g < m.size(); ++g) {
    const double d2 = std::norm(m.ud(a, g));
    if (d2 == 0.0) continue;
    const double im = -0.5 * m.linewidths[g];
    const cplx z(m.energies[g] - m.energies[a], im == 0.0 ? -0.0 : im);
    // D/(D^2 - w^2) = [1/(D - w) + 1/(D + w)]/2, each with its own pole.
    auto gw = [&](double w) -> cplx { return 0.5 * d2 * weight(w); };
    std::vector<double> pts = marks;
    pts.push_back(z.real());
    pts = make_breakpoints(lo, hi, pts);
    total += integrate_pole(gw, z, pts, opt).value.real();
    const cplx zm = -z;
    std::vector<double> ptsm = marks;
    ptsm.push_back(zm.real());
    ptsm = make_breakpoints(lo, hi, ptsm);
    total -= integrate_pole(gw, zm, ptsm, opt).value.real();
  }
  return total;
}

}  // namespace

StarkPhase stark_phase(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                       double x, const QuadOptions& opt) {
  return {eq7_integral(m, cfg, alpha, x, Term::Far, opt),
          eq7_integral(m, cfg, alpha, x, Term::Interference, opt)};
}

double stark_phase_far(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                       const QuadOptions& opt) {
  return eq7_integral(m, cfg, alpha, 0.0, Term::Far, opt);
}

double stark_phase_derivative(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                              double x, const QuadOptions& opt) {
  return eq7_integral(m, cfg, alpha, x, Term::Derivative, opt);
}

double stark_phase_envelope(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                            double x, const QuadOptions& opt) {
  return std::hypot(eq7_integral(m, cfg, alpha, x, Term::Interference, opt),
                    eq7_integral(m, cfg, alpha, x, Term::Quadrature, opt));
}

StarkPhaseModel::StarkPhaseModel(ElectronicModel model, CombConfig cfg, QubitLevels qubit,
                                 QuadOptions opt)
    : model_(std::move(model)), cfg_(std::move(cfg)), qubit_(qubit), opt_(opt) {
  far0_ = stark_phase_far(model_, cfg_, qubit_.level0, opt_);
  far1_ = stark_phase_far(model_, cfg_, qubit_.level1, opt_);
}

StarkPhaseModel StarkPhaseModel::aimed_at(double x) const {
  CombConfig c = cfg_;
  c.aim_at(x);
  return StarkPhaseModel(model_, c, qubit_, opt_);
}

StarkPhaseModel StarkPhaseModel::with_field_scale(double factor) const {
  CombConfig c = cfg_;
  c.field_rabi *= factor;
  return StarkPhaseModel(model_, c, qubit_, opt_);
}

double StarkPhaseModel::level_phase(int which, double x) const {
  return level_far(which) +
         eq7_integral(model_, cfg_, level(which), x, Term::Interference, opt_);
}

double StarkPhaseModel::level_far(int which) const { return which == 0 ? far0_ : far1_; }

double StarkPhaseModel::level_derivative(int which, double x) const {
  return eq7_integral(model_, cfg_, level(which), x, Term::Derivative, opt_);
}

double StarkPhaseModel::differential(double x) const {
  return 0.5 * (level_phase(1, x) - level_phase(0, x));
}

double StarkPhaseModel::differential_far() const { return 0.5 * (far1_ - far0_); }

double StarkPhaseModel::differential_envelope(double x) const {
  const auto l0 = qubit_.level0, l1 = qubit_.level1;
  const double c = eq7_integral(model_, cfg_, l1, x, Term::Interference, opt_) -
                   eq7_integral(model_, cfg_, l0, x, Term::Interference, opt_);
  const double s = eq7_integral(model_, cfg_, l1, x, Term::Quadrature, opt_) -
                   eq7_integral(model_, cfg_, l0, x, Term::Quadrature, opt_);
  return 0.5 * std::hypot(c, s);
}

double differential_phase(const ElectronicModel& m, const CombConfig& cfg, const QubitLevels& q,
                          double x, const QuadOptions& opt) {
  return 0.5 * (stark_phase(m, cfg, q.level1, x, opt).total() -
                stark_phase(m, cfg, q.level0, x, opt).total());
}

double PhaseProfile::differential_at(double xq) const {
  if (x.empty() || xq < x.front() || xq > x.back()) return differential_far();
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  if (it == x.end()) return differential(x.size() - 1);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  if (j == 0) return differential(0);
  const double t = (xq - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - t) * differential(j - 1) + t * differential(j);
}

std::vector<double> position_grid(double x_center, double half_width, std::size_t points) {
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = x_center;
    return g;
  }
  for (std::size_t i = 0; i < points; ++i)
    g[i] = x_center - half_width + 2.0 * half_width * static_cast<double>(i) / (points - 1);
  return g;
}

std::vector<double> default_position_grid(const CombConfig& cfg) {
  return position_grid(cfg.overlap_position(), 3e-6, 2001);
}

PhaseProfile phase_shift_profile(const ElectronicModel& m, const CombConfig& cfg,
                                 const QubitLevels& q, const std::vector<double>& grid,
                                 const QuadOptions& opt, unsigned workers) {
  PhaseProfile p;
  p.qubit = q;
  p.x = grid;
  p.far0 = stark_phase_far(m, cfg, q.level0, opt);
  p.far1 = stark_phase_far(m, cfg, q.level1, opt);
  auto cols = parallel_map(
      grid.size(),
      [&](std::size_t i) {
        return std::pair<double, double>(
            p.far0 + eq7_integral(m, cfg, q.level0, grid[i], Term::Interference, opt),
            p.far1 + eq7_integral(m, cfg, q.level1, grid[i], Term::Interference, opt));
      },
      workers);
  p.dtheta0.resize(grid.size());
  p.dtheta1.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p.dtheta0[i] = cols[i].first;
    p.dtheta1[i] = cols[i].second;
  }
  return p;
}

void write_profile_csv(const PhaseProfile& p, std::ostream& out) {
  out << "x_m,dtheta0_rad,dtheta1_rad,differential_rad\n";
  char buf[128];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x[i], p.dtheta0[i],
                  p.dtheta1[i], p.differential(i));
    out << buf;
  }
}

}  // namespace combgate
