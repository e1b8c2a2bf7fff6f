#include "combgate/error_budget.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"

namespace combgate {

using cplx = std::complex<double>;

double scattering_cross_section(double omega, const LevelScheme& scheme, std::size_t initial,
                                const Eigen::Vector3d& u) {
  using namespace constants;
  const auto n = static_cast<Eigen::Index>(scheme.size());
  const auto i = static_cast<Eigen::Index>(initial);
  const Eigen::MatrixXcd ud = scheme.dipole_along(u);
  const auto& E = scheme.energies();
  const auto& G = scheme.linewidths();
  const cplx I(0.0, 1.0);

  double sum = 0.0;  // sum_f omega'^3 |A_f|^2
  for (Eigen::Index f = 0; f < n; ++f) {
    const double wout = omega + E[i] - E[f];
    if (!(wout > 0.0)) continue;
    Eigen::Vector3cd A = Eigen::Vector3cd::Zero();
    for (Eigen::Index g = 0; g < n; ++g) {
      const cplx in_g = ud(g, i);   // absorb first
      const cplx out_g = ud(f, g);  // emit the incident photon last (crossed term)
      if (in_g == 0.0 && out_g == 0.0) continue;
      const cplx den1 = (E[g] - E[i]) - omega - 0.5 * I * G[g];
      const cplx den2 = (E[g] - E[f]) + omega - 0.5 * I * G[g];
      for (int j = 0; j < 3; ++j) {
        const auto& dj = scheme.dipole(j);
        A[j] += dj(f, g) * in_g / den1 + out_g * dj(g, i) / den2;
      }
    }
    sum += wout * wout * wout * A.squaredNorm();
  }
  const double conv = ea0 * ea0 / hbar;  // polarizability to SI
  return omega * sum * conv * conv / (6.0 * pi * eps0 * eps0 * c * c * c * c);
}

ScatteringResult scattering_probability(const LevelScheme& scheme, const CombConfig& cfg,
                                        const std::vector<std::size_t>& levels,
                                        std::size_t n_ions, const QuadOptions& opt) {
  using namespace constants;
  ScatteringResult res;
  if (cfg.field_rabi == 0.0) return res;
  const double wc = cfg.omega_c();
  // |E|^2 falls below 1e-30 of its peak at |w - wc| tau = sqrt(2 ln 1e30).
  const double half = std::sqrt(2.0 * std::log(1e30)) / cfg.tau_s;
  const double lo = std::max(wc - half, 1e-6 * wc);
  const double hi = wc + half;
  const auto& E = scheme.energies();
  const auto& G = scheme.linewidths();
  const Eigen::MatrixXcd ud = scheme.dipole_along(cfg.polarization);

  for (std::size_t lv : levels) {
    std::vector<double> pts;
    for (Eigen::Index g = 0; g < ud.rows(); ++g) {
      if (ud(g, static_cast<Eigen::Index>(lv)) == 0.0) continue;
      const double wr = E[g] - E[static_cast<Eigen::Index>(lv)];
      const double width = std::max(G[g], 1.0);
      pts.push_back(wr);
      for (double m = 1.0; m <= 1e7; m *= 10.0) {
        pts.push_back(wr - m * width);
        pts.push_back(wr + m * width);
      }
    }
    pts.push_back(wc);
    auto f = [&](double w) -> cplx {
      const double Ew = rabi_to_field * std::abs(single_pulse_fourier(w, cfg));
      return scattering_cross_section(w, scheme, lv, cfg.polarization) / w * Ew * Ew;
    };
    const QuadResult q = integrate(f, make_breakpoints(lo, hi, pts), opt);
    const double pref = eps0 * c / hbar / pi;
    const double p = pref * q.value.real();
    if (p > res.per_pulse) {
      res.per_pulse = p;
      res.quad_error = pref * q.error;
    }
  }
  res.per_train = 2.0 * cfg.n_pulses * res.per_pulse;
  res.chain = res.per_train * static_cast<double>(n_ions);
  return res;
}

LeakageChannel make_leakage_channel(std::size_t from, std::size_t to, cplx a0, double delta_omega,
                                    double period) {
  LeakageChannel ch;
  ch.from = from;
  ch.to = to;
  ch.a0 = a0;
  ch.delta_omega = delta_omega;
  ch.period = period;
  const long double turns =
      std::abs(static_cast<long double>(delta_omega) * period) / (2.0L * 3.14159265358979323846264338327950288L);
  long double ip = std::floor(turns);
  ch.k = static_cast<long>(ip);
  ch.dk = static_cast<double>(turns - ip);
  return ch;
}

LeakageResult leakage_probability(const LeakageChannel& ch, int n_pulses) {
  LeakageResult r;
  const double a2 = std::norm(ch.a0);
  const double s1 = std::sin(constants::pi * ch.dk);
  // frac(N * turns) = frac(N * dk) since N * k is an integer.
  const long double nd = static_cast<long double>(n_pulses) * ch.dk;
  const double sN = std::sin(constants::pi * static_cast<double>(nd - std::floor(nd)));
  if (std::abs(s1) < 1e-12) {
    r.resonant = true;
    r.bound = std::numeric_limits<double>::infinity();
    r.exact = a2 * n_pulses * static_cast<double>(n_pulses);
    return r;
  }
  r.exact = a2 * (sN * sN) / (s1 * s1);
  r.bound = a2 / (s1 * s1);
  return r;
}

double zeeman_leakage_estimate(double rep_rate_hz, int n_pulses, double zeeman_hz) {
  const double a = rep_rate_hz / (constants::two_pi * n_pulses * zeeman_hz);
  return a * a;
}

PhononResult phonon_excitation_probability(double dphase_dx, const ChainGeometry& geometry,
                                           std::size_t ion, double t_gate, double period,
                                           double k_c) {
  PhononResult r;
  const double pre = dphase_dx * dphase_dx / (k_c * k_c);
  for (std::size_t s = 0; s < geometry.modes(); ++s) {
    const double eta = geometry.eta(static_cast<Eigen::Index>(ion), static_cast<Eigen::Index>(s));
    const double w = geometry.mode_omega[s];
    const double wt = w * period;
    const double kick = std::norm(std::polar(1.0, w * t_gate) - 1.0);
    r.exact += pre * eta * eta * kick / (wt * wt);
    r.bound += pre * eta * eta * 4.0 / (wt * wt);
  }
  return r;
}

EffectiveHamiltonian effective_qubit_phonon_hamiltonian(const StarkPhaseModel& phases,
                                                        const ChainGeometry& geometry,
                                                        std::size_t ion, double x_eval) {
  EffectiveHamiltonian h;
  const double T = phases.comb().period();
  const double kc = phases.comb().k_c();
  h.mode_omega = geometry.mode_omega;
  for (int a = 0; a < 2; ++a) {
    h.rate[a] = phases.level_phase(a, x_eval) / T;
    const double d = phases.level_derivative(a, x_eval);
    for (std::size_t s = 0; s < geometry.modes(); ++s)
      h.coupling[a].push_back(
          geometry.eta(static_cast<Eigen::Index>(ion), static_cast<Eigen::Index>(s)) * d / (kc * T));
  }
  return h;
}

double first_order_excitation(double coupling, double omega, double t_gate) {
  return std::norm(coupling * (std::polar(1.0, omega * t_gate) - 1.0) / omega);
}

ErrorBudget assemble_budget(double crosstalk, double photon_scattering, double zeeman_leakage,
                            double fine_structure_leakage, double phonon_excitation) {
  for (double v : {crosstalk, photon_scattering, zeeman_leakage, fine_structure_leakage,
                   phonon_excitation})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw PhysicsError("assemble_budget: entries must be finite and nonnegative");
  ErrorBudget b;
  b.crosstalk = crosstalk;
  b.photon_scattering = photon_scattering;
  b.zeeman_leakage = zeeman_leakage;
  b.fine_structure_leakage = fine_structure_leakage;
  b.phonon_excitation = phonon_excitation;
  b.total = crosstalk + photon_scattering + zeeman_leakage + fine_structure_leakage +
            phonon_excitation;
  return b;
}

namespace {

struct RamanSums {
  double zeeman_exact = 0.0, zeeman_bound = 0.0;
  double fine_exact = 0.0, fine_bound = 0.0;
  long fine_k = 0;
  double fine_dk = 0.0;
  bool resonant = false;
};

RamanSums raman_leakage(const LevelScheme& scheme, const GatePlan& plan, const QubitLevels& q,
                        double x) {
  const ElectronicModel m = ElectronicModel::from(scheme, plan.comb.polarization);
  const Eigen::MatrixXcd Y = magnus_second_order_matrix(m, plan.comb, x);
  const auto& lv = scheme.levels();
  RamanSums worst;
  double best_fine_a = -1.0;
  for (std::size_t from : {q.level0, q.level1}) {
    RamanSums s;
    for (std::size_t to = 0; to < scheme.size(); ++to) {
      if (to == q.level0 || to == q.level1) continue;
      if (lv[to].linewidth > 0.0) continue;  // short-lived levels count as scattering
      const cplx a0 = Y(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
      if (a0 == 0.0) continue;
      const auto ch = make_leakage_channel(from, to, a0, lv[to].energy - lv[from].energy,
                                           plan.comb.period());
      const auto r = leakage_probability(ch, plan.n_pulses);
      s.resonant = s.resonant || r.resonant;
      if (lv[to].manifold == lv[from].manifold) {
        s.zeeman_exact += r.exact;
        s.zeeman_bound += r.bound;
      } else {
        s.fine_exact += r.exact;
        s.fine_bound += r.bound;
        if (std::abs(a0) > best_fine_a) {
          best_fine_a = std::abs(a0);
          s.fine_k = ch.k;
          s.fine_dk = ch.dk;
        }
      }
    }
    if (s.fine_bound + s.zeeman_bound >= worst.fine_bound + worst.zeeman_bound) worst = s;
  }
  return worst;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

ErrorBudget compute_budget(const LevelScheme& scheme, const StarkPhaseModel& phases,
                           const GatePlan& plan, const ChainGeometry& geometry,
                           const BudgetOptions& opt) {
  if (plan.n_pulses == 0) {
    ErrorBudget b = assemble_budget(0, 0, 0, 0, 0);
    b.notes.push_back("empty plan: no pulses, no error");
    return b;
  }
  const StarkPhaseModel ph(phases.model(), plan.comb, phases.qubit(), phases.quad());
  const double x_tg = geometry.positions.at(plan.target);
  const QubitLevels q = phases.qubit();
  const auto launch = opt.workers == 1 ? std::launch::deferred : std::launch::async;

  auto f_cross = std::async(launch, [&] {
    double s = 0.0;
    for (const auto& ip : chain_phase_report(plan, ph, geometry)) s += ip.crosstalk_infidelity;
    return s;
  });
  auto f_scat = std::async(launch, [&] {
    return scattering_probability(scheme, plan.comb, {q.level0, q.level1}, geometry.ions(),
                                  ph.quad());
  });
  auto f_raman = std::async(launch, [&] { return raman_leakage(scheme, plan, q, x_tg); });
  auto f_phonon = std::async(launch, [&] {
    const double x = x_tg + opt.pointing_offset;
    PhononResult worst;
    for (int a = 0; a < 2; ++a) {
      const auto r = phonon_excitation_probability(ph.level_derivative(a, x), geometry,
                                                   plan.target, plan.duration(),
                                                   plan.comb.period(), plan.comb.k_c());
      if (r.bound > worst.bound) worst = r;
    }
    return worst;
  });

  const double crosstalk = f_cross.get();
  const ScatteringResult scat = f_scat.get();
  const RamanSums raman = f_raman.get();
  const PhononResult phonon = f_phonon.get();

  double zeeman = 0.0;
  std::vector<std::string> notes;
  if (scheme.zeeman_hz() > 0.0) {
    zeeman = zeeman_leakage_estimate(plan.comb.rep_rate_hz, plan.n_pulses, scheme.zeeman_hz());
    notes.push_back(
        "zeeman_leakage is the repetition-phase estimate (nu_rep/(2 pi N nu_z))^2 = " +
        fmt(zeeman) + "; the Raman amplitudes computed for this polarization give " +
        fmt(raman.zeeman_bound) +
        " (worst case), so a 1e-6 entry for this row would understate the estimate");
  } else {
    zeeman = raman.zeeman_exact;
    notes.push_back("no Zeeman splitting: sublevel leakage accumulates coherently, N^2 |a0|^2 = " +
                    fmt(zeeman));
  }
  if (raman.resonant)
    notes.push_back("a Raman channel is resonant with the repetition rate; its bound is infinite");
  notes.push_back("fine_structure_leakage is the sin bound " + fmt(raman.fine_bound) +
                  " (k = " + std::to_string(raman.fine_k) + ", dk = " + fmt(raman.fine_dk) +
                  "); exact sum at this N is " + fmt(raman.fine_exact));
  notes.push_back("phonon_excitation is the bound at " + fmt(opt.pointing_offset * 1e9) +
                  " nm pointing offset; exact value at the gate time is " + fmt(phonon.exact));

  ErrorBudget b = assemble_budget(crosstalk, scat.per_train, zeeman, raman.fine_bound,
                                  phonon.bound);
  b.zeeman_from_y = raman.zeeman_bound;
  b.phonon_exact = phonon.exact;
  b.fine_structure_exact = raman.fine_exact;
  b.fine_structure_k = raman.fine_k;
  b.fine_structure_dk = raman.fine_dk;
  b.scattering_per_pulse = scat.per_pulse;
  b.notes = std::move(notes);
  return b;
}

void write_budget_table(const ErrorBudget& b, std::ostream& out) {
  char buf[128];
  auto row = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%-34s %12.3e\n", name, v);
    out << buf;
  };
  out << "Error source                       Contribution\n";
  out << "---------------------------------- ------------\n";
  row("Crosstalk", b.crosstalk);
  row("Photon scattering", b.photon_scattering);
  row("Leakage to Zeeman sublevels", b.zeeman_leakage);
  row("Leakage to fine-structure levels", b.fine_structure_leakage);
  row("Phonon excitation", b.phonon_excitation);
  out << "---------------------------------- ------------\n";
  row("Total", b.total);
  for (const auto& n : b.notes) out << "note: " << n << "\n";
}

void write_budget_csv(const ErrorBudget& b, std::ostream& out) {
  char buf[128];
  out << "source,value\n";
  auto row = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%s,%.17g\n", name, v);
    out << buf;
  };
  row("crosstalk", b.crosstalk);
  row("photon_scattering", b.photon_scattering);
  row("zeeman_leakage", b.zeeman_leakage);
  row("fine_structure_leakage", b.fine_structure_leakage);
  row("phonon_excitation", b.phonon_excitation);
  row("total", b.total);
}

}  // namespace combgate
