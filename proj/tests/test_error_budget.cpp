#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"
#include "combgate/error_budget.hpp"

using namespace combgate;
using cplx = std::complex<double>;
using constants::pi;

namespace {

struct Fixture {
  LevelScheme scheme = load_level_scheme(bundled_scheme_path());
  CombConfig cfg;
  QubitLevels q{scheme.find("S1/2:-1/2"), scheme.find("D5/2:-1/2")};
  StarkPhaseModel phases{ElectronicModel::from(scheme, cfg.polarization), cfg, q};
  ChainGeometry pair = [] {
    ChainGeometry g;
    g.positions = {0.0, 10e-6};
    g.mode_omega = {constants::two_pi * 600e3};
    g.eta = Eigen::MatrixXd::Constant(2, 1, 0.09);
    return g;
  }();
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("geometric leakage sum never exceeds the sin bound (10^4 random channels)") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double T = 1e-9 * (1 + 99 * u(rng));
    const double de = constants::two_pi * std::pow(10.0, 5 + 8 * u(rng));
    const cplx a0 = std::polar(std::pow(10.0, -6 + 4 * u(rng)), 6.28 * u(rng));
    const int n = 1 + static_cast<int>(2000 * u(rng));
    const auto ch = make_leakage_channel(0, 1, a0, de, T);
    CHECK(ch.dk >= 0.0);
    CHECK(ch.dk < 1.0);
    const auto r = leakage_probability(ch, n);
    if (r.resonant) continue;
    // Brute-force sum; |sum| <= N always.
    cplx s = 0.0;
    const long double ph = std::fmod(static_cast<long double>(de) * T, 2.0L * 3.14159265358979323846L);
    for (int k = 0; k < n; ++k) s += std::polar(1.0, static_cast<double>(std::fmod(ph * k, 2.0L * 3.14159265358979323846L)));
    const double brute = std::norm(a0 * s);
    REQUIRE(r.exact <= r.bound * (1 + 1e-9));
    REQUIRE(r.exact <= std::norm(a0) * n * n * (1 + 1e-9));
    REQUIRE(std::abs(r.exact - brute) <= 1e-6 * std::max(brute, std::norm(a0)));
    ++checked;
  }
  CHECK(checked > 9900);
}

TEST_CASE("resonant channel") {
  const auto ch = make_leakage_channel(0, 1, 1e-3, constants::two_pi * 3e8, 1e-8);
  const auto r = leakage_probability(ch, 100);
  CHECK(r.resonant);
  CHECK(r.exact == doctest::Approx(1e-6 * 1e4));
  CHECK(std::isinf(r.bound));
}

TEST_CASE("fine-structure channel numbers") {
  const auto& f = fx();
  const double de = f.scheme.energies()[f.scheme.find("D5/2:-1/2")] - f.scheme.energies()[f.scheme.find("D3/2:-1/2")];
  const auto ch = make_leakage_channel(0, 1, 1e-3, -de, 1e-8);
  CHECK(ch.k == 18287);
  CHECK(ch.dk == doctest::Approx(0.34).epsilon(0.02));
  CHECK(leakage_probability(ch, 800).bound == doctest::Approx(1e-6 / std::pow(std::sin(pi * ch.dk), 2)));
  CHECK(zeeman_leakage_estimate(100e6, 800, 2e6) == doctest::Approx(std::pow(100e6 / (constants::two_pi * 800 * 2e6), 2)));
  CHECK(zeeman_leakage_estimate(100e6, 800, 2e6) == doctest::Approx(9.9e-5).epsilon(0.01));
}

TEST_CASE("first-order excitation against a driven oscillator in Fock space") {
  // H = g (a + a^dagger) in the frame rotating with w; exact population outside |0>
  // is 1 - exp(-|alpha|^2) with |alpha|^2 the first-order expression.
  namespace odeint = boost::numeric::odeint;
  const int n = 12;
  for (double g : {0.02, 0.1}) {
    const double w = 1.0, tg = 3.7;
    using State = std::vector<cplx>;
    State psi(n, 0.0);
    psi[0] = 1.0;
    auto rhs = [&](const State& v, State& dv, double t) {
      const cplx e = std::polar(1.0, -w * t);
      for (int k = 0; k < n; ++k) {
        cplx s = 0.0;
        if (k + 1 < n) s += g * e * std::sqrt(k + 1.0) * v[k + 1];
        if (k > 0) s += g * std::conj(e) * std::sqrt(static_cast<double>(k)) * v[k - 1];
        dv[k] = cplx(0, -1) * s;
      }
    };
    odeint::integrate_adaptive(odeint::make_controlled(1e-14, 1e-12, odeint::runge_kutta_dopri5<State>()), rhs, psi, 0.0, tg, 0.01);
    const double p = 1.0 - std::norm(psi[0]);
    const double a2 = first_order_excitation(g, w, tg);
    CHECK(p == doctest::Approx(1.0 - std::exp(-a2)).epsilon(1e-8));
    CHECK(a2 == doctest::Approx(p).epsilon(2 * a2));
  }
}

TEST_CASE("phonon excitation: discrete kicks, bound and scaling") {
  const auto& f = fx();
  const ChainGeometry g = single_ion(0.0, constants::two_pi * 600e3, 0.09);
  const double T = 1e-8, kc = f.cfg.k_c();
  const double dphi = 1e-3 * kc;
  for (int N : {1, 100, 200, 799, 800}) {
    const auto r = phonon_excitation_probability(dphi, g, 0, N * T, T, kc);
    CHECK(r.exact <= r.bound * (1 + 1e-12));
    // Each pair kicks the mode by -i (eta/kc) dphi; the kicks add with phases w k T.
    cplx alpha = 0.0;
    const double w = g.mode_omega[0];
    for (int k = 0; k < N; ++k) alpha += std::polar(0.09 / kc * dphi, w * k * T);
    CHECK(r.exact == doctest::Approx(std::norm(alpha)).epsilon(1e-3));
  }
  const auto a = phonon_excitation_probability(dphi, g, 0, 200 * T, T, kc);
  const auto b = phonon_excitation_probability(2 * dphi, g, 0, 200 * T, T, kc);
  CHECK(b.exact == doctest::Approx(4 * a.exact));
  // Vanishes where the phase is stationary.
  CHECK(phonon_excitation_probability(0.0, g, 0, 200 * T, T, kc).bound == 0.0);
}

TEST_CASE("effective Hamiltonian reproduces the phonon formula") {
  const auto& f = fx();
  const ChainGeometry g = single_ion(30e-9, constants::two_pi * 600e3, 0.09);
  const EffectiveHamiltonian h = effective_qubit_phonon_hamiltonian(f.phases, g, 0, 30e-9);
  const double T = f.cfg.period();
  CHECK(h.rate[0] * T == doctest::Approx(f.phases.level_phase(0, 30e-9)));
  for (int a = 0; a < 2; ++a) {
    const double tg = 200 * T;
    const double p1 = first_order_excitation(h.coupling[a][0], h.mode_omega[0], tg);
    const double p2 = phonon_excitation_probability(f.phases.level_derivative(a, 30e-9), g, 0, tg, T, f.cfg.k_c()).exact;
    CHECK(p1 == doctest::Approx(p2).epsilon(1e-10));
  }
}

TEST_CASE("scattering cross section: Rayleigh limit and resonance") {
  const auto& f = fx();
  const double wP = f.scheme.energies()[f.scheme.find("P1/2:-1/2")];
  const Eigen::Vector3d u(0, 0, 1);
  const double r1 = scattering_cross_section(0.01 * wP, f.scheme, f.q.level0, u) / std::pow(0.01 * wP, 4);
  const double r2 = scattering_cross_section(0.02 * wP, f.scheme, f.q.level0, u) / std::pow(0.02 * wP, 4);
  CHECK(r1 == doctest::Approx(r2).epsilon(2e-3));
  const double near = scattering_cross_section(0.999 * wP, f.scheme, f.q.level0, u);
  const double far = scattering_cross_section(0.5 * wP, f.scheme, f.q.level0, u);
  CHECK(near > 100 * far);
  CHECK(far > 0.0);
  // On resonance the elastic width-limited value stays finite and below lambda^2/(2 pi) * 3.
  const double lam = constants::two_pi * constants::c / wP;
  const double on = scattering_cross_section(wP, f.scheme, f.q.level0, u);
  CHECK(std::isfinite(on));
  CHECK(on < 3 * lam * lam / (2 * pi));
}

TEST_CASE("scattering per pulse and per train") {
  const auto& f = fx();
  const ScatteringResult r = scattering_probability(f.scheme, f.cfg, {f.q.level0, f.q.level1}, 2);
  CHECK(r.per_pulse > 0.0);
  CHECK(r.per_pulse <= 1e-9);
  CHECK(r.per_train == doctest::Approx(2 * f.cfg.n_pulses * r.per_pulse));
  CHECK(r.chain == doctest::Approx(2 * r.per_train));
  // Quadratic in the field.
  CombConfig c2 = f.cfg;
  c2.field_rabi *= 2;
  CHECK(scattering_probability(f.scheme, c2, {f.q.level0}, 1).per_pulse ==
        doctest::Approx(4 * scattering_probability(f.scheme, f.cfg, {f.q.level0}, 1).per_pulse).epsilon(1e-6));
}

TEST_CASE("assembly is a plain sum and rejects bad entries") {
  const ErrorBudget b = assemble_budget(1e-5, 2e-6, 3e-5, 4e-7, 5e-5);
  CHECK(b.total == doctest::Approx(1e-5 + 2e-6 + 3e-5 + 4e-7 + 5e-5));
  CHECK_THROWS_AS(assemble_budget(-1e-5, 0, 0, 0, 0), PhysicsError);
  CHECK_THROWS(assemble_budget(std::nan(""), 0, 0, 0, 0));
}

TEST_CASE("budget for the default two-ion configuration") {
  const auto& f = fx();
  const GatePlan plan = compile_rotation(Axis::Z, pi / 2, 0, f.phases, f.pair);
  const ErrorBudget b = compute_budget(f.scheme, f.phases, plan, f.pair);
  CHECK(b.total >= 2e-4);
  CHECK(b.total <= 8e-4);
  CHECK(b.fine_structure_k == 18287);
  CHECK(b.phonon_exact <= b.phonon_excitation);
  CHECK(b.fine_structure_exact <= b.fine_structure_leakage);
  CHECK(b.zeeman_from_y < 1e-12);
  bool noted = false;
  for (const auto& n : b.notes) noted = noted || n.find("zeeman_leakage") != std::string::npos;
  CHECK(noted);
  std::ostringstream t, c;
  write_budget_table(b, t);
  write_budget_csv(b, c);
  CHECK(t.str().find("Total") != std::string::npos);
  CHECK(c.str().rfind("source,value\n", 0) == 0);
  // Serial and concurrent evaluation agree bit for bit.
  BudgetOptions serial;
  serial.workers = 1;
  CHECK(compute_budget(f.scheme, f.phases, plan, f.pair, serial).total == b.total);
}
